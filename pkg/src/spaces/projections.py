"""
Projeções de nível Ε_k sobre vetores graduados (F_k = I − Ε_k).

Dois modos, ambos com Ε_k∘Ε_l = Ε_min(k,l), Ε_N = I no suporte graduado e
Ε_k = 0 para k < 0:

  truncate  zera as coordenadas de nível > k;
  average   substitui cada coordenada de nível > k pela média sobre a classe de
            extensões irmãs declarada (mesmo nível, mesmo prefixo até o nível k).

O modo average exige a função de prefixo da graduação. Ambos são contrativos
em ℓp (truncar não aumenta nenhuma soma; a média em blocos obedece a Jensen).
"""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..common.errors import ConfigError
from .vectors import Key, Vector

ProjectionMode = Literal["truncate", "average"]
MODES: tuple[str, ...] = ("truncate", "average")


@dataclass(frozen=True, eq=False)
class Grading:
    levels: Mapping[Key, int]
    prefix: Callable[[Key, int], Hashable] | None = None
    _classes: dict = field(default_factory=dict, repr=False)

    def level(self, key: Key) -> int:
        try:
            return self.levels[key]
        except KeyError:
            raise ConfigError(f"Chave sem nível na graduação: {key!r}.") from None

    @property
    def max_level(self) -> int:
        return max(self.levels.values(), default=0)

    def class_of(self, key: Key, k: int) -> Hashable:
        if self.prefix is None:
            raise ConfigError("Modo average exige família de ramificação declarada (prefixo).")
        return (self.level(key), self.prefix(key, k))

    def class_members(self, k: int) -> dict[Hashable, list[Key]]:
        """Classes de extensões irmãs no corte k (somente chaves de nível > k)."""
        cached = self._classes.get(k)
        if cached is None:
            cached = {}
            for key, lvl in self.levels.items():
                if lvl > k:
                    cached.setdefault(self.class_of(key, k), []).append(key)
            self._classes[k] = cached
        return cached


def _node_part(key: Key) -> tuple:
    # chaves (nível, nó) dos sistemas por níveis; demais chaves são o próprio nó
    if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], tuple):
        return key[1]
    return key  # type: ignore[return-value]


def _tag(key: Key) -> Hashable:
    if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], tuple):
        return key[0]
    return None


def tree_grading(keys: Iterable[Key]) -> Grading:
    """Graduação por profundidade do nó; aceita chaves s ou (nível, s)."""
    levels = {k: len(_node_part(k)) for k in keys}
    return Grading(levels, prefix=lambda key, k: (_tag(key), _node_part(key)[:k]))


def level_projection(v: Mapping[Key, float], k: int, mode: str, grading: Grading) -> Vector:
    if mode not in MODES:
        raise ConfigError(f"Modo de projeção desconhecido: {mode!r} (use {MODES}).")
    if k < 0:
        return Vector()
    if mode == "truncate":
        return Vector({key: val for key, val in v.items() if grading.level(key) <= k})
    out: dict[Key, float] = {}
    sums: dict[Hashable, float] = {}
    for key, val in v.items():
        if grading.level(key) <= k:
            out[key] = val
        else:
            cls = grading.class_of(key, k)
            sums[cls] = sums.get(cls, 0.0) + val
    members = grading.class_members(k)
    for cls, total in sums.items():
        group = members[cls]
        mean = total / len(group)
        for key in group:
            out[key] = mean
    return Vector(out)


def truncate_mask(keys: Iterable[Key], k: int, grading: Grading) -> np.ndarray:
    """Máscara de colunas mantidas por Ε_k (modo truncate) sobre um índice de chaves."""
    return np.array([grading.level(key) <= k for key in keys], dtype=bool)
