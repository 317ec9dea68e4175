"""
Vetores de suporte finito e funcionais lineares sobre chaves opacas
(nós da árvore, pares (nível, nó), inteiros).

O vetor zero é o mapa vazio: entradas nulas são descartadas na construção.
Serialização JSON: {"<chave como array JSON>": valor}.
"""

from __future__ import annotations

import json
import math
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from typing import Any

import numpy as np

Key = Hashable


def encode_key(key: Key) -> str:
    """Chave → texto JSON compacto (tuplas viram arrays)."""

    def _plain(x: Any) -> Any:
        if isinstance(x, tuple):
            return [_plain(y) for y in x]
        if isinstance(x, np.integer):
            return int(x)
        return x

    return json.dumps(_plain(key), separators=(",", ":"))


def decode_key(text: str) -> Key:
    def _frozen(x: Any) -> Any:
        if isinstance(x, list):
            return tuple(_frozen(y) for y in x)
        return x

    return _frozen(json.loads(text))


class Vector(Mapping):
    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[Key, float] | Iterable[tuple[Key, float]] | None = None):
        items = entries.items() if isinstance(entries, Mapping) else (entries or ())
        self._entries: dict[Key, float] = {k: float(v) for k, v in items if v != 0}

    def __getitem__(self, key: Key) -> float:
        return self._entries[key]

    def __iter__(self) -> Iterator[Key]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._entries!r})"

    def _new(self, entries: dict[Key, float]) -> "Vector":
        return Vector(entries)

    def __add__(self, other: Mapping) -> "Vector":
        out = dict(self._entries)
        for k, v in other.items():
            out[k] = out.get(k, 0.0) + v
        return self._new(out)

    def __sub__(self, other: Mapping) -> "Vector":
        out = dict(self._entries)
        for k, v in other.items():
            out[k] = out.get(k, 0.0) - v
        return self._new(out)

    def __neg__(self) -> "Vector":
        return self._new({k: -v for k, v in self._entries.items()})

    def __mul__(self, scalar: float) -> "Vector":
        return self._new({k: scalar * v for k, v in self._entries.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Vector":
        return self._new({k: v / scalar for k, v in self._entries.items()})

    def max_abs(self) -> float:
        return max((abs(v) for v in self._entries.values()), default=0.0)

    def to_json(self) -> dict[str, float]:
        return {encode_key(k): v for k, v in self._entries.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, float]) -> "Vector":
        return cls({decode_key(k): float(v) for k, v in data.items()})


def basis_vector(key: Key) -> Vector:
    return Vector({key: 1.0})


class LinearFunctional(Vector):
    """Funcional de suporte finito com cota de norma declarada (opcional)."""

    __slots__ = ("bound",)

    def __init__(self, entries=None, bound: float | None = None):
        super().__init__(entries)
        self.bound = bound

    def _new(self, entries: dict[Key, float]) -> "LinearFunctional":
        return LinearFunctional(entries)

    def __repr__(self) -> str:
        return f"LinearFunctional({self._entries!r}, bound={self.bound!r})"


def pair(f: Mapping[Key, float], v: Mapping[Key, float]) -> float:
    """⟨f, v⟩ = Σ f(k) v(k) sobre as chaves comuns, com soma compensada."""
    small, large = (f, v) if len(f) <= len(v) else (v, f)
    return math.fsum(val * large[k] for k, val in small.items() if k in large)


def to_matrix(vectors: Sequence[Mapping[Key, float]], keys: Sequence[Key]) -> np.ndarray:
    """Linhas densas sobre um índice de chaves fixo; chaves fora do índice são ignoradas."""
    index = {k: j for j, k in enumerate(keys)}
    out = np.zeros((len(vectors), len(keys)), dtype=np.float64)
    for i, vec in enumerate(vectors):
        for k, val in vec.items():
            j = index.get(k)
            if j is not None:
                out[i, j] = val
    return out


def from_row(row: np.ndarray, keys: Sequence[Key]) -> Vector:
    nz = np.flatnonzero(row)
    return Vector({keys[j]: float(row[j]) for j in nz})
