"""
Famílias de sistemas por níveis (i, s) com cronograma δ_i.

  gluing     nível i sobre T^b_{min(2^i, D)}
  segmented  nível 0 sobre T^b_1; nível j ≥ 1 sobre uma árvore de profundidade
             min(K^j, D − N_{j−1}) + 1 cuja raiz tem b^{N_{j−1}} sucessores
             (um por ramo de T^b_{N_{j−1}})

Todas as chaves (i, s) formam um único espaço de coordenadas ℓ1. A perturbação
com semente usa a escala δ_i/(2·total de chaves) na linha do funcional (i, s) e
na coluna da chave (i, s), o que dá |⟨x*_{i,s}, x_{j,t}⟩| < δ_i para (i,s) ≠ (j,t).

Cronogramas: não crescentes, valores em [0, 1) e com as condições de pequenez
de SCHEDULE_CHECKS. Um cronograma rejeitado informa a desigualdade violada.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..common.errors import CapacityExhausted, ConfigError
from ..common.log_util import log
from ..spaces.vectors import Key, LinearFunctional, Vector, decode_key, encode_key, from_row
from ..trees.core import HyperbolicTree, Node, enumerate_nodes, partial_sums
from .biorth import (
    DUAL_BOUND,
    BiorthSystem,
    _perturbation,
    _rows_from_json,
    _rows_to_json,
    ancestor_matrix,
    assert_system,
    system_from_dict,
)

QUEM = "Python"
ONDE = "systems.leveled"

GLUING = "gluing"
SEGMENTED = "segmented"
KINDS = (GLUING, SEGMENTED)

# matrizes densas (chaves × chaves); acima disso a geração é recusada
MAX_KEYS = 5000

ScheduleCheck = Callable[[Sequence[float], int], tuple[bool, str]]


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ConfigError(f"Tipo de família desconhecido: {kind!r} (use {KINDS}).")


def _check_K(K: int) -> None:
    if int(K) != K or K < 2:
        raise ConfigError(f"K inválido: {K} (esperado inteiro ≥ 2).")


def default_schedule(kind: str, levels: int, K: int = 2) -> list[float]:
    """δ_0..δ_levels: gluing 2^{−2i}/200; segmented K^{−2(i+1)}/200."""
    _check_kind(kind)
    if kind == GLUING:
        return [4.0**-i / 200 for i in range(levels + 1)]
    _check_K(K)
    return [float(K) ** (-2 * (i + 1)) / 200 for i in range(levels + 1)]


def _check_range(schedule: Sequence[float], K: int) -> tuple[bool, str]:
    for i, d in enumerate(schedule):
        if math.isnan(d) or not (0 <= d < 1):
            return False, f"δ_{i} = {d} fora de [0, 1)"
    return True, f"{len(schedule)} valores em [0, 1)"


def _check_monotone(schedule: Sequence[float], K: int) -> tuple[bool, str]:
    for i in range(1, len(schedule)):
        if schedule[i] > schedule[i - 1]:
            return False, f"δ_{i} = {schedule[i]} > δ_{i - 1} = {schedule[i - 1]}"
    return True, "não crescente"


def _check_gluing_smallness(schedule: Sequence[float], K: int) -> tuple[bool, str]:
    worst = 0.0
    for l in range(len(schedule) - 2):
        lhs = 2 * 2 ** (2 * l + 2) * (schedule[l + 1] + schedule[l + 2])
        if lhs > 1 / 12:
            return False, f"2·2^(2l+2)·(δ_{l + 1}+δ_{l + 2}) = {lhs:.6g} > 1/12 (l = {l})"
        worst = max(worst, lhs)
    return True, f"max 2·2^(2l+2)·(δ_(l+1)+δ_(l+2)) = {worst:.6g} ≤ 1/12"


def _check_segmented_smallness(schedule: Sequence[float], K: int) -> tuple[bool, str]:
    worst = 0.0
    for i in range(1, len(schedule)):
        factor = K ** (i - 1) + K**i + K ** (2 * (i - 1)) + K**i * (K**i + 1)
        lhs = schedule[i - 1] * factor
        rhs = K ** (i - 1) / 12
        if lhs > rhs:
            return False, (
                f"δ_{i - 1}·(K^{i - 1}+K^{i}+K^{2 * (i - 1)}+K^{i}(K^{i}+1)) = {lhs:.6g} > K^{i - 1}/12 = {rhs:.6g} (i = {i})"
            )
        worst = max(worst, lhs / rhs)
    return True, f"max razão lado esquerdo / (K^(i−1)/12) = {worst:.6g} ≤ 1"


SCHEDULE_CHECKS: dict[str, list[tuple[str, ScheduleCheck]]] = {
    GLUING: [
        ("range", _check_range),
        ("monotone", _check_monotone),
        ("gluing_smallness", _check_gluing_smallness),
    ],
    SEGMENTED: [
        ("range", _check_range),
        ("monotone", _check_monotone),
        ("segmented_smallness", _check_segmented_smallness),
    ],
}


def check_schedule(schedule: Sequence[float], kind: str, K: int = 2) -> list[tuple[str, bool, str]]:
    _check_kind(kind)
    if kind == SEGMENTED:
        _check_K(K)
    values = [float(d) for d in schedule]
    return [(name, *step(values, K)) for name, step in SCHEDULE_CHECKS[kind]]


def validate_schedule(schedule: Sequence[float], kind: str, K: int = 2) -> None:
    for name, ok, detail in check_schedule(schedule, kind, K):
        if not ok:
            raise ConfigError(f"Cronograma δ rejeitado ({name}): {detail}.")


def required_levels(D: int) -> int:
    """Maior índice de nível usado pela colagem em profundidade D: ⌊log₂ D⌋ + 2."""
    if D < 0:
        raise ConfigError(f"Profundidade inválida: {D}.")
    if D == 0:
        return 1
    return int(D).bit_length() - 1 + 2


def segment_levels(D: int, K: int) -> int:
    """Menor n com N_n ≥ D."""
    _check_K(K)
    if D < 0:
        raise ConfigError(f"Profundidade inválida: {D}.")
    n = 0
    while partial_sums(K, n)[-1] < D:
        n += 1
    return n


def gluing_trees(L: int, branching: int = 2, depth: int | None = None) -> list[HyperbolicTree]:
    return [
        HyperbolicTree(depth=2**i if depth is None else min(2**i, depth), branching=branching) for i in range(L + 1)
    ]


def segment_trees(
    L: int, K: int, branching: int = 2, depth: int | None = None, capacity: int | None = None
) -> list[HyperbolicTree]:
    """Árvores de segmento dos níveis 0..L (ver docstring do módulo)."""
    _check_K(K)
    sums = partial_sums(K, L)
    trees = [HyperbolicTree(depth=1, branching=branching)]
    for j in range(1, L + 1):
        seg = K**j if depth is None else max(0, min(K**j, depth - sums[j - 1]))
        needed = branching ** sums[j - 1]
        if capacity is not None and capacity < needed:
            raise CapacityExhausted(
                f"Nível {j}: a raiz precisa de {needed} sucessores (ramos de T_{sums[j - 1]}), capacidade {capacity}."
            )
        trees.append(HyperbolicTree(depth=seg + 1, branching=branching, root_branching=needed))
    return trees


@dataclass(frozen=True, eq=False)
class LeveledSystems:
    kind: str
    trees: tuple[HyperbolicTree, ...]
    schedule: tuple[float, ...]
    keys: tuple[Key, ...]
    vectors: np.ndarray
    functionals: np.ndarray
    seed: int | None = None
    K: int | None = None
    depth: int | None = None
    branching: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {k: r for r, k in enumerate(self.keys)})
        offsets = [0]
        for i in range(len(self.trees)):
            offsets.append(offsets[-1] + sum(1 for k in self.keys if k[0] == i))
        object.__setattr__(self, "_offsets", offsets)

    @property
    def max_level(self) -> int:
        return len(self.trees) - 1

    @property
    def row_labels(self) -> tuple[Key, ...]:
        return self.keys

    @property
    def row_delta(self) -> np.ndarray:
        return np.array([self.schedule[i] for i, _ in self.keys], dtype=np.float64)

    @property
    def ancestors(self) -> np.ndarray:
        cached = self.__dict__.get("_ancestors")
        if cached is None:
            cached = ancestor_matrix(self.keys)
            object.__setattr__(self, "_ancestors", cached)
        return cached

    def level_slice(self, i: int) -> slice:
        if not 0 <= i <= self.max_level:
            raise ConfigError(f"Nível {i} fora de [0, {self.max_level}].")
        return slice(self._offsets[i], self._offsets[i + 1])  # type: ignore[attr-defined]

    def index(self, i: int, s: Node) -> int:
        try:
            return self._index[(i, s)]  # type: ignore[attr-defined]
        except KeyError:
            raise ConfigError(f"Chave ({i}, {s}) fora da família.") from None

    def vector(self, i: int, s: Node) -> Vector:
        return from_row(self.vectors[self.index(i, s)], self.keys)

    def functional(self, i: int, s: Node) -> LinearFunctional:
        row = self.functionals[self.index(i, s)]
        return LinearFunctional(from_row(row, self.keys), bound=float(np.abs(row).max()))

    def path_functional(self, i: int, s: Node) -> LinearFunctional:
        """y*_{i,s} = Σ_{t≤s} x*_{i,t} (inclui a raiz do nível)."""
        row = self.ancestors[self.index(i, s)] @ self.functionals
        return LinearFunctional(from_row(row, self.keys), bound=DUAL_BOUND)

    def path_functional_matrix(self) -> np.ndarray:
        return self.ancestors @ self.functionals

    def level(self, i: int) -> BiorthSystem:
        """Visão do nível i como BiorthSystem (linhas do nível, colunas globais)."""
        sl = self.level_slice(i)
        labels = self.keys[sl]
        return BiorthSystem(
            tree=self.trees[i],
            nodes=tuple(s for _, s in labels),
            keys=self.keys,
            vectors=self.vectors[sl],
            functionals=self.functionals[sl],
            delta=self.schedule[i],
            seed=self.seed,
            labels=labels,
        )


def leveled_systems(
    max_level: int,
    kind: str = GLUING,
    schedule: Sequence[float] | None = None,
    seed: int | None = 0,
    *,
    branching: int = 2,
    depth: int | None = None,
    K: int = 2,
    capacity: int | None = None,
) -> LeveledSystems:
    """Gera os níveis 0..max_level; seed=None (ou cronograma nulo) dá sistemas exatos."""
    _check_kind(kind)
    if max_level < 0:
        raise ConfigError(f"Nível máximo inválido: {max_level}.")
    if schedule is None:
        schedule = default_schedule(kind, max_level, K)
    if len(schedule) < max_level + 1:
        raise ConfigError(f"Cronograma com {len(schedule)} valores; são necessários {max_level + 1}.")
    schedule = tuple(float(d) for d in schedule[: max_level + 1])
    validate_schedule(schedule, kind, K)

    if kind == GLUING:
        trees = gluing_trees(max_level, branching, depth)
    else:
        if depth is not None and max_level > segment_levels(depth, K):
            raise ConfigError(
                f"Profundidade {depth} usa níveis até {segment_levels(depth, K)}; nível máximo {max_level} não se aplica."
            )
        trees = segment_trees(max_level, K, branching, depth, capacity)

    total = sum(t.node_count() for t in trees)
    if total > MAX_KEYS:
        raise CapacityExhausted(f"Família com {total} chaves excede o limite de {MAX_KEYS} coordenadas densas.")
    keys = tuple((i, s) for i, tree in enumerate(trees) for s in enumerate_nodes(tree))

    key_delta = np.array([schedule[i] for i, _ in keys], dtype=np.float64)
    if seed is None or not key_delta.any():
        vectors, functionals = np.eye(total), np.eye(total)
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        vectors, functionals = _perturbation(total, key_delta, rng)

    family = LeveledSystems(
        kind=kind,
        trees=tuple(trees),
        schedule=schedule,
        keys=keys,
        vectors=vectors,
        functionals=functionals,
        seed=seed,
        K=K if kind == SEGMENTED else None,
        depth=depth,
        branching=branching,
    )
    assert_system(family)
    log(QUEM, ONDE, f"Concluído: família {kind} com {max_level + 1} níveis e {total} chaves (seed={seed}).")
    return family


def leveled_to_dict(family: LeveledSystems) -> dict:
    return {
        "kind": family.kind,
        "K": family.K,
        "depth": family.depth,
        "branching": family.branching,
        "trees": [t.to_spec() for t in family.trees],
        "delta": None,
        "seed": family.seed,
        "schedule": list(family.schedule),
        "keys": [encode_key(k) for k in family.keys],
        "vectors": _rows_to_json(family.vectors, family.keys),
        "functionals": _rows_to_json(family.functionals, family.keys),
    }


def leveled_from_dict(data: dict) -> LeveledSystems:
    _check_kind(data.get("kind", ""))
    keys = tuple(decode_key(k) for k in data["keys"])
    return LeveledSystems(
        kind=data["kind"],
        trees=tuple(HyperbolicTree.from_spec(t) for t in data["trees"]),
        schedule=tuple(float(d) for d in data["schedule"]),
        keys=keys,
        vectors=_rows_from_json(data["vectors"], keys),
        functionals=_rows_from_json(data["functionals"], keys),
        seed=data.get("seed"),
        K=data.get("K"),
        depth=data.get("depth"),
        branching=int(data.get("branching", 2)),
    )


def load_any_system(data: dict) -> BiorthSystem | LeveledSystems:
    """Reconstrói um dump de sistema, simples ou por níveis, pelo campo kind."""
    if data.get("kind") == "single":
        return system_from_dict(data)
    return leveled_from_dict(data)
