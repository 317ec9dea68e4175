"""
Modelos de espaço normado sobre coordenadas com chaves:

  Lp(p)                     ℓp, p ∈ [1, ∞]
  NestedSum(outer_p, blocks) soma ℓ_outer de blocos ℓ_{p_b} com chaves disjuntas
  EvalNorm(functionals, ε)  ‖v‖ = max_f |⟨f,v⟩| + ε·max_k |v(k)|

Cada modelo calcula a norma de um Vector e, em lote, normas de linhas e
distâncias entre pares (vetor condensado, mesma ordem de scipy pdist) sobre
uma matriz densa indexada por uma lista de chaves.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from ..common.errors import ConfigError
from .vectors import Key, LinearFunctional, Vector, decode_key, encode_key, pair, to_matrix

# índices de chaves distintos mantidos por EvalNorm.functional_matrix
MATRIX_CACHE_SIZE = 8


def _check_p(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ConfigError(f"Expoente p inválido: {p} (esperado p ∈ [1, ∞]).")
    return p


def _p_to_json(p: float) -> float | str:
    return "inf" if math.isinf(p) else p


def _p_from_json(raw: float | str) -> float:
    return math.inf if str(raw).lower() in ("inf", "infinity") else float(raw)


def _lp_of_values(values: Sequence[float], p: float) -> float:
    if not values:
        return 0.0
    if p == 1:
        return math.fsum(abs(x) for x in values)
    if p == 2:
        return math.hypot(*values)
    if math.isinf(p):
        return max(abs(x) for x in values)
    return math.fsum(abs(x) ** p for x in values) ** (1.0 / p)


def _pdist_lp(matrix: np.ndarray, p: float) -> np.ndarray:
    if p == 1:
        return pdist(matrix, "cityblock")
    if p == 2:
        return pdist(matrix, "euclidean")
    if math.isinf(p):
        return pdist(matrix, "chebyshev")
    return pdist(matrix, "minkowski", p=p)


def _combine(columns: np.ndarray, p: float) -> np.ndarray:
    """Norma ℓp ao longo do eixo 1 (uma coluna por bloco)."""
    if columns.shape[1] == 0:
        return np.zeros(columns.shape[0])
    return np.linalg.norm(columns, ord=p, axis=1)


class SpaceModel(ABC):
    @abstractmethod
    def norm(self, v: Mapping[Key, float]) -> float: ...

    @abstractmethod
    def row_norms(self, matrix: np.ndarray, keys: Sequence[Key]) -> np.ndarray: ...

    @abstractmethod
    def pairwise(self, matrix: np.ndarray, keys: Sequence[Key]) -> np.ndarray: ...

    @abstractmethod
    def to_spec(self) -> dict: ...


@dataclass(frozen=True)
class Lp(SpaceModel):
    p: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _check_p(self.p))

    def norm(self, v: Mapping[Key, float]) -> float:
        return _lp_of_values(list(v.values()), self.p)

    def row_norms(self, matrix: np.ndarray, keys: Sequence[Key]) -> np.ndarray:
        return _combine(matrix, self.p)

    def pairwise(self, matrix: np.ndarray, keys: Sequence[Key]) -> np.ndarray:
        return _pdist_lp(matrix, self.p)

    def to_spec(self) -> dict:
        return {"norm": "lp", "p": _p_to_json(self.p)}


@dataclass(frozen=True)
class Block:
    p: float
    keys: tuple[Key, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _check_p(self.p))
        object.__setattr__(self, "keys", tuple(self.keys))


@dataclass(frozen=True)
class NestedSum(SpaceModel):
    outer_p: float
    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "outer_p", _check_p(self.outer_p))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        seen: dict[Key, int] = {}
        for b, block in enumerate(self.blocks):
            for k in block.keys:
                if k in seen:
                    raise ConfigError(f"Chave {k!r} declarada nos blocos {seen[k]} e {b}.")
                seen[k] = b
        object.__setattr__(self, "_block_of", seen)

    def _block_index(self, key: Key) -> int:
        try:
            return self._block_of[key]  # type: ignore[attr-defined]
        except KeyError:
            raise ConfigError(f"Chave {key!r} fora dos blocos declarados.") from None

    def norm(self, v: Mapping[Key, float]) -> float:
        per_block: list[list[float]] = [[] for _ in self.blocks]
        for k, val in v.items():
            per_block[self._block_index(k)].append(val)
        inner = [_lp_of_values(vals, block.p) for vals, block in zip(per_block, self.blocks)]
        return _lp_of_values(inner, self.outer_p)

    def _columns(self, keys: Sequence[Key]) -> list[np.ndarray]:
        groups: list[list[int]] = [[] for _ in self.blocks]
        for j, k in enumerate(keys):
            groups[self._block_index(k)].append(j)
        return [np.asarray(g, dtype=np.intp) for g in groups]

    def row_norms(self, matrix: np.ndarray, keys: Sequence[Key]) -> np.ndarray:
        cols = [
            _combine(matrix[:, idx], block.p) if idx.size else np.zeros(matrix.shape[0])
            for idx, block in zip(self._columns(keys), self.blocks)
        ]
        return _combine(np.column_stack(cols), self.outer_p)

    def pairwise(self, matrix: np.ndarray, keys: Sequence[Key]) -> np.ndarray:
        n = matrix.shape[0]
        n_pairs = n * (n - 1) // 2
        cols = [
            _pdist_lp(matrix[:, idx], block.p) if idx.size else np.zeros(n_pairs)
            for idx, block in zip(self._columns(keys), self.blocks)
        ]
        return _combine(np.column_stack(cols), self.outer_p)

    def to_spec(self) -> dict:
        return {
            "norm": "nested",
            "outer_p": _p_to_json(self.outer_p),
            "blocks": [
                {"p": _p_to_json(b.p), "keys": [encode_key(k) for k in b.keys]} for b in self.blocks
            ],
        }


@dataclass(frozen=True, eq=False)
class EvalNorm(SpaceModel):
    functionals: tuple[LinearFunctional, ...]
    epsilon: float = 1e-6

    def __post_init__(self) -> None:
        object.__setattr__(self, "functionals", tuple(self.functionals))
        if self.epsilon < 0 or math.isnan(self.epsilon):
            raise ConfigError(f"ε inválido: {self.epsilon} (esperado ε ≥ 0).")
        if self.epsilon == 0 and not self.functionals:
            raise ConfigError("EvalNorm sem funcionais e com ε = 0 não é norma.")

    def norm(self, v: Mapping[Key, float]) -> float:
        best = max((abs(pair(f, v)) for f in self.functionals), default=0.0)
        top = max((abs(x) for x in v.values()), default=0.0)
        return best + self.epsilon * top

    def functional_matrix(self, keys: Sequence[Key]) -> np.ndarray:
        """Funcionais sobre o índice de chaves; guarda só os MATRIX_CACHE_SIZE índices mais recentes."""
        keys = tuple(keys)
        cache = self.__dict__.setdefault("_matrices", {})
        matrix = cache.pop(keys, None)
        if matrix is None:
            matrix = to_matrix(self.functionals, keys)
        cache[keys] = matrix
        while len(cache) > MATRIX_CACHE_SIZE:
            del cache[next(iter(cache))]
        return matrix

    def cached_key_sets(self) -> int:
        return len(self.__dict__.get("_matrices", {}))

    def row_norms(self, matrix: np.ndarray, keys: Sequence[Key]) -> np.ndarray:
        top = np.abs(matrix).max(axis=1) if matrix.shape[1] else np.zeros(matrix.shape[0])
        if not self.functionals:
            return self.epsilon * top
        values = matrix @ self.functional_matrix(keys).T
        return np.abs(values).max(axis=1) + self.epsilon * top

    def pairwise(self, matrix: np.ndarray, keys: Sequence[Key]) -> np.ndarray:
        out = self.epsilon * pdist(matrix, "chebyshev")
        if self.functionals:
            out = out + pdist(matrix @ self.functional_matrix(keys).T, "chebyshev")
        return out

    def to_spec(self) -> dict:
        return {
            "norm": "eval",
            "epsilon": self.epsilon,
            "functionals": [f.to_json() for f in self.functionals],
        }


def norm(v: Mapping[Key, float], space: SpaceModel) -> float:
    return space.norm(v)


def space_from_spec(spec: Mapping) -> SpaceModel:
    kind = spec.get("norm")
    if kind == "lp":
        return Lp(_p_from_json(spec["p"]))
    if kind == "nested":
        blocks = tuple(
            Block(_p_from_json(b["p"]), tuple(decode_key(k) for k in b["keys"])) for b in spec["blocks"]
        )
        return NestedSum(_p_from_json(spec["outer_p"]), blocks)
    if kind == "eval":
        functionals = tuple(LinearFunctional(Vector.from_json(f)) for f in spec.get("functionals", []))
        return EvalNorm(functionals, float(spec.get("epsilon", 1e-6)))
    raise ConfigError(f"Especificação de espaço desconhecida: {kind!r}.")
