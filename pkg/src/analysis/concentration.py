"""
Ferramentas de concentração em k-subconjuntos:

  hamming_metric(A, B)   |{j : A_j ≠ B_j}| entre k-subconjuntos ordenados
  james_sum(model, A)    h(A) = x_{n_1} + … + x_{n_k}
                           l1        x_n = e_n, alvo ℓ1, separação θ = 2
                           summing   x_n = Σ_{i≤n} e_i, alvo ℓ∞, separação θ = 1
  concentration_search   busca heurística (gulosa + reinícios) de um subalfabeto
                         M ⊂ {1..n}, |M| = 2k, com imagem de diâmetro pequeno,
                         comparada à cota 3(2C+1)k^{1/p}

A busca é explicitamente heurística: o enunciado quantifica sobre M infinito.
O diâmetro de M é estimado pelo par separado (primeiros k contra últimos k
elementos de M) mais pares aleatórios dentro do orçamento.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..common.errors import ConfigError
from ..common.log_util import log
from ..spaces.norms import Lp, SpaceModel
from ..spaces.vectors import Vector

QUEM = "Python"
ONDE = "analysis.concentration"

Subset = tuple[int, ...]

MODELS: dict[str, tuple[SpaceModel, float]] = {
    "l1": (Lp(1), 2.0),
    "summing": (Lp(math.inf), 1.0),
}


def _subset(values: Sequence[int]) -> Subset:
    out = tuple(int(v) for v in values)
    if any(v < 1 for v in out) or any(x >= y for x, y in zip(out, out[1:])):
        raise ConfigError(f"{list(values)} não é k-subconjunto ordenado de inteiros positivos.")
    return out


def hamming_metric(A: Sequence[int], B: Sequence[int]) -> int:
    A, B = _subset(A), _subset(B)
    if len(A) != len(B):
        raise ConfigError(f"Tamanhos diferentes: |A| = {len(A)}, |B| = {len(B)}.")
    return sum(1 for x, y in zip(A, B) if x != y)


def james_sum(model: str, A: Sequence[int]) -> Vector:
    if model not in MODELS:
        raise ConfigError(f"Modelo desconhecido: {model!r} (use {sorted(MODELS)}).")
    A = _subset(A)
    if model == "l1":
        return Vector({n: 1.0 for n in A})
    counts: dict[int, float] = {}
    for n in A:
        for i in range(1, n + 1):
            counts[i] = counts.get(i, 0.0) + 1.0
    return Vector(counts)


def model_space(model: str) -> SpaceModel:
    if model not in MODELS:
        raise ConfigError(f"Modelo desconhecido: {model!r} (use {sorted(MODELS)}).")
    return MODELS[model][0]


def kr_bound(k: int, C: float, p: float) -> float:
    """3(2C+1)k^{1/p}."""
    return 3 * (2 * C + 1) * (1.0 if math.isinf(p) else k ** (1.0 / p))


def kr_contradiction(theta: float, k: int, C: float, p: float) -> dict:
    """θk − 1 contra 3(2C+1)k^{1/p}: contradição quando o lado esquerdo excede."""
    lhs = theta * k - 1
    rhs = kr_bound(k, C, p)
    return {"theta": theta, "k": k, "C": C, "lhs": lhs, "rhs": rhs, "contradiction": lhs > rhs}


@dataclass
class ConcentrationResult:
    best_diameter: float
    best_subset: Subset
    kr_bound: float
    met: bool
    k: int
    n: int
    evaluations: int
    restarts: int
    seed: int
    heuristic: bool = True
    trace: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__, best_subset=list(self.best_subset))


class _Diameter:
    """Estimativa determinística do diâmetro da imagem de M^{[k]}."""

    def __init__(self, f: Callable[[Subset], Mapping], space: SpaceModel, k: int, pairs: int, seed: int):
        self.f = f
        self.space = space
        self.k = k
        self.pairs = pairs
        self.seed = seed
        self._images: dict[Subset, Vector] = {}
        self.evaluations = 0

    def image(self, A: Subset) -> Vector:
        if A not in self._images:
            self._images[A] = Vector(self.f(A))
        return self._images[A]

    def distance(self, A: Subset, B: Subset) -> float:
        self.evaluations += 1
        return self.space.norm(self.image(A) - self.image(B))

    def __call__(self, M: Subset) -> float:
        k = self.k
        best = self.distance(M[:k], M[-k:])
        rng = np.random.Generator(np.random.PCG64([self.seed, *M]))
        for _ in range(self.pairs):
            A = tuple(sorted(rng.choice(M, size=k, replace=False).tolist()))
            B = tuple(sorted(rng.choice(M, size=k, replace=False).tolist()))
            if A != B:
                best = max(best, self.distance(A, B))
        return best


def concentration_search(
    f: Callable[[Subset], Mapping],
    n: int,
    k: int,
    C: float,
    p: float,
    space: SpaceModel,
    budget: int = 2000,
    seed: int = 0,
    restarts: int = 3,
    pairs_per_eval: int = 8,
) -> ConcentrationResult:
    if k < 1 or n < 2 * k:
        raise ConfigError(f"Busca exige n ≥ 2k (n = {n}, k = {k}).")
    if budget < 1 or restarts < 1:
        raise ConfigError(f"Orçamento ({budget}) e reinícios ({restarts}) devem ser ≥ 1.")
    rng = np.random.Generator(np.random.PCG64(seed))
    diameter = _Diameter(f, space, k, pairs_per_eval, seed)
    alphabet = np.arange(1, n + 1)

    best_M: Subset = tuple(range(1, 2 * k + 1))
    best_d = math.inf
    trace: list[float] = []
    for r in range(restarts):
        M = tuple(sorted(rng.choice(alphabet, size=2 * k, replace=False).tolist()))
        current = diameter(M)
        improved = True
        while improved and diameter.evaluations < budget:
            improved = False
            outside = [x for x in alphabet.tolist() if x not in M]
            for pos in rng.permutation(2 * k).tolist():
                if not outside or diameter.evaluations >= budget:
                    break
                candidate = list(M)
                candidate[pos] = outside[int(rng.integers(len(outside)))]
                cand = tuple(sorted(candidate))
                value = diameter(cand)
                if value < current:
                    M, current, improved = cand, value, True
                    break
        trace.append(current)
        if current < best_d:
            best_M, best_d = M, current
        print(f"  [{r + 1}/{restarts}] diâmetro {current:.6g}", flush=True)

    bound = kr_bound(k, C, p)
    log(QUEM, ONDE, f"Concluído: k={k}, n={n}, melhor diâmetro {best_d:.6g} (cota {bound:.6g}).")
    return ConcentrationResult(
        best_diameter=float(best_d),
        best_subset=best_M,
        kr_bound=bound,
        met=best_d <= bound,
        k=k,
        n=n,
        evaluations=diameter.evaluations,
        restarts=restarts,
        seed=seed,
        trace=trace,
    )
