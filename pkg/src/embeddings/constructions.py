"""
Construções sobre sistemas quase biortogonais:

  embed_l1          F(s) = Σ_{∅<t≤s} x_t                    (alvo ℓ1, raiz fixada)
  embed_dual        G(s) = Σ_{t≤s} y*_t, y*_t = Σ_{u≤t} x*_u   (alvo ℓ∞)
  embed_glued       F(s) = λ_s F_k(s) + (1−λ_s) F_{k+1}(s), 2^k ≤ |s| < 2^{k+1},
                    λ_s = (2^{k+1} − |s|)/2^k, F_i(s) = Σ_{∅<t≤s} x_{i+1,t}
  embed_glued_dual  o mesmo com G_i(s) = Σ_{∅<t≤s} y*_{i+1,t}

As funções *_witness reavaliam o funcional que certifica a cota inferior de
cada par e devolvem o valor obtido junto com o mínimo exigido.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..common.errors import ConfigError
from ..spaces.norms import Lp
from ..spaces.vectors import Vector, pair
from ..systems.biorth import BiorthSystem
from ..systems.leveled import GLUING, LeveledSystems, required_levels
from ..trees.core import ROOT, HyperbolicTree, Node, enumerate_nodes, gca, rho
from .maps import EmbeddingMap

# (Lipschitz, inverso da constante co-Lipschitz) por construção
CONSTRUCTION_BOUNDS: dict[str, tuple[float, float]] = {
    "l1": (1.0, 24.0),
    "dual": (3.0, 8.0),
    "glued": (9.0, 96.0),
    "glued_dual": (27.0, 16.0),
    "segmented": (3.0, 2000.0),
}


@dataclass(frozen=True)
class Witness:
    name: str
    value: float
    required: float

    @property
    def ok(self) -> bool:
        return self.value >= self.required


def _system_provenance(system: BiorthSystem) -> dict:
    return {"tree": system.tree.to_spec(), "delta": system.delta, "seed": system.seed}


def _levels_provenance(levels: LeveledSystems) -> dict:
    return {
        "kind": levels.kind,
        "schedule": list(levels.schedule),
        "seed": levels.seed,
        "branching": levels.branching,
        "K": levels.K,
    }


def embed_l1(system: BiorthSystem) -> EmbeddingMap:
    strict = system.ancestors.copy()
    strict[:, system.index(ROOT)] = 0.0
    return EmbeddingMap(
        nodes=system.nodes,
        keys=system.keys,
        matrix=strict @ system.vectors,
        target=Lp(1),
        provenance={"construction": "l1", "system": _system_provenance(system)},
        pinned=True,
    )


def embed_dual(system: BiorthSystem) -> EmbeddingMap:
    return EmbeddingMap(
        nodes=system.nodes,
        keys=system.keys,
        matrix=system.ancestors @ system.path_functional_matrix(),
        target=Lp(math.inf),
        provenance={"construction": "dual", "system": _system_provenance(system)},
        pinned=False,
    )


def gluing_window(length: int) -> int:
    """k com 2^k ≤ |s| < 2^{k+1}."""
    if length < 1:
        raise ConfigError("A raiz não pertence a nenhuma janela de colagem.")
    return length.bit_length() - 1


def gluing_weight(length: int) -> float:
    """λ_s = (2^{k+1} − |s|)/2^k."""
    k = gluing_window(length)
    return (2 ** (k + 1) - length) / 2**k


def _check_gluing(levels: LeveledSystems, depth: int) -> HyperbolicTree:
    if levels.kind != GLUING:
        raise ConfigError(f"Colagem exige família do tipo gluing (recebido {levels.kind!r}).")
    needed = required_levels(depth)
    if needed > levels.max_level:
        raise ConfigError(
            f"Profundidade {depth} exige níveis até {needed}; a família tem níveis até {levels.max_level}."
        )
    for i in range(1, needed + 1):
        if levels.trees[i].depth < min(2**i, depth):
            raise ConfigError(f"Nível {i} com profundidade {levels.trees[i].depth} < {min(2**i, depth)}.")
    return HyperbolicTree(depth=depth, branching=levels.branching)


def _strict_path_rows(levels: LeveledSystems, level: int, s: Node, rows: np.ndarray) -> np.ndarray:
    """Σ_{∅<t≤s} rows[(level, t)]."""
    idx = [levels.index(level, s[:h]) for h in range(1, len(s) + 1)]
    return rows[idx].sum(axis=0)


def _glued(levels: LeveledSystems, depth: int, rows: np.ndarray, name: str, target) -> EmbeddingMap:
    tree = _check_gluing(levels, depth)
    nodes = tuple(enumerate_nodes(tree))
    matrix = np.zeros((len(nodes), len(levels.keys)))
    for r, s in enumerate(nodes):
        if not s:
            continue
        k = gluing_window(len(s))
        lam = gluing_weight(len(s))
        matrix[r] = lam * _strict_path_rows(levels, k + 1, s, rows)
        if lam < 1:
            matrix[r] += (1 - lam) * _strict_path_rows(levels, k + 2, s, rows)
    return EmbeddingMap(
        nodes=nodes,
        keys=levels.keys,
        matrix=matrix,
        target=target,
        provenance={"construction": name, "depth": depth, "levels": _levels_provenance(levels)},
        pinned=True,
    )


def embed_glued(levels: LeveledSystems, depth: int) -> EmbeddingMap:
    return _glued(levels, depth, levels.vectors, "glued", Lp(1))


def embed_glued_dual(levels: LeveledSystems, depth: int) -> EmbeddingMap:
    return _glued(levels, depth, levels.path_functional_matrix(), "glued_dual", Lp(math.inf))


def _ordered(s: Node, s_prime: Node) -> tuple[Node, Node]:
    if s == s_prime:
        raise ConfigError(f"Par degenerado: {s} = {s_prime}.")
    return (s, s_prime) if len(s) >= len(s_prime) else (s_prime, s)


def classify_glued_pair(s: Node, s_prime: Node) -> str:
    s, s_prime = _ordered(s, s_prime)
    if not s_prime:
        return "root"
    gap = gluing_window(len(s)) - gluing_window(len(s_prime))
    if gap == 0:
        return "same-window"
    return "adjacent" if gap == 1 else "far"


def l1_witness(system: BiorthSystem, embedding: EmbeddingMap, s: Node, s_prime: Node) -> Witness:
    """⟨Σ_{t≤s} x*_t, F(s) − F(s′)⟩ ≥ ρ/8, com |s| ≥ |s′|."""
    s, s_prime = _ordered(s, s_prime)
    diff = embedding.evaluate(s) - embedding.evaluate(s_prime)
    return Witness("l1", pair(system.path_functional(s), diff), rho(s, s_prime) / 8)


def dual_witness(system: BiorthSystem, embedding: EmbeddingMap, s: Node, s_prime: Node) -> Witness:
    """⟨x_v, G(s) − G(s′)⟩ ≥ ρ/8, v o sucessor de gca(s, s′) rumo a s."""
    s, s_prime = _ordered(s, s_prime)
    v = s[: len(gca(s, s_prime)) + 1]
    diff = embedding.evaluate(s) - embedding.evaluate(s_prime)
    return Witness("dual", pair(system.vector(v), diff), rho(s, s_prime) / 8)


def glued_witness(levels: LeveledSystems, embedding: EmbeddingMap, s: Node, s_prime: Node) -> Witness:
    """⟨Σ_{u<t≤s} (x*_{l+1,t} + x*_{l+2,t}), F(s) − F(s′)⟩ ≥ d/4, d = ρ(u, s)."""
    s, s_prime = _ordered(s, s_prime)
    u = gca(s, s_prime)
    l = gluing_window(len(s))
    functional = Vector()
    for h in range(len(u) + 1, len(s) + 1):
        functional = functional + levels.functional(l + 1, s[:h]) + levels.functional(l + 2, s[:h])
    diff = embedding.evaluate(s) - embedding.evaluate(s_prime)
    return Witness("glued", pair(functional, diff), (len(s) - len(u)) / 4)


def glued_dual_witness(levels: LeveledSystems, embedding: EmbeddingMap, s: Node, s_prime: Node) -> Witness:
    """⟨x_{l+1,v} + x_{l+2,v}, G(s) − G(s′)⟩ ≥ ρ/8."""
    s, s_prime = _ordered(s, s_prime)
    v = s[: len(gca(s, s_prime)) + 1]
    l = gluing_window(len(s))
    vector = levels.vector(l + 1, v) + levels.vector(l + 2, v)
    diff = embedding.evaluate(s) - embedding.evaluate(s_prime)
    return Witness("glued_dual", pair(vector, diff), rho(s, s_prime) / 8)
