"""
Construção segmentada (K ≥ 2) sobre uma família por níveis do tipo segmented.

Para s = s_0⌢…⌢s_n (|s_j| = K^j para j < n, 1 ≤ |s_n| ≤ K^n):

  G(∅) = 0
  G(s) = y_{(0,s_0)} + Σ_{j=1..n} Σ_{(r_{j−1}) ≤ t ≤ (r_{j−1})⌢s_j} y_{(j,t)}

r_j é o índice (a partir de 1) do ramo de T^b_{N_j} que termina em s_0⌢…⌢s_j.
Cada y_{(i,t)} é a soma de caminho y**_{(i,t)} = Σ_{u≤t} x*_{(i,u)} (raiz do
nível incluída) somada a uma perturbação com semente: chaves protegidas pela
enumeração de ramos recebem entradas de módulo < η_i/4, as demais < η_i. Depois
cada y é limitado a norma 3 no espaço alvo.

Chaves protegidas de y_{(i,t)}: no nível i, os nós cujo primeiro ramo vem até o
primeiro ramo que contém t; em cada nível j < i, os nós cujo primeiro ramo vem
até o ramo (r_{j−1})⌢s_j do prefixo codificado por t(1).

Alvo: EvalNorm com os vetores x_{(i,s)} da família como funcionais avaliadores.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..common.errors import CapacityExhausted, ConfigError
from ..common.log_util import log
from ..spaces.norms import EvalNorm
from ..spaces.vectors import Key, LinearFunctional, from_row, pair
from ..systems.biorth import _SHRINK
from ..systems.leveled import SEGMENTED, LeveledSystems, segment_levels
from ..trees.core import (
    HyperbolicTree,
    Node,
    branch_index,
    enumerate_nodes,
    first_branch_index,
    gca,
    partial_sums,
    segment_decompose,
)
from .cases import classify_segmented_pair
from .constructions import Witness
from .maps import EmbeddingMap

QUEM = "Python"
ONDE = "embeddings.segmented"

MAX_NORM = 3.0


def prefix_branch(s: Node, b: int) -> int:
    """Índice (a partir de 1) do ramo de T^b_{|s|} que termina em s."""
    index = 0
    for x in s:
        index = index * b + (x - 1)
    return index + 1


def branch_terminal(r: int, depth: int, b: int) -> Node:
    """Inverso de prefix_branch: nó terminal do r-ésimo ramo de T^b_depth."""
    if r < 1 or r > b**depth:
        raise ConfigError(f"Ramo {r} fora de T^{b}_{depth}.")
    digits = []
    rest = r - 1
    for _ in range(depth):
        rest, d = divmod(rest, b)
        digits.append(d + 1)
    return tuple(reversed(digits))


def segment_keys(s: Node, K: int, b: int) -> list[Key]:
    """Chaves (nível, nó) cujos y compõem G(s)."""
    if not s:
        return []
    segments = segment_decompose(s, K)
    keys: list[Key] = [(0, segments[0])]
    consumed = len(segments[0])
    for j in range(1, len(segments)):
        r = prefix_branch(s[:consumed], b)
        seg = segments[j]
        keys.extend((j, (r,) + seg[:h]) for h in range(len(seg) + 1))
        consumed += len(seg)
    return keys


def _check_levels(levels: LeveledSystems, depth: int) -> tuple[int, int]:
    if levels.kind != SEGMENTED or levels.K is None:
        raise ConfigError(f"Construção segmentada exige família segmented (recebido {levels.kind!r}).")
    K, b = levels.K, levels.branching
    n = segment_levels(depth, K)
    if n > levels.max_level:
        raise ConfigError(f"Profundidade {depth} exige níveis até {n}; a família tem níveis até {levels.max_level}.")
    sums = partial_sums(K, n)
    for j in range(1, n + 1):
        tree = levels.trees[j]
        needed = b ** sums[j - 1]
        if (tree.root_branching or tree.branching) < needed:
            raise CapacityExhausted(f"Nível {j}: raiz com {tree.root_branching} sucessores, são necessários {needed}.")
        if tree.depth < min(K**j, depth - sums[j - 1]) + 1:
            raise ConfigError(f"Nível {j} com profundidade {tree.depth} insuficiente para a profundidade {depth}.")
    return K, b


def _thresholds(levels: LeveledSystems, i: int, t: Node, fbi: dict[Key, int]) -> np.ndarray:
    """Maior primeiro-ramo protegido por nível (−1 = nenhum) para y_{(i,t)}."""
    K, b = levels.K, levels.branching
    thr = np.full(levels.max_level + 1, -1, dtype=np.int64)
    thr[i] = fbi[(i, t)]
    if i == 0:
        return thr
    prefix = branch_terminal(t[0], partial_sums(K, i - 1)[-1], b)
    consumed = 0
    for j, seg in enumerate(segment_decompose(prefix, K)):
        if j == 0:
            thr[0] = branch_index(levels.trees[0], seg)
        else:
            r = prefix_branch(prefix[:consumed], b)
            thr[j] = branch_index(levels.trees[j], (r,) + seg)
        consumed += len(seg)
    return thr


def protection_mask(levels: LeveledSystems) -> np.ndarray:
    """mask[r, c]: a chave c está protegida na perturbação de y na linha r."""
    keys = levels.keys
    fbi = {k: first_branch_index(levels.trees[k[0]], k[1]) for k in keys}
    lvl = np.array([k[0] for k in keys], dtype=np.int64)
    col_fbi = np.array([fbi[k] for k in keys], dtype=np.int64)
    mask = np.zeros((len(keys), len(keys)), dtype=bool)
    for r, (i, t) in enumerate(keys):
        if not t:
            continue
        thr = _thresholds(levels, i, t, fbi)
        mask[r] = col_fbi <= thr[lvl]
    return mask


def _seed(levels: LeveledSystems, seed: int | None) -> int:
    if seed is not None:
        return seed
    return levels.seed if levels.seed is not None else 0


def segmented_target(levels: LeveledSystems, epsilon: float = 1e-6) -> EvalNorm:
    functionals = tuple(LinearFunctional(from_row(row, levels.keys), bound=1.0) for row in levels.vectors)
    return EvalNorm(functionals, epsilon)


def segmented_vectors(
    levels: LeveledSystems,
    eta: Sequence[float] | float | None = None,
    seed: int | None = None,
    target: EvalNorm | None = None,
) -> np.ndarray:
    """Linhas y_{(i,t)} sobre levels.keys (linhas de raiz de nível ficam nulas)."""
    n_levels = levels.max_level + 1
    if eta is None:
        eta_arr = np.array(levels.schedule, dtype=np.float64)
    elif np.isscalar(eta):
        eta_arr = np.full(n_levels, float(eta))  # type: ignore[arg-type]
    else:
        eta_arr = np.array(list(eta)[:n_levels], dtype=np.float64)
    if eta_arr.size < n_levels or (eta_arr < 0).any():
        raise ConfigError(f"Cronograma η inválido: {eta_arr.tolist()} para {n_levels} níveis.")

    keys = levels.keys
    y = levels.path_functional_matrix().copy()
    non_root = np.array([len(t) > 0 for _, t in keys])
    y[~non_root] = 0.0
    if eta_arr.any():
        rng = np.random.Generator(np.random.PCG64(_seed(levels, seed)))
        row_eta = eta_arr[[i for i, _ in keys]]
        scale = np.where(protection_mask(levels), row_eta[:, None] / 4, row_eta[:, None])
        noise = rng.uniform(-_SHRINK, _SHRINK, size=y.shape) * scale
        y[non_root] += noise[non_root]
    target = target or segmented_target(levels)
    norms = target.row_norms(y, keys)
    over = norms > MAX_NORM
    y[over] *= (MAX_NORM / norms[over])[:, None]
    return y


def embed_segmented(
    levels: LeveledSystems,
    depth: int,
    eta: Sequence[float] | float | None = None,
    seed: int | None = None,
    epsilon: float = 1e-6,
) -> EmbeddingMap:
    K, b = _check_levels(levels, depth)
    target = segmented_target(levels, epsilon)
    y = segmented_vectors(levels, eta, seed, target)
    nodes = tuple(enumerate_nodes(HyperbolicTree(depth=depth, branching=b)))
    matrix = np.zeros((len(nodes), len(levels.keys)))
    for r, s in enumerate(nodes):
        idx = [levels.index(i, t) for i, t in segment_keys(s, K, b)]
        if idx:
            matrix[r] = y[idx].sum(axis=0)
    eta_spec = None if eta is None else (float(eta) if np.isscalar(eta) else [float(e) for e in eta])  # type: ignore[arg-type]
    log(QUEM, ONDE, f"Concluído: mapa segmentado D={depth}, K={K}, b={b}, {len(nodes)} nós.")
    return EmbeddingMap(
        nodes=nodes,
        keys=levels.keys,
        matrix=matrix,
        target=target,
        provenance={
            "construction": "segmented",
            "depth": depth,
            "K": K,
            "eta": eta_spec,
            "seed": _seed(levels, seed),
            "epsilon": epsilon,
            "levels": {"kind": levels.kind, "schedule": list(levels.schedule), "seed": levels.seed, "branching": b},
        },
        pinned=True,
    )


def _segment_node(s: Node, upto: int, level: int, K: int, b: int) -> Node:
    """Nó do nível `level` para o prefixo s[:upto] dentro do segmento `level`."""
    start = partial_sums(K, level - 1)[-1] if level > 0 else 0
    seg = s[start:upto]
    if level == 0:
        return seg
    return (prefix_branch(s[:start], b),) + seg


def segmented_witness(levels: LeveledSystems, embedding: EmbeddingMap, s: Node, s_prime: Node) -> Witness | None:
    """Funcional certificador para pares comparáveis do caso d e para o caso b.

    Caso b: x* = x_{(n,(r_{n−1}))}, y* e z* nos sucessores v, w de u no nível n−1.
    Se v vem antes de w na enumeração de ramos (ou s′ = u): ⟨x* + 25y*, ·⟩ ≥ (d+d′)/8.
    Senão: ⟨x* + 25y* − 301z*, ·⟩ ≥ (d+d′)/4 (z* pareia negativamente com o lado de s′).
    Demais casos: None.
    """
    K, b = levels.K, levels.branching
    if len(s) < len(s_prime):
        s, s_prime = s_prime, s
    case = classify_segmented_pair(s, s_prime, K)
    u = gca(s, s_prime)
    d, d_prime = len(s) - len(u), len(s_prime) - len(u)
    diff = embedding.evaluate(s) - embedding.evaluate(s_prime)

    if case.label == "d" and case.comparable:
        x_v = levels.vector(case.n, _segment_node(s, len(u) + 1, case.n, K, b))
        return Witness("segmented-d", pair(x_v, diff), d / 4)

    if case.label != "b":
        return None
    n = case.n
    start_n = partial_sums(K, n - 1)[-1]
    functional = levels.vector(n, (prefix_branch(s[:start_n], b),))
    seg_end = start_n
    v_node = _segment_node(s, len(u) + 1, n - 1, K, b) if len(u) < seg_end else None
    w_node = _segment_node(s_prime, len(u) + 1, n - 1, K, b) if d_prime > 0 else None
    if v_node is not None:
        functional = functional + 25 * levels.vector(n - 1, v_node)
    if w_node is None or (v_node is not None and v_node[-1] < w_node[-1]):
        return Witness("segmented-b1", pair(functional, diff), (d + d_prime) / 8)
    functional = functional - 301 * levels.vector(n - 1, w_node)
    return Witness("segmented-b2", pair(functional, diff), (d + d_prime) / 4)
