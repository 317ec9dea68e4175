"""
Distorção de mapas finitos: lip = max d_Y/d_X, colip_inverse = max d_X/d_Y,
distortion = lip · colip_inverse.

Varredura exaustiva (scipy pdist, vetor condensado) quando o número de pares
cabe no orçamento (HYPERTREE_PAIR_BUDGET, padrão 10^7); acima disso, amostra
uniforme de pares com PCG64 e semente registrada no relatório.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np
from scipy.spatial.distance import squareform

from ..common import config
from ..common.errors import ConfigError, InvariantViolation
from ..embeddings.maps import EmbeddingMap
from ..spaces.norms import SpaceModel
from ..spaces.vectors import Key
from ..trees.core import distance_matrix, node_to_str, rho

TOLERANCE = 1e-9


@dataclass(frozen=True)
class PairWitness:
    left: str
    right: str
    domain: float
    image: float
    ratio: float


@dataclass(frozen=True)
class DistortionReport:
    lip: float
    colip_inverse: float
    distortion: float
    lip_witness: PairWitness
    colip_witness: PairWitness
    pair_count: int
    mode: str
    seed: int | None
    tolerance: float = TOLERANCE

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _budget(budget: int | None) -> int:
    value = config.pair_budget() if budget is None else budget
    if int(value) != value or value < 1:
        raise ConfigError(f"Orçamento de pares inválido: {value} (esperado inteiro ≥ 1).")
    return int(value)


def _condensed_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _sample_pairs(n: int, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    i = rng.integers(0, n, size=count)
    j = rng.integers(0, n - 1, size=count)
    j = np.where(j >= i, j + 1, j)
    return np.minimum(i, j), np.maximum(i, j)


def _report(
    labels: Sequence[str],
    left: np.ndarray,
    right: np.ndarray,
    dom: np.ndarray,
    img: np.ndarray,
    mode: str,
    seed: int | None,
) -> DistortionReport:
    if (dom <= 0).any():
        raise ConfigError("Métrica do domínio com distância nula entre pontos distintos.")
    zero = np.flatnonzero(img <= 0)
    if zero.size:
        a, b = labels[left[zero[0]]], labels[right[zero[0]]]
        raise InvariantViolation(f"Mapa não injetivo: {a!r} e {b!r} têm a mesma imagem.")
    up = img / dom
    down = dom / img
    iu, idn = int(np.argmax(up)), int(np.argmax(down))

    def _witness(k: int, ratio: float) -> PairWitness:
        return PairWitness(labels[left[k]], labels[right[k]], float(dom[k]), float(img[k]), float(ratio))

    lip, colip = float(up[iu]), float(down[idn])
    return DistortionReport(
        lip=lip,
        colip_inverse=colip,
        distortion=lip * colip,
        lip_witness=_witness(iu, up[iu]),
        colip_witness=_witness(idn, down[idn]),
        pair_count=int(dom.size),
        mode=mode,
        seed=seed,
    )


def distortion_of_points(
    distances: np.ndarray,
    positions: np.ndarray,
    space: SpaceModel,
    keys: Sequence[Key] | None = None,
    labels: Sequence[str] | None = None,
    budget: int | None = None,
    seed: int = 0,
) -> DistortionReport:
    """Distorção de um mapa explícito: matriz de distâncias do domínio e linhas de imagem."""
    distances = np.asarray(distances, dtype=np.float64)
    positions = np.asarray(positions, dtype=np.float64)
    n = distances.shape[0]
    if n < 2:
        raise ConfigError("Distorção exige pelo menos 2 pontos.")
    if distances.shape != (n, n) or positions.shape[0] != n:
        raise ConfigError(f"Formas incompatíveis: distâncias {distances.shape}, posições {positions.shape}.")
    keys = list(range(positions.shape[1])) if keys is None else list(keys)
    labels = [str(i) for i in range(n)] if labels is None else list(labels)
    total = n * (n - 1) // 2
    if total <= _budget(budget):
        left, right = _condensed_pairs(n)
        dom = squareform(distances, checks=False)
        img = space.pairwise(positions, keys)
        return _report(labels, left, right, dom, img, "exhaustive", None)
    rng = np.random.Generator(np.random.PCG64(seed))
    left, right = _sample_pairs(n, _budget(budget), rng)
    dom = distances[left, right]
    img = space.row_norms(positions[left] - positions[right], keys)
    return _report(labels, left, right, dom, img, "sampled", seed)


def distortion(embedding: EmbeddingMap, budget: int | None = None, seed: int = 0) -> DistortionReport:
    """Distorção do mapa em relação a ρ sobre os nós do mapa."""
    nodes = embedding.nodes
    n = len(nodes)
    if n < 2:
        raise ConfigError("Distorção exige pelo menos 2 pontos.")
    labels = [node_to_str(s) for s in nodes]
    total = n * (n - 1) // 2
    if total <= _budget(budget):
        left, right = _condensed_pairs(n)
        dom = squareform(distance_matrix(nodes), checks=False).astype(np.float64)
        img = embedding.target.pairwise(embedding.matrix, embedding.keys)
        return _report(labels, left, right, dom, img, "exhaustive", None)
    rng = np.random.Generator(np.random.PCG64(seed))
    left, right = _sample_pairs(n, _budget(budget), rng)
    dom = np.array([rho(nodes[i], nodes[j]) for i, j in zip(left, right)], dtype=np.float64)
    img = embedding.target.row_norms(embedding.matrix[left] - embedding.matrix[right], embedding.keys)
    return _report(labels, left, right, dom, img, "sampled", seed)
