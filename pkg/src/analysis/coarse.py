"""
Módulos grosseiros de um mapa finito:

  ω_f(t) = sup { d_Y(f(x), f(y)) : d_X(x, y) ≤ t }
  L_θ(f) = sup_{t ≥ θ, t na grade} ω_f(t)/t
  L_∞    ≈ min_θ L_θ sobre a grade de θ

O ínfimo verdadeiro de L_∞ é sobre todo θ; o relatório sempre marca essa
ressalva (caveat) em vez de afirmar o limite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.spatial.distance import squareform

from ..common.errors import ConfigError
from ..embeddings.maps import EmbeddingMap
from ..spaces.norms import SpaceModel
from ..trees.core import distance_matrix


@dataclass(frozen=True)
class CoarseModuli:
    omega: pd.DataFrame
    lipschitz: pd.DataFrame
    l_infinity: float
    caveat: str = "L_∞ estimado como mínimo sobre a grade de θ; o ínfimo verdadeiro é sobre todo θ."

    def to_dict(self) -> dict:
        return {
            "omega": self.omega.to_dict(orient="records"),
            "lipschitz": self.lipschitz.to_dict(orient="records"),
            "l_infinity": self.l_infinity,
            "caveat": self.caveat,
        }


def _grid(values: Sequence[float], name: str) -> np.ndarray:
    grid = np.asarray(sorted(float(v) for v in values), dtype=np.float64)
    if grid.size == 0:
        raise ConfigError(f"Grade {name} vazia.")
    if (grid <= 0).any() or not np.isfinite(grid).all():
        raise ConfigError(f"Grade {name} deve conter valores finitos > 0: {grid.tolist()}.")
    return grid


def moduli_from_pairs(
    dom: np.ndarray, img: np.ndarray, t_grid: Sequence[float], theta_grid: Sequence[float]
) -> CoarseModuli:
    ts = _grid(t_grid, "t")
    thetas = _grid(theta_grid, "θ")
    order = np.argsort(dom, kind="stable")
    dom_sorted = dom[order]
    running = np.maximum.accumulate(img[order]) if img.size else img
    pos = np.searchsorted(dom_sorted, ts, side="right")
    omega = np.where(pos > 0, running[np.maximum(pos - 1, 0)] if running.size else 0.0, 0.0)

    ratio = omega / ts
    # sup sobre t ≥ θ: máximo de sufixo na grade ordenada
    suffix = np.maximum.accumulate(ratio[::-1])[::-1]
    start = np.searchsorted(ts, thetas, side="left")
    lip = np.where(start < ts.size, suffix[np.minimum(start, ts.size - 1)], 0.0)

    return CoarseModuli(
        omega=pd.DataFrame({"t": ts, "omega": omega}),
        lipschitz=pd.DataFrame({"theta": thetas, "L_theta": lip}),
        l_infinity=float(lip.min()),
    )


def coarse_moduli(embedding: EmbeddingMap, t_grid: Sequence[float], theta_grid: Sequence[float]) -> CoarseModuli:
    dom = squareform(distance_matrix(embedding.nodes), checks=False).astype(np.float64)
    img = embedding.target.pairwise(embedding.matrix, embedding.keys)
    return moduli_from_pairs(dom, img, t_grid, theta_grid)


def coarse_moduli_of_points(
    distances: np.ndarray,
    positions: np.ndarray,
    space: SpaceModel,
    t_grid: Sequence[float],
    theta_grid: Sequence[float],
) -> CoarseModuli:
    distances = np.asarray(distances, dtype=np.float64)
    positions = np.asarray(positions, dtype=np.float64)
    dom = squareform(distances, checks=False)
    img = space.pairwise(positions, list(range(positions.shape[1])))
    return moduli_from_pairs(dom, img, t_grid, theta_grid)
