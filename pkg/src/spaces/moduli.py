"""
Estimativas numéricas dos módulos assintóticos em dimensão finita d.

O ínfimo sobre subespaços de codimensão finita é substituído pelo subespaço
de cauda Y = span das últimas ⌈d/2⌉ coordenadas; x percorre a esfera unitária
das coordenadas iniciais (amostra com semente + vetores canônicos).

  AUS  ρ̄(τ) ≈ sup_x sup_{y ∈ S_Y} ‖x + τy‖ − 1
  AUC  δ̄(τ) ≈ inf_x inf_{y ∈ S_Y} ‖x + τy‖ − 1

Para ℓp ambos coincidem com (1 + τ^p)^{1/p} − 1.
"""

from __future__ import annotations

import math

import numpy as np

from ..common.errors import ConfigError
from .norms import SpaceModel

MIN_DIMENSION = 4
MAX_TAU = 10.0


def lp_modulus_closed_form(p: float, tau: float) -> float:
    if math.isinf(p):
        return max(1.0, tau) - 1.0
    return (1.0 + tau**p) ** (1.0 / p) - 1.0


def _check(d: int, tau: float) -> None:
    if d < MIN_DIMENSION:
        raise ConfigError(f"Dimensão {d} pequena demais para a aproximação por cauda (d ≥ {MIN_DIMENSION}).")
    if not (0 < tau <= MAX_TAU):
        raise ConfigError(f"τ = {tau} fora de (0, {MAX_TAU}].")


def _unit_rows(space: SpaceModel, block: np.ndarray, keys: list[int]) -> np.ndarray:
    norms = space.row_norms(block, keys)
    return block / norms[:, None]


def _samples(space: SpaceModel, d: int, lo: int, hi: int, count: int, rng: np.random.Generator) -> np.ndarray:
    width = hi - lo
    rows = [np.eye(width), np.ones((1, width)), rng.standard_normal((count, width))]
    block = np.zeros((sum(r.shape[0] for r in rows), d))
    block[:, lo:hi] = np.vstack(rows)
    return _unit_rows(space, block, list(range(d)))


def _ratios(space: SpaceModel, d: int, tau: float, samples: int, seed: int) -> np.ndarray:
    _check(d, tau)
    rng = np.random.Generator(np.random.PCG64(seed))
    tail = math.ceil(d / 2)
    head = d - tail
    xs = _samples(space, d, 0, head, samples, rng)
    ys = _samples(space, d, head, d, samples, rng)
    keys = list(range(d))
    # linha i, coluna j: ‖x_i + τ y_j‖
    out = np.empty((xs.shape[0], ys.shape[0]))
    for i, x in enumerate(xs):
        out[i] = space.row_norms(x[None, :] + tau * ys, keys)
    return out


def aus_modulus_estimate(space: SpaceModel, d: int, tau: float, samples: int = 32, seed: int = 0) -> float:
    return float(_ratios(space, d, tau, samples, seed).max() - 1.0)


def auc_modulus_estimate(space: SpaceModel, d: int, tau: float, samples: int = 32, seed: int = 0) -> float:
    return float(_ratios(space, d, tau, samples, seed).min() - 1.0)
