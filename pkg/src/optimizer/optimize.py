"""
Minimização numérica da distorção de um espaço métrico finito em ℓp^d.

Objetivo suavizado sobre as razões logarítmicas r_ij = log ‖x_i − x_j‖_p − log d_ij:

  J_β(x) = (LSE(β r) + LSE(−β r)) / β  ≥  log lip + log colip_inverse

invariante por escala. A temperatura cresce como β_t = β₀(1 + t/τ); os passos
são normalizados (fração η_t da escala da configuração, η decaindo
geometricamente de step_start a step_end). A cada iteração a configuração é
recentrada e reescalada em forma fechada (lip = colip_inverse), e a distorção
exata é reavaliada: o resultado é a melhor iterada exata, nunca pior que a
inicial.

Subgradientes: p = 1 por sinal; p = ∞ pela coordenada de maior módulo
(empates: menor índice).

Reinícios em ThreadPoolExecutor (limitado por threads), reinício r com semente
seed + r; o reinício 0 parte da imagem de embed_l1 projetada em d coordenadas
quando o domínio é uma árvore. Escolha final pela ordem (distorção, semente).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.special import logsumexp, softmax

from ..analysis.distortion import DistortionReport, distortion_of_points
from ..common.errors import ConfigError
from ..common.log_util import log
from ..embeddings.constructions import embed_l1
from ..spaces.norms import Lp
from ..systems.biorth import canonical_system
from ..trees.core import HyperbolicTree, distance_matrix, enumerate_nodes, node_to_str

QUEM = "Python"
ONDE = "optimizer.optimize"

METRIC_TOLERANCE = 1e-9
_TINY = 1e-300


@dataclass(frozen=True)
class OptimizerConfig:
    iterations: int = 1000
    restarts: int = 4
    beta0: float = 8.0
    tau: float = 200.0
    step_start: float = 0.05
    step_end: float = 1e-5
    seed: int = 0
    tolerance: float = 1e-9
    threads: int = 1

    def __post_init__(self) -> None:
        if self.iterations < 0 or self.restarts < 1 or self.threads < 1:
            raise ConfigError(
                f"Configuração inválida: iterations={self.iterations}, restarts={self.restarts}, threads={self.threads}."
            )
        if self.beta0 <= 0 or self.tau <= 0:
            raise ConfigError(f"Temperatura inválida: beta0={self.beta0}, tau={self.tau}.")
        if not (0 < self.step_end <= self.step_start):
            raise ConfigError(f"Passos inválidos: step_start={self.step_start}, step_end={self.step_end}.")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MetricSpace:
    labels: tuple[str, ...]
    distances: np.ndarray
    tree: HyperbolicTree | None = None


@dataclass(eq=False)
class OptimizationRun:
    space: MetricSpace
    p: float
    d: int
    positions: np.ndarray
    trace: pd.DataFrame
    report: DistortionReport
    config: OptimizerConfig
    restart: int
    seed: int
    restarts: list[dict] = field(default_factory=list)

    @property
    def distortion(self) -> float:
        return self.report.distortion

    def positions_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.positions, columns=[f"x{k}" for k in range(self.d)])
        frame.insert(0, "point", list(self.space.labels))
        return frame

    def to_dict(self) -> dict:
        return {
            "p": "inf" if math.isinf(self.p) else self.p,
            "d": self.d,
            "points": len(self.space.labels),
            "distortion": self.report.distortion,
            "upper_bound_only": True,
            "report": self.report.to_dict(),
            "restart": self.restart,
            "seed": self.seed,
            "restarts": self.restarts,
            "config": self.config.to_dict(),
        }


def check_metric(distances: np.ndarray, tolerance: float = METRIC_TOLERANCE) -> None:
    """Tabela de distâncias: quadrada, simétrica, diagonal nula, positiva fora dela,
    desigualdade triangular (a violação é reportada com a tripla testemunha)."""
    D = np.asarray(distances, dtype=np.float64)
    n = D.shape[0] if D.ndim == 2 else 0
    if D.ndim != 2 or D.shape != (n, n):
        raise ConfigError(f"Tabela de distâncias não quadrada: forma {D.shape}.")
    if not np.isfinite(D).all():
        raise ConfigError("Tabela de distâncias com valores não finitos.")
    if np.abs(D - D.T).max(initial=0.0) > tolerance:
        i, j = np.unravel_index(int(np.argmax(np.abs(D - D.T))), D.shape)
        raise ConfigError(f"Tabela não simétrica: d({i},{j}) = {D[i, j]} ≠ d({j},{i}) = {D[j, i]}.")
    if np.abs(np.diag(D)).max(initial=0.0) > tolerance:
        raise ConfigError("Tabela com diagonal não nula.")
    off = ~np.eye(n, dtype=bool)
    if (D[off] <= 0).any():
        i, j = np.argwhere((D <= 0) & off)[0]
        raise ConfigError(f"Pontos distintos {i} e {j} a distância {D[i, j]}.")
    for k in range(n):
        excess = D - (D[:, k][:, None] + D[k, :][None, :])
        if excess.max() > tolerance:
            i, j = np.unravel_index(int(np.argmax(excess)), D.shape)
            raise ConfigError(
                f"Desigualdade triangular violada: d({i},{j}) = {D[i, j]} > d({i},{k}) + d({k},{j}) = "
                f"{D[i, k] + D[k, j]}."
            )


def tree_metric_space(tree: HyperbolicTree) -> MetricSpace:
    nodes = enumerate_nodes(tree)
    return MetricSpace(
        labels=tuple(node_to_str(s) for s in nodes),
        distances=distance_matrix(nodes).astype(np.float64),
        tree=tree,
    )


def metric_space(distances: np.ndarray, labels: Sequence[str] | None = None) -> MetricSpace:
    D = np.asarray(distances, dtype=np.float64)
    check_metric(D)
    labels = tuple(str(i) for i in range(D.shape[0])) if labels is None else tuple(labels)
    if len(labels) != D.shape[0]:
        raise ConfigError(f"{len(labels)} rótulos para {D.shape[0]} pontos.")
    return MetricSpace(labels=labels, distances=D)


def construction_init(tree: HyperbolicTree, d: int) -> np.ndarray:
    """Imagem de embed_l1 (sistema canônico) nas d chaves de maior variância."""
    image = embed_l1(canonical_system(tree)).matrix
    variance = image.var(axis=0)
    order = np.lexsort((np.arange(variance.size), -variance))[:d]
    init = np.zeros((image.shape[0], d))
    init[:, : order.size] = image[:, np.sort(order)]
    return init


def _pair_norms(diff: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    """(‖diff‖_p por linha, gradiente da norma em relação a diff)."""
    a = np.abs(diff)
    rows = np.arange(diff.shape[0])
    if p == 1:
        return a.sum(axis=1), np.sign(diff)
    if math.isinf(p):
        idx = np.argmax(a, axis=1)
        grad = np.zeros_like(diff)
        grad[rows, idx] = np.sign(diff[rows, idx])
        return a[rows, idx], grad
    norms = (a**p).sum(axis=1) ** (1.0 / p)
    safe = np.where(norms > 0, norms, 1.0)
    grad = np.sign(diff) * a ** (p - 1) / safe[:, None] ** (p - 1)
    grad[norms == 0] = 0.0
    return norms, grad


class _Problem:
    def __init__(self, space: MetricSpace, p: float, d: int):
        n = len(space.labels)
        self.n, self.p, self.d = n, p, d
        self.left, self.right = np.triu_indices(n, k=1)
        self.log_dom = np.log(space.distances[self.left, self.right])
        self.scale = float(space.distances[self.left, self.right].mean())

    def ratios(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        diff = x[self.left] - x[self.right]
        img, grad = _pair_norms(diff, self.p)
        return np.log(np.maximum(img, _TINY)) - self.log_dom, img, grad

    def exact(self, x: np.ndarray) -> tuple[float, float, float]:
        r, img, _ = self.ratios(x)
        if (img <= 0).any():
            return math.inf, math.inf, math.inf
        lip, colip = float(np.exp(r.max())), float(np.exp(-r.min()))
        return lip * colip, lip, colip

    def objective(self, x: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
        r, img, grad = self.ratios(x)
        value = (logsumexp(beta * r) + logsumexp(-beta * r)) / beta
        weight = softmax(beta * r) - softmax(-beta * r)
        coef = (weight / np.maximum(img, _TINY))[:, None] * grad
        g = np.zeros_like(x)
        np.add.at(g, self.left, coef)
        np.add.at(g, self.right, -coef)
        return float(value), g

    def normalize(self, x: np.ndarray) -> np.ndarray:
        """Recentra e escolhe a escala com lip = colip_inverse."""
        x = x - x.mean(axis=0, keepdims=True)
        r, img, _ = self.ratios(x)
        if (img <= 0).any():
            return x
        return x * math.exp(-(r.max() + r.min()) / 2)


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt((x**2).sum(axis=1).mean()))


def _run_restart(problem: _Problem, config: OptimizerConfig, r: int, init: np.ndarray | None) -> dict:
    seed = config.seed + r
    rng = np.random.Generator(np.random.PCG64(seed))
    if init is None:
        x = rng.standard_normal((problem.n, problem.d)) * problem.scale
    else:
        x = np.array(init, dtype=np.float64)
        if math.isinf(problem.exact(x)[0]):
            x = x + rng.standard_normal(x.shape) * 1e-3 * problem.scale
    x = problem.normalize(x)

    best_x = x.copy()
    best = current = problem.exact(x)
    rows: list[tuple[int, float, float, float]] = []
    T = config.iterations
    decay = (config.step_end / config.step_start) ** (1.0 / max(T - 1, 1))
    for t in range(T):
        beta = config.beta0 * (1 + t / config.tau)
        value, g = problem.objective(x, beta)
        rows.append((t, value, current[1], current[2]))
        g_rms = _rms(g)
        if g_rms == 0 or not math.isfinite(g_rms):
            break
        eta = config.step_start * decay**t
        x = problem.normalize(x - eta * max(_rms(x), problem.scale * 1e-12) * g / g_rms)
        current = problem.exact(x)
        if current[0] < best[0]:
            best, best_x = current, x.copy()
    return {
        "restart": r,
        "seed": seed,
        "distortion": best[0],
        "positions": best_x,
        "trace": pd.DataFrame(rows, columns=["iteration", "objective", "lip", "colip_inverse"]),
    }


def optimize(
    space: MetricSpace,
    p: float,
    d: int,
    config: OptimizerConfig | None = None,
    init: np.ndarray | None = None,
) -> OptimizationRun:
    config = config or OptimizerConfig()
    target = Lp(p)
    n = len(space.labels)
    if n < 2:
        raise ConfigError("Otimização exige pelo menos 2 pontos.")
    if d < 1:
        raise ConfigError(f"Dimensão d = {d} deve ser ≥ 1.")
    if space.tree is None:
        check_metric(space.distances)
    if init is None and space.tree is not None:
        init = construction_init(space.tree, d)
    if init is not None and np.shape(init) != (n, d):
        raise ConfigError(f"Inicialização com forma {np.shape(init)}; esperado {(n, d)}.")

    problem = _Problem(space, target.p, d)
    workers = min(config.threads, config.restarts)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_restart, problem, config, r, init if r == 0 else None) for r in range(config.restarts)
        ]
        results = []
        for i, future in enumerate(futures, start=1):
            results.append(future.result())
            print(f"  [{i}/{config.restarts}] reinício {i - 1}: distorção {results[-1]['distortion']:.6g}", flush=True)

    best = min(results, key=lambda res: (res["distortion"], res["seed"]))
    report = distortion_of_points(
        space.distances, best["positions"], target, labels=space.labels, budget=n * (n - 1) // 2, seed=best["seed"]
    )
    log(
        QUEM,
        ONDE,
        f"Concluído: {n} pontos em ℓ{target.p:g}^{d}, melhor distorção {report.distortion:.6g} "
        f"(reinício {best['restart']}, semente {best['seed']}).",
    )
    return OptimizationRun(
        space=space,
        p=target.p,
        d=d,
        positions=best["positions"],
        trace=best["trace"],
        report=report,
        config=config,
        restart=best["restart"],
        seed=best["seed"],
        restarts=[{"restart": res["restart"], "seed": res["seed"], "distortion": res["distortion"]} for res in results],
    )
