"""
Experimento de crescimento: melhor distorção encontrada para T_N^b em ℓp^d,
N percorrendo uma lista.

Como T_N^b é subárvore de T_{N'}^b (N < N', prefixo da ordem por níveis), a
restrição da melhor configuração de N' também é candidata para N; com d fixo a
coluna `distortion` guarda o mínimo entre as duas e fica não decrescente em N.
`optimized` é o valor do próprio otimizador. Tudo são cotas superiores da
distorção ótima, sem afirmação de taxa de crescimento.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import pandas as pd

from ..analysis.distortion import distortion_of_points
from ..common.errors import ConfigError, InvariantViolation
from ..common.log_util import log
from ..spaces.norms import Lp
from ..trees.core import HyperbolicTree
from .optimize import OptimizationRun, OptimizerConfig, optimize, tree_metric_space

QUEM = "Python"
ONDE = "optimizer.growth"

GROWTH_COLUMNS = ["N", "b", "nodes", "p", "d", "optimized", "distortion", "source", "restart", "seed"]


def growth_experiment(
    depths: Sequence[int],
    branching: int,
    p: float,
    d: int | None,
    config: OptimizerConfig | None = None,
) -> tuple[pd.DataFrame, dict[int, OptimizationRun]]:
    """d = None usa d = número de nós de cada árvore (sem restrição cruzada)."""
    depths = sorted({int(N) for N in depths})
    if not depths:
        raise ConfigError("Lista de profundidades vazia.")
    if depths[0] < 1:
        raise ConfigError(f"Profundidades devem ser ≥ 1: {depths}.")
    config = config or OptimizerConfig()
    target = Lp(p)

    runs: dict[int, OptimizationRun] = {}
    total = len(depths)
    for i, N in enumerate(depths, start=1):
        space = tree_metric_space(HyperbolicTree(depth=N, branching=branching))
        dim = len(space.labels) if d is None else d
        runs[N] = optimize(space, target.p, dim, config)
        print(f"  [{i}/{total}] N={N}: distorção {runs[N].distortion:.6g}", flush=True)

    rows = []
    for N in depths:
        run = runs[N]
        value, source = run.distortion, f"N={N}"
        if d is not None:
            n = len(run.space.labels)
            for M in depths:
                if M <= N:
                    continue
                positions = runs[M].positions[:n]
                try:
                    restricted = distortion_of_points(
                        run.space.distances, positions, target, budget=n * (n - 1) // 2
                    ).distortion
                except InvariantViolation:
                    continue
                if restricted < value:
                    value, source = restricted, f"N={M}"
        rows.append(
            (
                N,
                branching,
                len(run.space.labels),
                "inf" if math.isinf(target.p) else target.p,
                run.d,
                run.distortion,
                value,
                source,
                run.restart,
                run.seed,
            )
        )
    frame = pd.DataFrame(rows, columns=GROWTH_COLUMNS)
    log(QUEM, ONDE, f"Concluído: crescimento b={branching}, p={target.p:g}, N ∈ {depths}.")
    return frame, runs


def dump_growth(frame: pd.DataFrame, out_dir: Path, name: str = "growth") -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    parquet_path = out_dir / f"{name}.parquet"
    frame.to_csv(csv_path, index=False, float_format="%.17g")
    frame.to_parquet(parquet_path, engine="pyarrow", index=False)
    return csv_path, parquet_path
