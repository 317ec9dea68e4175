# Testes do otimizador de distorção e do experimento de crescimento.

from __future__ import annotations

import math

import numpy as np
import pytest

from src.common.errors import ConfigError
from src.optimizer.growth import GROWTH_COLUMNS, dump_growth, growth_experiment
from src.optimizer.optimize import (
    OptimizerConfig,
    check_metric,
    construction_init,
    metric_space,
    optimize,
    tree_metric_space,
)
from src.trees.core import HyperbolicTree

FAST = OptimizerConfig(iterations=40, restarts=2)


def test_estrela_no_plano():
    space = tree_metric_space(HyperbolicTree(depth=1, branching=3))
    run = optimize(space, 2.0, 2)
    assert run.distortion == pytest.approx(2 / math.sqrt(3), abs=1e-3)
    assert run.distortion >= 2 / math.sqrt(3) - 1e-9


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_isometria_em_l1(depth):
    space = tree_metric_space(HyperbolicTree(depth=depth, branching=2))
    n = len(space.labels)
    run = optimize(space, 1.0, n, FAST)
    assert run.distortion <= 1 + 1e-6


def test_inicializacao_pela_construcao():
    tree = HyperbolicTree(depth=2, branching=2)
    init = construction_init(tree, 3)
    assert init.shape == (7, 3)
    assert not init[0].any()
    assert not construction_init(tree, 10)[:, 7:].any()


def test_dois_pontos():
    run = optimize(metric_space(np.array([[0.0, 2.0], [2.0, 0.0]])), 2.0, 1, FAST)
    assert run.distortion == pytest.approx(1.0)
    frame = run.positions_frame()
    assert frame.columns.tolist() == ["point", "x0"]
    assert run.to_dict()["upper_bound_only"] is True


def test_melhor_reinicio_deterministico():
    space = tree_metric_space(HyperbolicTree(depth=2, branching=2))
    a = optimize(space, math.inf, 3, FAST)
    b = optimize(space, math.inf, 3, OptimizerConfig(iterations=40, restarts=2, threads=2))
    assert a.distortion == b.distortion
    assert a.seed == b.seed
    np.testing.assert_array_equal(a.positions, b.positions)
    assert len(a.restarts) == 2
    assert a.distortion == pytest.approx(min(r["distortion"] for r in a.restarts))


def test_traco_registrado():
    space = tree_metric_space(HyperbolicTree(depth=1, branching=2))
    run = optimize(space, 2.0, 2, OptimizerConfig(iterations=25, restarts=1))
    assert run.trace.columns.tolist() == ["iteration", "objective", "lip", "colip_inverse"]
    assert len(run.trace) <= 25


def test_metrica_invalida():
    with pytest.raises(ConfigError, match="triangular"):
        check_metric(np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]]))
    with pytest.raises(ConfigError):
        check_metric(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ConfigError):
        check_metric(np.array([[0, 0], [0, 0]]))
    with pytest.raises(ConfigError):
        metric_space(np.zeros((2, 3)))


def test_configuracao_invalida():
    with pytest.raises(ConfigError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ConfigError):
        OptimizerConfig(step_start=1e-6, step_end=1e-3)
    with pytest.raises(ConfigError):
        optimize(tree_metric_space(HyperbolicTree(depth=1, branching=2)), 2.0, 0, FAST)


def test_crescimento_nao_decrescente(tmp_path):
    frame, runs = growth_experiment([3, 1, 2], 2, 2.0, 3, FAST)
    assert frame.columns.tolist() == GROWTH_COLUMNS
    assert frame["N"].tolist() == [1, 2, 3]
    values = frame["distortion"].to_numpy()
    assert (np.diff(values) >= 0).all()
    assert (frame["distortion"] <= frame["optimized"]).all()
    assert set(runs) == {1, 2, 3}
    csv_path, parquet_path = dump_growth(frame, tmp_path)
    assert csv_path.exists() and parquet_path.exists()


def test_crescimento_em_l1_com_d_igual_ao_numero_de_nos():
    frame, _ = growth_experiment([1, 2], 2, 1.0, None, OptimizerConfig(iterations=5, restarts=1))
    assert frame["d"].tolist() == [3, 7]
    assert (frame["optimized"] <= 1 + 1e-6).all()


def test_crescimento_lista_invalida():
    with pytest.raises(ConfigError):
        growth_experiment([], 2, 2.0, 3, FAST)
    with pytest.raises(ConfigError):
        growth_experiment([0, 2], 2, 2.0, 3, FAST)
