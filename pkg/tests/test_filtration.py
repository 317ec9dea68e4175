# Testes da decomposição por filtração e das cotas de contagem.

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.analysis.filtration import band_count, counting_bounds, filtration_decompose, midpoint_windows, pq_sandwich
from src.common.errors import ConfigError
from src.embeddings.constructions import embed_l1
from src.embeddings.maps import map_from_images
from src.spaces.norms import Lp
from src.spaces.vectors import Vector
from src.systems.biorth import canonical_system, perturbed_system
from src.trees.core import ROOT, HyperbolicTree, enumerate_nodes


def test_numero_de_bandas():
    assert band_count(3, 2) == 1
    assert band_count(4, 2) == 1
    assert band_count(4, 4) == 1
    assert band_count(8, 2) == 2
    assert band_count(16, 2) == 3
    assert band_count(9, 3) == 1
    assert band_count(27, 3) == 2
    with pytest.raises(ConfigError):
        band_count(4, 1)
    with pytest.raises(ConfigError):
        band_count(3, 5)


@pytest.mark.parametrize("mode", ["truncate", "average"])
def test_reconstrucao_exata(binary_tree_3, mode):
    emb = embed_l1(perturbed_system(binary_tree_3, 0.004, seed=6))
    table = filtration_decompose(emb, a=2, mode=mode)
    assert table.bands == 1
    assert table.w.shape[:2] == (3, 2)
    assert table.rest.shape == table.z.shape
    assert table.reconstruction_error() <= 1e-12


def test_a_igual_a_n(binary_tree_3):
    table = filtration_decompose(embed_l1(canonical_system(binary_tree_3)), a=3)
    assert table.bands == 1
    assert table.w.shape[1] == 2
    frame = table.norms_frame()
    assert sorted(frame["k"].unique().tolist()) == [0, 1]
    assert len(table.branch_frame()) == 3 * 2 * 8
    assert table.reconstruction_error() <= 1e-12


def test_cotas_de_contagem_no_mapa_canonico(binary_tree_3):
    table = filtration_decompose(embed_l1(canonical_system(binary_tree_3)), a=2)
    report = counting_bounds(table, C=1.0, p=2.0)
    assert report.failed_side is None
    assert report.upper_measured == 0.0
    assert report.bands == 1
    assert report.upper_bound == pytest.approx(3.0)
    assert report.upper_holds is True
    assert report.lower_bound == 1.5
    assert report.lower_bounds == [1.0]
    assert report.lower_measured == [0.0]
    # 2^{1/2} < 2C: a pequeno demais para afirmar a cota inferior
    assert report.a_large_enough is False
    assert report.lower_holds is None
    assert report.to_dict()["p"] == 2.0


def test_cotas_com_a_igual_a_n():
    tree = HyperbolicTree(depth=4, branching=2)
    table = filtration_decompose(embed_l1(canonical_system(tree)), a=4)
    report = counting_bounds(table, C=1.0, p=math.inf)
    assert report.bands == 1
    assert report.a == 4
    assert report.failed_side is None
    assert report.upper_bound == pytest.approx(4.0)
    assert report.lower_bounds == [2.0]
    assert report.lower_measured == [0.0]
    assert report.a_large_enough is True
    assert report.lower_holds == [False]
    assert report.reconstruction_error <= 1e-12


def test_contrato_violado(binary_tree_3):
    emb = embed_l1(canonical_system(binary_tree_3))
    table = filtration_decompose(emb, a=2)
    shrunk = filtration_decompose(
        map_from_images(emb.nodes, {s: emb.evaluate(s) * 0.1 for s in emb.nodes}, Lp(1), pinned=True), a=2
    )
    assert counting_bounds(table, C=1.0, p=2.0).failed_side is None
    report = counting_bounds(shrunk, C=1.0, p=math.inf)
    assert report.failed_side == "lower"
    assert report.upper_holds is None
    assert report.to_dict()["p"] == "inf"


def test_janelas_de_ponto_medio(binary_tree_3):
    table = filtration_decompose(embed_l1(canonical_system(binary_tree_3)), a=2)
    frame = midpoint_windows(table)
    assert len(frame) == 5
    np.testing.assert_allclose(frame["measured"], frame["s"])
    assert frame["at_least_s"].all()
    with pytest.raises(ConfigError):
        midpoint_windows(table, [4])


def test_sanduiche_pq():
    parts = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    assert pq_sandwich(parts, Lp(2), 2, 2) == pytest.approx((math.sqrt(2), math.sqrt(2), math.sqrt(2)))
    assert pq_sandwich(parts, Lp(1), 1, math.inf) == pytest.approx((1.0, 2.0, 2.0))
    with pytest.raises(ConfigError):
        pq_sandwich([], Lp(1), 1, 1)


def test_mapa_incompleto_ou_com_raiz_nao_nula(binary_tree_2):
    emb = embed_l1(canonical_system(binary_tree_2))
    partial = map_from_images(emb.nodes[:-1], emb.image(), Lp(1))
    with pytest.raises(ConfigError):
        filtration_decompose(partial, a=2)
    moved = map_from_images(emb.nodes, {**emb.image(), ROOT: Vector({"x": 1.0})}, Lp(1))
    with pytest.raises(ConfigError):
        filtration_decompose(moved, a=2)
    with pytest.raises(ConfigError):
        filtration_decompose(emb, a=2, mode="conditional")


@st.composite
def chain_maps(draw):
    """Mapa aleatório em T^b_N com chaves em cadeia (1,)*l, l = 1..N, e raiz em 0."""
    N = draw(st.integers(min_value=2, max_value=6))
    b = draw(st.integers(min_value=1, max_value=3))
    a = draw(st.integers(min_value=2, max_value=N))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    nodes = enumerate_nodes(HyperbolicTree(depth=N, branching=b))
    keys = [(1,) * l for l in range(1, N + 1)]
    images = {s: Vector(dict(zip(keys, rng.standard_normal(N).tolist()))) for s in nodes if s != ROOT}
    return map_from_images(nodes, images, Lp(1), pinned=True), a


@settings(max_examples=50, deadline=None)
@given(chain_maps(), st.sampled_from(["truncate", "average"]))
def test_reconstrucao_exata_em_mapas_aleatorios(case, mode):
    emb, a = case
    table = filtration_decompose(emb, a=a, mode=mode)
    assert table.w.shape[1] == table.bands + 1
    assert table.reconstruction_error() <= 1e-9


@st.composite
def disjoint_parts(draw):
    count = draw(st.integers(min_value=1, max_value=5))
    width = draw(st.integers(min_value=1, max_value=4))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    parts = []
    for i in range(count):
        x = np.zeros(count * width)
        x[i * width : (i + 1) * width] = rng.standard_normal(width)
        parts.append(x)
    return parts


@settings(max_examples=1000, deadline=None)
@given(disjoint_parts(), st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_sanduiche_pq_com_igualdade_em_suportes_disjuntos(parts, p):
    low, total, high = pq_sandwich(parts, Lp(p), p, p)
    assert low == pytest.approx(total, rel=1e-9, abs=1e-9)
    assert high == pytest.approx(total, rel=1e-9, abs=1e-9)
    low_inf, total_inf, _ = pq_sandwich(parts, Lp(p), p, math.inf)
    assert low_inf <= total_inf + 1e-9
