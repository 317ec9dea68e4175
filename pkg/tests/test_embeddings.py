# Testes das construções l1, dual e coladas, com as testemunhas de cota inferior.

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from src.analysis.distortion import distortion
from src.common.errors import ConfigError
from src.embeddings.constructions import (
    CONSTRUCTION_BOUNDS,
    classify_glued_pair,
    dual_witness,
    embed_dual,
    embed_glued,
    embed_glued_dual,
    embed_l1,
    glued_dual_witness,
    glued_witness,
    gluing_weight,
    gluing_window,
    l1_witness,
)
from src.embeddings.maps import check_pinned, dump_map, load_map, map_from_images
from src.spaces.norms import Lp
from src.spaces.vectors import Vector
from src.systems.biorth import canonical_system, perturbed_system
from src.systems.leveled import GLUING, leveled_systems, required_levels
from src.trees.core import ROOT, HyperbolicTree, enumerate_nodes, rho

# δ < 1/(24 N²) para N = 3
SMALL_DELTA = 0.004


@pytest.fixture(scope="module")
def perturbed():
    return perturbed_system(HyperbolicTree(depth=3, branching=2), SMALL_DELTA, seed=11)


@pytest.fixture(scope="module")
def glued_family():
    return leveled_systems(required_levels(8), GLUING, seed=0, depth=8)


def test_l1_canonico_e_isometria(binary_tree_3):
    emb = embed_l1(canonical_system(binary_tree_3))
    assert not emb.evaluate(ROOT)
    for s, t in itertools.combinations(emb.nodes, 2):
        assert Lp(1).norm(emb.evaluate(s) - emb.evaluate(t)) == pytest.approx(rho(s, t))
    report = distortion(emb)
    assert report.distortion == pytest.approx(1.0)
    assert report.mode == "exhaustive"


def test_l1_perturbado(perturbed):
    emb = embed_l1(perturbed)
    report = distortion(emb)
    assert report.lip <= CONSTRUCTION_BOUNDS["l1"][0] + 1e-9
    assert report.colip_inverse <= CONSTRUCTION_BOUNDS["l1"][1]
    assert report.distortion <= 24
    for s, t in itertools.combinations(emb.nodes, 2):
        assert l1_witness(perturbed, emb, s, t).ok


def test_dual_canonico_incremento_unitario(binary_tree_2):
    system = canonical_system(binary_tree_2)
    emb = embed_dual(system)
    for s in emb.nodes:
        if s:
            step = emb.evaluate(s) - emb.evaluate(s[:-1])
            assert Lp(math.inf).norm(step) == pytest.approx(1.0)


def test_dual_perturbado(perturbed):
    emb = embed_dual(perturbed)
    report = distortion(emb)
    lip, inverse = CONSTRUCTION_BOUNDS["dual"]
    assert report.lip <= lip + 1e-9
    assert report.colip_inverse <= inverse
    assert report.distortion <= 24
    for s, t in itertools.combinations(emb.nodes, 2):
        assert dual_witness(perturbed, emb, s, t).ok


def test_peso_de_colagem():
    assert gluing_window(1) == 0
    assert gluing_window(3) == 1
    assert gluing_window(4) == 2
    assert gluing_weight(3) == 0.5
    assert gluing_weight(4) == 1.0
    assert gluing_weight(2) == 1.0
    with pytest.raises(ConfigError):
        gluing_window(0)


def test_classificacao_de_pares_da_colagem():
    assert classify_glued_pair((1, 2), ROOT) == "root"
    assert classify_glued_pair((1, 2), (2, 1, 1)) == "same-window"
    assert classify_glued_pair((1,), (2, 1)) == "adjacent"
    assert classify_glued_pair((1,), (2, 1, 1, 1)) == "far"


def test_colagem_exige_niveis():
    family = leveled_systems(2, GLUING, seed=0)
    with pytest.raises(ConfigError):
        embed_glued(family, 8)


def test_colagem_profundidade_8_testemunhas_amostradas(glued_family):
    emb = embed_glued(glued_family, 8)
    check_pinned(emb)
    report = distortion(emb)
    lip, inverse = CONSTRUCTION_BOUNDS["glued"]
    assert report.lip <= lip + 1e-9
    assert report.colip_inverse <= inverse
    assert report.mode == "exhaustive"
    # testemunhas numa amostra de pares; a varredura completa é feita em profundidade 5
    nodes = enumerate_nodes(HyperbolicTree(depth=8, branching=2))
    sample = [nodes[i] for i in range(0, len(nodes), 37)]
    for s, t in itertools.combinations(sample, 2):
        assert glued_witness(glued_family, emb, s, t).ok


def test_colagem_dual_profundidade_8_testemunhas_amostradas(glued_family):
    emb = embed_glued_dual(glued_family, 8)
    report = distortion(emb)
    lip, inverse = CONSTRUCTION_BOUNDS["glued_dual"]
    assert report.lip <= lip + 1e-9
    assert report.colip_inverse <= inverse
    assert report.mode == "exhaustive"
    nodes = enumerate_nodes(HyperbolicTree(depth=8, branching=2))
    sample = [nodes[i] for i in range(0, len(nodes), 37)]
    for s, t in itertools.combinations(sample, 2):
        assert glued_dual_witness(glued_family, emb, s, t).ok


def test_colagem_profundidade_5_testemunhas_em_todos_os_pares():
    family = leveled_systems(required_levels(5), GLUING, seed=0, depth=5)
    emb = embed_glued(family, 5)
    emb_dual = embed_glued_dual(family, 5)
    assert distortion(emb).mode == "exhaustive"
    for s, t in itertools.combinations(emb.nodes, 2):
        assert glued_witness(family, emb, s, t).ok
        assert glued_dual_witness(family, emb_dual, s, t).ok


def test_colagem_deterministica():
    a = embed_glued(leveled_systems(4, GLUING, seed=9, depth=5), 5)
    b = embed_glued(leveled_systems(4, GLUING, seed=9, depth=5), 5)
    np.testing.assert_array_equal(a.matrix, b.matrix)


def test_dump_e_recarga_do_mapa(tmp_path, perturbed):
    emb = embed_l1(perturbed)
    csv_path, json_path = dump_map(emb, tmp_path)
    loaded = load_map(csv_path, json_path)
    assert loaded.nodes == emb.nodes
    assert loaded.pinned
    assert loaded.construction == "l1"
    for s in emb.nodes:
        assert dict(loaded.evaluate(s)) == pytest.approx(dict(emb.evaluate(s)), rel=0, abs=0)


def test_mapa_por_imagens_e_raiz_fixada():
    nodes = [ROOT, (1,)]
    emb = map_from_images(nodes, {ROOT: Vector({"a": 1}), (1,): Vector({"b": 1})}, Lp(1), pinned=True)
    assert emb.keys == ("a", "b")
    with pytest.raises(ConfigError):
        check_pinned(emb)
    with pytest.raises(ConfigError):
        emb.evaluate((2,))


@pytest.mark.parametrize("N", [3, 4, 5])
@pytest.mark.parametrize("seed", range(20))
def test_tolerancia_a_perturbacao(N, seed):
    system = perturbed_system(HyperbolicTree(depth=N, branching=2), 0.9 / (24 * N**2), seed=seed)
    emb_l1 = embed_l1(system)
    emb_dual = embed_dual(system)
    assert distortion(emb_l1).distortion <= 24
    assert distortion(emb_dual).distortion <= 24
    for s, t in itertools.combinations(emb_l1.nodes, 2):
        assert l1_witness(system, emb_l1, s, t).ok
        assert dual_witness(system, emb_dual, s, t).ok


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("b", [1, 2, 3])
def test_sistema_canonico_e_isometria(N, b):
    report = distortion(embed_l1(canonical_system(HyperbolicTree(depth=N, branching=b))))
    assert report.distortion == pytest.approx(1.0, abs=1e-12)
