# Testes da construção segmentada (K = 2, profundidade 7, b = 2).

from __future__ import annotations

import itertools

import numpy as np
import pytest

from src.analysis.distortion import distortion
from src.analysis.pairs import classifier_for, pair_frame
from src.common.errors import ConfigError
from src.embeddings.cases import case_constants, classify_segmented_pair
from src.embeddings.constructions import CONSTRUCTION_BOUNDS
from src.embeddings.segmented import (
    branch_terminal,
    embed_segmented,
    prefix_branch,
    segment_keys,
    segmented_witness,
)
from src.systems.leveled import GLUING, SEGMENTED, leveled_systems
from src.trees.core import ROOT

DEPTH = 7


@pytest.fixture(scope="module")
def exact_levels():
    return leveled_systems(2, SEGMENTED, schedule=[0.0] * 3, seed=None, depth=DEPTH, K=2)


@pytest.fixture(scope="module")
def exact_map(exact_levels):
    return embed_segmented(exact_levels, DEPTH)


def test_indices_de_ramo():
    assert prefix_branch((1, 1, 1), 2) == 1
    assert prefix_branch((2, 2, 2), 2) == 8
    for r in range(1, 9):
        assert prefix_branch(branch_terminal(r, 3, 2), 2) == r
    with pytest.raises(ConfigError):
        branch_terminal(9, 3, 2)


def test_chaves_dos_segmentos():
    assert segment_keys(ROOT, 2, 2) == []
    assert segment_keys((2,), 2, 2) == [(0, (2,))]
    assert segment_keys((1, 2, 1, 2), 2, 2) == [
        (0, (1,)),
        (1, (1,)),
        (1, (1, 2)),
        (1, (1, 2, 1)),
        (2, (prefix_branch((1, 2, 1), 2),)),
        (2, (prefix_branch((1, 2, 1), 2), 2)),
    ]


def test_classificacao_dos_casos():
    assert classify_segmented_pair((1, 1), ROOT, 2).label == "root"
    assert classify_segmented_pair((1, 1, 1, 1), (1,), 2).label == "a"
    assert classify_segmented_pair((1, 1, 1, 1, 1), (1, 1, 2), 2).label == "b"
    assert classify_segmented_pair((1, 1, 1, 1), (2, 1), 2).label == "c"
    case = classify_segmented_pair((1, 1, 1), (1, 1), 2)
    assert case.label == "d" and case.comparable
    assert classify_segmented_pair((1, 1, 1, 1, 1), (2, 1, 1, 1), 2).label == "e"
    assert classify_segmented_pair((1, 1, 1, 1, 1), (1, 1, 2, 1), 2).label == "f"
    with pytest.raises(ConfigError):
        classify_segmented_pair((1,), (1,), 2)


def test_raiz_e_nula_e_lipschitz(exact_map):
    assert not exact_map.evaluate(ROOT)
    assert exact_map.provenance["K"] == 2
    report = distortion(exact_map)
    assert report.lip <= CONSTRUCTION_BOUNDS["segmented"][0]
    assert report.colip_inverse <= CONSTRUCTION_BOUNDS["segmented"][1]


def test_constantes_por_caso(exact_map):
    frame = pair_frame(exact_map, classifier_for(exact_map))
    table = case_constants(frame)
    assert set(table["case"]) <= {"root", "a", "b", "c", "d", "e", "f"}
    assert {"b", "d"} <= set(table["case"])
    assert table["ok"].all()
    b_row = table[table["case"] == "b"].iloc[0]
    assert b_row["min_ratio"] >= 1 / 1308
    assert table.attrs["M"] == pytest.approx(6 / table.attrs["alpha"])


def test_testemunhas(exact_levels, exact_map):
    checked = {"segmented-d": 0, "segmented-b1": 0, "segmented-b2": 0}
    nodes = exact_map.nodes
    for s, t in itertools.combinations(nodes[::3], 2):
        witness = segmented_witness(exact_levels, exact_map, s, t)
        if witness is None:
            continue
        assert witness.ok, (s, t, witness)
        checked[witness.name] += 1
    assert checked["segmented-d"] > 0
    assert checked["segmented-b1"] + checked["segmented-b2"] > 0


def test_testemunha_comparavel_d_quartos(exact_levels, exact_map):
    s, s_prime = (1, 1, 1, 1, 1, 1, 1), (1, 1, 1, 1)
    witness = segmented_witness(exact_levels, exact_map, s, s_prime)
    assert witness.name == "segmented-d"
    assert witness.required == (len(s) - len(s_prime)) / 4
    assert witness.value >= witness.required


def test_perturbacao_eta_deterministica(exact_levels):
    a = embed_segmented(exact_levels, DEPTH, eta=1e-4, seed=3)
    b = embed_segmented(exact_levels, DEPTH, eta=1e-4, seed=3)
    np.testing.assert_array_equal(a.matrix, b.matrix)
    report = distortion(a)
    assert report.lip <= CONSTRUCTION_BOUNDS["segmented"][0]


def test_familia_errada():
    with pytest.raises(ConfigError):
        embed_segmented(leveled_systems(2, GLUING, seed=0), 4)