# Testes de árvores T_N^b: métrica ρ, ordem canônica, ramos e segmentos.

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.common.errors import ConfigError
from src.trees.core import (
    ROOT,
    HyperbolicTree,
    branch_index,
    branches,
    distance_matrix,
    enumerate_nodes,
    from_signs,
    gca,
    is_full_subtree,
    node_from_str,
    node_to_str,
    parent,
    rho,
    segment_decompose,
    segment_level,
    terminal_nodes,
    to_signs,
)

nodes_st = st.lists(st.integers(min_value=1, max_value=3), max_size=6).map(tuple)


def test_rho_exemplos():
    assert rho((1, 2), (1, 3)) == 2
    assert rho(ROOT, (1, 2, 5)) == 3
    assert rho((1, 2, 5), (1, 2)) == 1
    assert gca((1, 2, 5), (1, 3)) == (1,)


@given(nodes_st, nodes_st, nodes_st)
def test_rho_e_metrica(s, t, u):
    assert rho(s, t) == rho(t, s)
    assert (rho(s, t) == 0) == (s == t)
    assert rho(s, u) <= rho(s, t) + rho(t, u)


def test_enumeracao_por_niveis(binary_tree_2):
    nodes = enumerate_nodes(binary_tree_2)
    assert nodes == [(), (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]
    assert binary_tree_2.node_count() == 7
    assert terminal_nodes(binary_tree_2) == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_profundidade_zero():
    tree = HyperbolicTree(depth=0, branching=3)
    assert enumerate_nodes(tree) == [ROOT]
    assert tree.node_count() == 1
    assert branches(tree) == [[ROOT]]


def test_parametros_invalidos():
    with pytest.raises(ConfigError):
        HyperbolicTree(depth=-1, branching=2)
    with pytest.raises(ConfigError):
        HyperbolicTree(depth=2, branching=0)
    with pytest.raises(ConfigError):
        parent(ROOT)


def test_ramos_e_indices(binary_tree_2):
    bs = branches(binary_tree_2)
    assert bs[0] == [(), (1,), (1, 1)]
    assert bs[-1] == [(), (2,), (2, 2)]
    assert [branch_index(binary_tree_2, b[-1]) for b in bs] == [1, 2, 3, 4]
    with pytest.raises(ConfigError):
        branch_index(binary_tree_2, (1,))


def test_raiz_com_outra_ramificacao():
    tree = HyperbolicTree(depth=2, branching=2, root_branching=4)
    assert tree.node_count() == 1 + 4 * 3
    assert tree.terminal_count() == 8
    assert tree.contains((4, 2))
    assert not tree.contains((2, 3))


def test_arvore_diadica():
    tree = HyperbolicTree(depth=3, branching=7, kind="dyadic")
    assert tree.branching == 2
    assert to_signs(from_signs((-1, 1, 1))) == (-1, 1, 1)
    with pytest.raises(ConfigError):
        from_signs((0,))


def test_subarvore_cheia(binary_tree_2):
    assert is_full_subtree(enumerate_nodes(binary_tree_2), binary_tree_2, 2)
    assert is_full_subtree([(), (1,), (1, 1)], binary_tree_2, 1)
    assert not is_full_subtree([(), (1,), (1, 1)], binary_tree_2, 2)
    assert not is_full_subtree([(), (1, 1)], binary_tree_2, 1)


@given(st.lists(st.integers(min_value=1, max_value=2), min_size=1, max_size=20).map(tuple), st.integers(2, 4))
def test_segmentos_recompoem_o_no(s, K):
    parts = segment_decompose(s, K)
    assert sum(parts, ()) == s
    assert all(len(p) == K**j for j, p in enumerate(parts[:-1]))
    assert 1 <= len(parts[-1]) <= K ** (len(parts) - 1)
    assert segment_level(len(s), K) == len(parts) - 1


def test_segmentos_rejeitam_raiz():
    with pytest.raises(ConfigError):
        segment_decompose(ROOT, 2)
    with pytest.raises(ConfigError):
        segment_decompose((1,), 1)


def test_matriz_de_distancias(binary_tree_3):
    nodes = enumerate_nodes(binary_tree_3)
    D = distance_matrix(nodes)
    assert D.dtype == np.int64
    expected = np.array([[rho(s, t) for t in nodes] for s in nodes])
    np.testing.assert_array_equal(D, expected)


def test_texto_do_no():
    assert node_to_str(ROOT) == ""
    assert node_from_str("") == ROOT
    assert node_from_str(node_to_str((1, 12, 3))) == (1, 12, 3)
    with pytest.raises(ConfigError):
        node_from_str("1/0")
