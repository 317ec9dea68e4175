# Testes de vetores, normas, projeções de nível e módulos assintóticos.

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.common.errors import ConfigError
from src.spaces.moduli import auc_modulus_estimate, aus_modulus_estimate, lp_modulus_closed_form
from src.spaces.norms import MATRIX_CACHE_SIZE, Block, EvalNorm, Lp, NestedSum, space_from_spec
from src.spaces.projections import level_projection, tree_grading
from src.spaces.vectors import LinearFunctional, Vector, decode_key, encode_key, pair, to_matrix
from src.trees.core import HyperbolicTree, enumerate_nodes


def test_vetor_descarta_zeros():
    v = Vector({"a": 1.0, "b": 0.0})
    assert dict(v) == {"a": 1.0}
    assert not (v - v)
    assert dict(2 * v + Vector({"b": 3})) == {"a": 2.0, "b": 3.0}


def test_chaves_em_json():
    for key in [(1, 2), (0, (1, 2)), 7, ()]:
        assert decode_key(encode_key(key)) == key


def test_normas_lp():
    v = Vector({0: 1, 1: -2, 2: 3})
    assert Lp(1).norm(v) == 6
    assert Lp(math.inf).norm(v) == 3
    assert Lp(2).norm(v) == pytest.approx(math.sqrt(14))
    with pytest.raises(ConfigError):
        Lp(0.5)


def test_soma_aninhada():
    space = NestedSum(2, (Block(1, ("a", "b")), Block(1, ("c", "d"))))
    v = Vector({"a": 1, "b": 1, "c": 2})
    assert space.norm(v) == pytest.approx(math.sqrt(8))
    keys = ["a", "b", "c", "d"]
    rows = to_matrix([v, Vector()], keys)
    np.testing.assert_allclose(space.row_norms(rows, keys), [math.sqrt(8), 0.0])
    np.testing.assert_allclose(space.pairwise(rows, keys), [math.sqrt(8)])
    assert space_from_spec(space.to_spec()).norm(v) == pytest.approx(math.sqrt(8))


def test_soma_aninhada_rejeita_chave_repetida():
    with pytest.raises(ConfigError):
        NestedSum(2, (Block(1, ("a",)), Block(1, ("a",))))


def test_pareamento():
    f = LinearFunctional({"a": 1, "b": 1})
    assert pair(f, Vector({"a": 0.3, "b": -0.1})) == pytest.approx(0.2)
    assert pair(f, Vector({"c": 5})) == 0.0


def test_norma_por_avaliacao():
    space = EvalNorm((LinearFunctional({"a": 1}), LinearFunctional({"a": 1, "b": -1})), epsilon=0.1)
    v = Vector({"a": 2, "b": 5})
    assert space.norm(v) == pytest.approx(3 + 0.5)
    keys = ["a", "b"]
    rows = to_matrix([v, Vector({"b": 1})], keys)
    np.testing.assert_allclose(space.row_norms(rows, keys), [3.5, 1.1])
    np.testing.assert_allclose(space.pairwise(rows, keys), [space.norm(v - Vector({"b": 1}))])
    with pytest.raises(ConfigError):
        EvalNorm((), epsilon=0.0)


@pytest.fixture
def graded():
    nodes = enumerate_nodes(HyperbolicTree(depth=2, branching=2))
    v = Vector({(1,): 1, (1, 1): 2, (1, 2): 4, (2, 1): 6})
    return v, tree_grading(nodes)


def test_projecao_truncada(graded):
    v, grading = graded
    assert dict(level_projection(v, 1, "truncate", grading)) == {(1,): 1.0}
    assert level_projection(v, 2, "truncate", grading) == v
    assert not level_projection(v, -1, "truncate", grading)


def test_projecao_media(graded):
    v, grading = graded
    e1 = level_projection(v, 1, "average", grading)
    assert dict(e1) == {(1,): 1.0, (1, 1): 3.0, (1, 2): 3.0, (2, 1): 3.0, (2, 2): 3.0}
    assert Lp(1).norm(e1) <= Lp(1).norm(v)


@pytest.mark.parametrize("mode", ["truncate", "average"])
def test_projecoes_compoem(graded, mode):
    v, grading = graded
    for k in range(3):
        for l in range(3):
            left = level_projection(level_projection(v, l, mode, grading), k, mode, grading)
            right = level_projection(v, min(k, l), mode, grading)
            assert dict(left) == pytest.approx(dict(right))


def test_modo_desconhecido(graded):
    v, grading = graded
    with pytest.raises(ConfigError):
        level_projection(v, 1, "conditional", grading)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0, math.inf])
def test_modulos_lp(p):
    for tau in (0.25, 1.0, 3.0):
        expected = lp_modulus_closed_form(p, tau)
        assert aus_modulus_estimate(Lp(p), 8, tau) == pytest.approx(expected, rel=1e-9, abs=1e-12)
        assert auc_modulus_estimate(Lp(p), 8, tau) == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_modulo_forma_fechada():
    assert lp_modulus_closed_form(2, 1.0) == pytest.approx(math.sqrt(2) - 1)
    assert lp_modulus_closed_form(math.inf, 0.5) == 0.0


def test_modulos_parametros_invalidos():
    with pytest.raises(ConfigError):
        aus_modulus_estimate(Lp(2), 2, 0.5)
    with pytest.raises(ConfigError):
        aus_modulus_estimate(Lp(2), 8, 0.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("tau", [0.25, 0.5, 1.0])
def test_modulos_lp_em_dimensao_64(p, tau):
    expected = lp_modulus_closed_form(p, tau)
    assert aus_modulus_estimate(Lp(p), 64, tau) == pytest.approx(expected, abs=1e-6)
    assert auc_modulus_estimate(Lp(p), 64, tau) == pytest.approx(expected, abs=1e-6)


def test_cache_de_funcionais_limitado():
    functionals = (LinearFunctional({"a": 1, "b": -1}), LinearFunctional({0: 2}))
    space = EvalNorm(functionals, epsilon=0.1)
    key_sets = [("a", "b") + tuple(range(i)) for i in range(MATRIX_CACHE_SIZE + 4)]
    for keys in key_sets:
        np.testing.assert_array_equal(space.functional_matrix(keys), to_matrix(functionals, keys))
        assert space.cached_key_sets() <= MATRIX_CACHE_SIZE
    last = key_sets[-1]
    assert space.functional_matrix(last) is space.functional_matrix(last)
    # o índice mais antigo saiu do cache e é recalculado
    np.testing.assert_array_equal(space.functional_matrix(key_sets[0]), to_matrix(functionals, key_sets[0]))
    assert space.cached_key_sets() == MATRIX_CACHE_SIZE


KEYS = ("a", "b", "c", "d")
values_st = st.integers(min_value=-100, max_value=100).map(lambda n: n / 10)
vectors_st = st.dictionaries(st.sampled_from(KEYS), values_st).map(Vector)
SPACES = [
    Lp(1),
    Lp(1.5),
    Lp(2),
    Lp(math.inf),
    NestedSum(2, (Block(1, ("a", "b")), Block(math.inf, ("c", "d")))),
    NestedSum(1, (Block(3, ("a", "c")), Block(2, ("b", "d")))),
    EvalNorm((LinearFunctional({"a": 1, "b": -1}), LinearFunctional({"c": 0.5, "d": 2})), epsilon=0.05),
]


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(SPACES), vectors_st, vectors_st, values_st)
def test_axiomas_de_norma(space, x, y, lam):
    nx, ny = space.norm(x), space.norm(y)
    assert space.norm(x + y) <= nx + ny + 1e-9
    assert space.norm(x * lam) == pytest.approx(abs(lam) * nx, rel=1e-9, abs=1e-9)
    assert (nx > 0) == bool(x)
    rows = to_matrix([x, y], KEYS)
    np.testing.assert_allclose(space.row_norms(rows, KEYS), [nx, ny], rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(space.pairwise(rows, KEYS), [space.norm(x - y)], rtol=1e-9, atol=1e-12)


NODES = enumerate_nodes(HyperbolicTree(depth=3, branching=2))
GRADING = tree_grading(NODES)
node_vectors_st = st.dictionaries(st.sampled_from(NODES), values_st, max_size=15).map(Vector)
levels_st = st.integers(min_value=-1, max_value=4)


def _as_rows(*vectors):
    return to_matrix(list(vectors), NODES)


@settings(max_examples=1000, deadline=None)
@given(node_vectors_st, levels_st, levels_st, st.sampled_from(["truncate", "average"]))
def test_leis_das_projecoes(v, k, l, mode):
    ek = level_projection(v, k, mode, GRADING)
    np.testing.assert_allclose(*_as_rows(level_projection(ek, k, mode, GRADING), ek), atol=1e-9)
    nested = level_projection(level_projection(v, l, mode, GRADING), k, mode, GRADING)
    np.testing.assert_allclose(*_as_rows(nested, level_projection(v, min(k, l), mode, GRADING)), atol=1e-9)
    for p in (1.0, 2.0, 3.0, math.inf):
        assert Lp(p).norm(ek) <= Lp(p).norm(v) + 1e-9
