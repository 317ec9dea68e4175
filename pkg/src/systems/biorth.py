"""
Sistemas quase biortogonais (x_s, x*_s) sobre os nós de uma árvore finita,
realizados em coordenadas: x_s em ℓ1 (chaves = nós), x*_s com norma dual ℓ∞.

Invariantes (verificados exaustivamente por check_system):
  1. ‖x_s‖ ≤ 1
  2. ‖x*_s‖ ≥ 1 para s ≠ ∅
  3. ⟨x*_s, x_s⟩ ≥ ‖x*_s‖/3
  4. |⟨x*_s, x_t⟩| < δ para s ≠ t   (δ = 0: igualdade exata a zero)
  5. ‖Σ_{t≤s} x*_t‖ ≤ 3

Para incluir uma nova verificação: escreva uma função (sistema) -> (ok, detalhe)
e acrescente-a a SYSTEM_CHECKS (a ordem define a ordem do relatório).

A perturbação com semente preenche entradas fora da diagonal de vetores e
funcionais com módulo < δ/(2·n); os vetores são renormalizados para norma ℓ1
unitária. Mesma semente ⇒ mesmas entradas, bit a bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol, Sequence

import numpy as np

from ..common.errors import ConfigError, InvariantViolation
from ..spaces.norms import Lp, SpaceModel
from ..spaces.vectors import Key, LinearFunctional, Vector, decode_key, encode_key, from_row
from ..trees.core import HyperbolicTree, Node, enumerate_nodes

TOL = 1e-9
DUAL_BOUND = 3.0
# entradas perturbadas ficam estritamente abaixo da escala declarada
_SHRINK = 0.999


def split_key(key: Key) -> tuple[Any, Node]:
    """(rótulo de nível, nó) para chaves (i, s); (None, s) para chaves nó."""
    if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], tuple):
        return key[0], key[1]
    return None, key  # type: ignore[return-value]


def ancestor_matrix(labels: Sequence[Key]) -> np.ndarray:
    """A[r, c] = 1 quando o rótulo c é ancestral (≤) do rótulo r no mesmo nível."""
    index = {lab: i for i, lab in enumerate(labels)}
    out = np.zeros((len(labels), len(labels)), dtype=np.float64)
    for r, lab in enumerate(labels):
        tag, node = split_key(lab)
        for h in range(len(node) + 1):
            anc = node[:h] if tag is None else (tag, node[:h])
            c = index.get(anc)
            if c is not None:
                out[r, c] = 1.0
    return out


class SystemLike(Protocol):
    vectors: np.ndarray
    functionals: np.ndarray

    @property
    def row_labels(self) -> tuple[Key, ...]: ...

    @property
    def row_delta(self) -> np.ndarray: ...

    @property
    def ancestors(self) -> np.ndarray: ...


def _vector_norms(system: SystemLike) -> np.ndarray:
    return np.abs(system.vectors).sum(axis=1)


def _functional_norms(system: SystemLike) -> np.ndarray:
    return np.abs(system.functionals).max(axis=1)


def _check_vector_norms(system: SystemLike) -> tuple[bool, str]:
    norms = _vector_norms(system)
    worst = int(np.argmax(norms))
    ok = bool(norms[worst] <= 1 + TOL)
    return ok, f"max ‖x_s‖ = {norms[worst]:.12g} em {system.row_labels[worst]}"


def _check_functional_norms(system: SystemLike) -> tuple[bool, str]:
    norms = _functional_norms(system)
    non_root = np.array([len(split_key(lab)[1]) > 0 for lab in system.row_labels])
    if not non_root.any():
        return True, "sem nós além da raiz"
    masked = np.where(non_root, norms, np.inf)
    worst = int(np.argmin(masked))
    return bool(masked[worst] >= 1 - TOL), f"min ‖x*_s‖ = {masked[worst]:.12g} em {system.row_labels[worst]}"


def _check_diagonal(system: SystemLike) -> tuple[bool, str]:
    diag = np.einsum("ij,ij->i", system.functionals, system.vectors)
    slack = diag - _functional_norms(system) / 3
    worst = int(np.argmin(slack))
    return bool(slack[worst] >= -TOL), f"min ⟨x*_s,x_s⟩ − ‖x*_s‖/3 = {slack[worst]:.12g} em {system.row_labels[worst]}"


def _check_cross_talk(system: SystemLike) -> tuple[bool, str]:
    cross = np.abs(system.functionals @ system.vectors.T)
    np.fill_diagonal(cross, 0.0)
    if cross.shape[0] < 2:
        return True, "sistema com um único nó"
    delta = system.row_delta[:, None]
    # δ = 0 exige anulação exata (a menos de TOL); δ > 0 exige desigualdade estrita
    excess = np.where(delta > 0, cross - delta, cross - TOL)
    r, c = np.unravel_index(int(np.argmax(excess)), excess.shape)
    ok = bool(excess[r, c] < 0) if delta[r, 0] > 0 else bool(excess[r, c] <= 0)
    labels = system.row_labels
    return ok, f"max |⟨x*_s,x_t⟩| = {cross[r, c]:.6g} (δ = {delta[r, 0]:.6g}) em s={labels[r]}, t={labels[c]}"


def _check_path_sums(system: SystemLike) -> tuple[bool, str]:
    sums = np.abs(system.ancestors @ system.functionals).max(axis=1)
    worst = int(np.argmax(sums))
    return bool(sums[worst] <= DUAL_BOUND + TOL), f"max ‖Σ_{{t≤s}} x*_t‖ = {sums[worst]:.12g} em {system.row_labels[worst]}"


SYSTEM_CHECKS: list[tuple[str, Callable[[SystemLike], tuple[bool, str]]]] = [
    ("vector_norms", _check_vector_norms),
    ("functional_norms", _check_functional_norms),
    ("diagonal", _check_diagonal),
    ("cross_talk", _check_cross_talk),
    ("path_sums", _check_path_sums),
]


def check_system(system: SystemLike) -> list[tuple[str, bool, str]]:
    return [(name, *step(system)) for name, step in SYSTEM_CHECKS]


def assert_system(system: SystemLike) -> None:
    for name, ok, detail in check_system(system):
        if not ok:
            raise InvariantViolation(f"Invariante {name} violado: {detail}")


@dataclass(frozen=True, eq=False)
class BiorthSystem:
    tree: HyperbolicTree
    nodes: tuple[Node, ...]
    keys: tuple[Key, ...]
    vectors: np.ndarray
    functionals: np.ndarray
    delta: float = 0.0
    seed: int | None = None
    space: SpaceModel = field(default_factory=lambda: Lp(1))
    dual_space: SpaceModel = field(default_factory=lambda: Lp(math.inf))
    dual_bound: float = DUAL_BOUND
    labels: tuple[Key, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.nodes)})

    @property
    def row_labels(self) -> tuple[Key, ...]:
        return self.labels if self.labels is not None else self.nodes

    @property
    def row_delta(self) -> np.ndarray:
        return np.full(len(self.nodes), float(self.delta))

    @property
    def ancestors(self) -> np.ndarray:
        cached = self.__dict__.get("_ancestors")
        if cached is None:
            cached = ancestor_matrix(self.row_labels)
            object.__setattr__(self, "_ancestors", cached)
        return cached

    def index(self, s: Node) -> int:
        try:
            return self._index[s]  # type: ignore[attr-defined]
        except KeyError:
            raise ConfigError(f"Nó {s} fora do sistema.") from None

    def vector(self, s: Node) -> Vector:
        return from_row(self.vectors[self.index(s)], self.keys)

    def functional(self, s: Node) -> LinearFunctional:
        row = self.functionals[self.index(s)]
        return LinearFunctional(from_row(row, self.keys), bound=float(np.abs(row).max()))

    def path_functional(self, s: Node) -> LinearFunctional:
        """y*_s = Σ_{t≤s} x*_t."""
        row = self.ancestors[self.index(s)] @ self.functionals
        return LinearFunctional(from_row(row, self.keys), bound=self.dual_bound)

    def path_functional_matrix(self) -> np.ndarray:
        return self.ancestors @ self.functionals


def _perturbation(
    n: int, key_delta: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Matrizes (vetores, funcionais) quadradas: identidade + ruído fora da diagonal.

    Funcional na linha r: entradas < δ_r/(2n). Vetor, na coluna c: entradas < δ_c/(2n).
    """
    scale = key_delta / (2 * n)
    noise_f = rng.uniform(-_SHRINK, _SHRINK, size=(n, n))
    noise_v = rng.uniform(-_SHRINK, _SHRINK, size=(n, n))
    np.fill_diagonal(noise_f, 0.0)
    np.fill_diagonal(noise_v, 0.0)
    functionals = np.eye(n) + noise_f * scale[:, None]
    vectors = np.eye(n) + noise_v * scale[None, :]
    vectors /= np.abs(vectors).sum(axis=1, keepdims=True)
    return vectors, functionals


def canonical_system(tree: HyperbolicTree) -> BiorthSystem:
    """x_s = e_s em ℓ1(T), x*_s = e*_s, δ = 0."""
    nodes = tuple(enumerate_nodes(tree))
    n = len(nodes)
    return BiorthSystem(tree=tree, nodes=nodes, keys=nodes, vectors=np.eye(n), functionals=np.eye(n))


def perturbed_system(tree: HyperbolicTree, delta: float, seed: int) -> BiorthSystem:
    if not (0 < delta < 1):
        raise ConfigError(f"δ = {delta} fora de (0, 1).")
    nodes = tuple(enumerate_nodes(tree))
    n = len(nodes)
    rng = np.random.Generator(np.random.PCG64(seed))
    vectors, functionals = _perturbation(n, np.full(n, float(delta)), rng)
    system = BiorthSystem(
        tree=tree, nodes=nodes, keys=nodes, vectors=vectors, functionals=functionals, delta=float(delta), seed=seed
    )
    assert_system(system)
    return system


def _rows_to_json(matrix: np.ndarray, keys: Sequence[Key]) -> list[dict[str, float]]:
    return [from_row(row, keys).to_json() for row in matrix]


def _rows_from_json(rows: list[dict[str, float]], keys: Sequence[Key]) -> np.ndarray:
    index = {encode_key(k): j for j, k in enumerate(keys)}
    out = np.zeros((len(rows), len(keys)))
    for i, row in enumerate(rows):
        for k, v in row.items():
            out[i, index[k]] = v
    return out


def system_to_dict(system: BiorthSystem) -> dict:
    return {
        "kind": "single",
        "tree": system.tree.to_spec(),
        "delta": system.delta,
        "seed": system.seed,
        "schedule": None,
        "keys": [encode_key(k) for k in system.keys],
        "vectors": _rows_to_json(system.vectors, system.keys),
        "functionals": _rows_to_json(system.functionals, system.keys),
    }


def system_from_dict(data: dict) -> BiorthSystem:
    if data.get("kind") != "single":
        raise ConfigError(f"Dump de sistema de tipo inesperado: {data.get('kind')!r}.")
    keys = tuple(decode_key(k) for k in data["keys"])
    return BiorthSystem(
        tree=HyperbolicTree.from_spec(data["tree"]),
        nodes=keys,
        keys=keys,
        vectors=_rows_from_json(data["vectors"], keys),
        functionals=_rows_from_json(data["functionals"], keys),
        delta=float(data["delta"]),
        seed=data.get("seed"),
    )
