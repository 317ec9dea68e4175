"""
Decomposição por filtração de um mapa u: T^b_N → X com u(∅) = 0.

Ramos = nós terminais de T^b_N em ordem lexicográfica (índice β). Para cada j:

  z_j[β]  = u(β|_j) − u(β|_{j−1})
  w_{j0}  = z_j − Ε_{j−1} z_j
  w_{jk}  = Ε_{j−a^{k−1}} z_j − Ε_{j−a^k} z_j,   k = 1..m,  m = max{k ≥ 1 : a^{k+1} ≤ N}
  resto_j = Ε_{j−a^m} z_j                      (soma das bandas k > m)

com Ε_k = 0 para k < 0, de modo que Σ_k w_{jk} + resto_j = z_j exatamente. As cotas
de contagem usam só as bandas 1..m; o resto entra apenas na reconstrução.

Modos de Ε_k:
  truncate  zera as coordenadas de nível > k (graduação das chaves do alvo)
  average   média condicional sobre os ramos com o mesmo prefixo de comprimento k
            (versão finita do limite iterado sobre as entradas k+1..N)

Norma Z de uma tabela por ramos: média, sobre os ramos, da norma do alvo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.spatial.distance import squareform

from ..common.errors import ConfigError
from ..embeddings.maps import EmbeddingMap
from ..spaces.norms import SpaceModel
from ..spaces.projections import MODES, Grading, tree_grading, truncate_mask
from ..spaces.vectors import Key
from ..trees.core import ROOT, HyperbolicTree, distance_matrix, enumerate_nodes, terminal_nodes


def band_count(N: int, a: int) -> int:
    """m = max{k ≥ 1 : a^{k+1} ≤ N}; 1 quando a² > N (caso a = N)."""
    if a < 2 or a > N:
        raise ConfigError(f"a inválido: {a} (esperado inteiro em [2, N = {N}]).")
    m = 1
    while a ** (m + 2) <= N:
        m += 1
    return m


@dataclass(frozen=True, eq=False)
class FiltrationTable:
    embedding: EmbeddingMap
    tree: HyperbolicTree
    a: int
    mode: str
    bands: int
    z: np.ndarray  # (N, ramos, chaves)
    w: np.ndarray  # (N, bands + 1, ramos, chaves)
    rest: np.ndarray  # (N, ramos, chaves)
    grading: Grading | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.tree.depth

    @property
    def keys(self) -> tuple[Key, ...]:
        return self.embedding.keys

    @property
    def target(self) -> SpaceModel:
        return self.embedding.target

    def branch_norms(self, table: np.ndarray) -> np.ndarray:
        """Norma do alvo por ramo; table: (ramos, chaves)."""
        return self.target.row_norms(table, self.keys)

    def z_norm(self, table: np.ndarray) -> float:
        return float(math.fsum(self.branch_norms(table)) / table.shape[0])

    def reconstruction_error(self) -> float:
        return float(np.abs(self.w.sum(axis=1) + self.rest - self.z).max()) if self.z.size else 0.0

    def rest_norm(self) -> float:
        return float(math.fsum(self.z_norm(self.rest[j]) for j in range(self.N)))

    def norms_frame(self) -> pd.DataFrame:
        rows = [
            (j + 1, k, self.z_norm(self.w[j, k])) for j in range(self.N) for k in range(self.bands + 1)
        ]
        return pd.DataFrame(rows, columns=["j", "k", "norm"])

    def branch_frame(self) -> pd.DataFrame:
        """Uma linha por (ramo, j, k): a tabela w despejada em CSV."""
        frames = []
        branches = np.arange(1, self.w.shape[2] + 1)
        for j in range(self.N):
            for k in range(self.bands + 1):
                frames.append(
                    pd.DataFrame({"branch": branches, "j": j + 1, "k": k, "norm": self.branch_norms(self.w[j, k])})
                )
        return pd.concat(frames, ignore_index=True)

    def dump_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.branch_frame().to_csv(path, index=False, float_format="%.17g")
        return path


def _full_tree(embedding: EmbeddingMap) -> HyperbolicTree:
    nodes = embedding.nodes
    depth = max((len(s) for s in nodes), default=0)
    branching = max((max(s) for s in nodes if s), default=1)
    tree = HyperbolicTree(depth=depth, branching=branching)
    if depth == 0 or set(nodes) != set(enumerate_nodes(tree)):
        raise ConfigError(f"u precisa estar definido em todos os nós de T^{branching}_{depth}.")
    if ROOT in nodes and embedding.evaluate(ROOT):
        raise ConfigError("Filtração exige u(∅) = 0.")
    return tree


def _projector(mode: str, tree: HyperbolicTree, keys: Sequence[Key], grading: Grading | None):
    N, b = tree.depth, tree.branching
    if mode == "truncate":
        if grading is None:
            try:
                grading = tree_grading(keys)
            except TypeError:
                raise ConfigError("Modo truncate exige alvo graduado por nível (chaves nó ou (nível, nó)).") from None
        masks = {k: truncate_mask(keys, k, grading) for k in range(N + 1)}

        def project(x: np.ndarray, k: int) -> np.ndarray:
            if k < 0:
                return np.zeros_like(x)
            return x * masks[min(k, N)][None, :]

        return project, grading

    def average(x: np.ndarray, k: int) -> np.ndarray:
        if k < 0:
            return np.zeros_like(x)
        k = min(k, N)
        blocks = x.reshape(b**k, b ** (N - k), x.shape[1])
        means = blocks.mean(axis=1, keepdims=True)
        return np.broadcast_to(means, blocks.shape).reshape(x.shape).copy()

    return average, None


def filtration_decompose(
    embedding: EmbeddingMap, a: int, mode: str = "truncate", grading: Grading | None = None
) -> FiltrationTable:
    if mode not in MODES:
        raise ConfigError(f"Modo de projeção desconhecido: {mode!r} (use {MODES}).")
    tree = _full_tree(embedding)
    N = tree.depth
    m = band_count(N, a)
    project, grading = _projector(mode, tree, embedding.keys, grading)

    terminals = terminal_nodes(tree)
    prefix_rows = np.array(
        [[embedding.index(t[:j]) for t in terminals] for j in range(N + 1)], dtype=np.intp
    )
    images = embedding.matrix[prefix_rows]  # (N+1, ramos, chaves)
    z = images[1:] - images[:-1]

    w = np.zeros((N, m + 1) + z.shape[1:])
    rest = np.zeros_like(z)
    for jj in range(N):
        j = jj + 1
        zj = z[jj]
        w[jj, 0] = zj - project(zj, j - 1)
        for k in range(1, m + 1):
            w[jj, k] = project(zj, j - a ** (k - 1)) - project(zj, j - a**k)
        rest[jj] = project(zj, j - a**m)
    return FiltrationTable(embedding, tree, a, mode, m, z, w, rest, grading)


@dataclass(frozen=True)
class CountingReport:
    C: float
    p: float
    N: int
    a: int
    bands: int
    upper_measured: float
    upper_bound: float
    lower_measured: list[float]
    lower_bound: float
    lower_bounds: list[float]
    upper_margin: float
    lower_margins: list[float]
    contract_lower_ok: bool
    contract_upper_ok: bool
    a_large_enough: bool
    failed_side: str | None
    upper_holds: bool | None
    lower_holds: list[bool] | None
    reconstruction_error: float

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["p"] = "inf" if math.isinf(self.p) else self.p
        return out


def _contract(embedding: EmbeddingMap, C: float) -> tuple[bool, bool]:
    """ρ − 1 ≤ ‖u(s) − u(s′)‖ ≤ Cρ + 1 para todos os pares."""
    dom = squareform(distance_matrix(embedding.nodes), checks=False).astype(np.float64)
    img = embedding.target.pairwise(embedding.matrix, embedding.keys)
    eps = 1e-9
    return bool((dom - 1 <= img + eps).all()), bool((img <= C * dom + 1 + eps).all())


def counting_bounds(table: FiltrationTable, C: float, p: float) -> CountingReport:
    if C < 1:
        raise ConfigError(f"C = {C} < 1.")
    if p < 1:
        raise ConfigError(f"p = {p} < 1.")
    N, m = table.N, table.bands
    if table.w.shape[:2] != (N, m + 1) or table.z.shape[0] != N:
        raise ConfigError(f"Tabela w com forma {table.w.shape} incompatível com N={N}, bandas={m}.")
    norms = np.array([[table.z_norm(table.w[j, k]) for k in range(m + 1)] for j in range(N)])
    upper_measured = float(math.fsum(norms[:, 1:].ravel()))
    upper_bound = C * (1.0 if math.isinf(p) else m ** (1.0 / p)) * N
    lower_measured = [float(math.fsum(norms[:, k])) for k in range(1, m + 1)]
    lower_bound = N / 2
    # janelas r = λa^k com r ≤ N − a^k; igual a N/2 quando a^k divide N
    a = table.a
    lower_bounds = [a**k * (N // a**k) / 2 for k in range(1, m + 1)]
    # a^{1−1/p} ≥ 2C: escolha de a que sustenta a cota inferior
    a_ok = a >= 2 * C if math.isinf(p) else a ** (1.0 - 1.0 / p) >= 2 * C

    lower_ok, upper_ok = _contract(table.embedding, C)
    failed = None
    if not lower_ok and not upper_ok:
        failed = "both"
    elif not lower_ok:
        failed = "lower"
    elif not upper_ok:
        failed = "upper"
    claims = failed is None
    return CountingReport(
        C=C,
        p=p,
        N=N,
        a=a,
        bands=m,
        upper_measured=upper_measured,
        upper_bound=upper_bound,
        lower_measured=lower_measured,
        lower_bound=lower_bound,
        lower_bounds=lower_bounds,
        upper_margin=upper_bound - upper_measured,
        lower_margins=[v - b for v, b in zip(lower_measured, lower_bounds)],
        contract_lower_ok=lower_ok,
        contract_upper_ok=upper_ok,
        a_large_enough=a_ok,
        failed_side=failed,
        upper_holds=(upper_measured <= upper_bound + 1e-9) if claims else None,
        lower_holds=(
            [v >= b - 1e-9 for v, b in zip(lower_measured, lower_bounds)] if claims and a_ok else None
        ),
        reconstruction_error=table.reconstruction_error(),
    )


def midpoint_windows(table: FiltrationTable, windows: Sequence[int] | None = None) -> pd.DataFrame:
    """‖F_r(Σ_{j=r+1}^{r+s} z_j)‖ medido para cada janela (r, s), com s em `windows`
    (padrão: potências de a até N). Valor medido, comparado a s sem asserção."""
    N = table.N
    project, _ = _projector(table.mode, table.tree, table.keys, table.grading)
    if windows is None:
        windows = [table.a**k for k in range(table.bands + 1) if table.a**k <= N]
    rows = []
    for s in windows:
        if s < 1 or s > N:
            raise ConfigError(f"Janela s = {s} fora de [1, {N}].")
        for r in range(0, N - s + 1):
            total = table.z[r : r + s].sum(axis=0)
            value = table.z_norm(total - project(total, r))
            rows.append((r, s, value, value >= s))
    return pd.DataFrame(rows, columns=["r", "s", "measured", "at_least_s"])


def pq_sandwich(parts: Sequence[np.ndarray], space: SpaceModel, p: float, q: float) -> tuple[float, float, float]:
    """((Σ‖x_j‖^q)^{1/q}, ‖Σ x_j‖, (Σ‖x_j‖^p)^{1/p}) para partes em bandas disjuntas."""
    if not parts:
        raise ConfigError("pq_sandwich sem partes.")
    matrix = np.vstack([np.asarray(x, dtype=np.float64)[None, :] for x in parts])
    keys = list(range(matrix.shape[1]))
    norms = space.row_norms(matrix, keys)
    total = float(space.row_norms(matrix.sum(axis=0, keepdims=True), keys)[0])

    def _lp(values: np.ndarray, r: float) -> float:
        return float(values.max()) if math.isinf(r) else float(np.sum(values**r) ** (1.0 / r))

    return _lp(norms, q), total, _lp(norms, p)
