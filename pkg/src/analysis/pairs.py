"""
Tabela por par de um mapa (s, t, rho, dist, ratio, case) e resumo por caso.

O resumo agrega com DuckDB em memória sobre o DataFrame registrado, e o
Markdown segue o formato das tabelas de estatísticas do projeto.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

import duckdb
import numpy as np
import pandas as pd
from scipy.spatial.distance import squareform

from ..common.errors import ConfigError
from ..embeddings.cases import classify_segmented_pair
from ..embeddings.constructions import classify_glued_pair
from ..embeddings.maps import EmbeddingMap
from ..trees.core import Node, distance_matrix, node_to_str

PAIR_COLUMNS = ["s", "t", "rho", "dist", "ratio", "case"]

Classifier = Callable[[Node, Node], str]


def classifier_for(embedding: EmbeddingMap) -> Classifier | None:
    """Classificador de pares conforme a construção registrada na proveniência."""
    construction = embedding.construction
    if construction == "segmented":
        K = int(embedding.provenance.get("K", 2))
        return lambda s, t: classify_segmented_pair(s, t, K).label
    if construction in ("glued", "glued_dual"):
        return classify_glued_pair
    return None


def pair_frame(embedding: EmbeddingMap, classifier: Classifier | None = None) -> pd.DataFrame:
    nodes = embedding.nodes
    n = len(nodes)
    if n < 2:
        raise ConfigError("Tabela de pares exige pelo menos 2 nós.")
    left, right = np.triu_indices(n, k=1)
    dom = squareform(distance_matrix(nodes), checks=False).astype(np.float64)
    img = embedding.target.pairwise(embedding.matrix, embedding.keys)
    labels = [node_to_str(s) for s in nodes]
    if classifier is None:
        cases = ["all"] * left.size
    else:
        cases = [classifier(nodes[i], nodes[j]) for i, j in zip(left.tolist(), right.tolist())]
    return pd.DataFrame(
        {
            "s": [labels[i] for i in left],
            "t": [labels[j] for j in right],
            "rho": dom,
            "dist": img,
            "ratio": img / dom,
            "case": cases,
        },
        columns=PAIR_COLUMNS,
    )


def write_pairs(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_parquet(path, engine="pyarrow", index=False)
    return path


def case_summary(frame: pd.DataFrame) -> pd.DataFrame:
    missing = set(PAIR_COLUMNS) - set(frame.columns)
    if missing:
        raise ConfigError(f"Tabela de pares sem colunas {sorted(missing)}.")
    con = duckdb.connect(database=":memory:")
    try:
        con.register("pairs", frame)
        return con.execute(
            """
            SELECT
              "case",
              COUNT(*) AS pairs,
              MIN(ratio) AS min_ratio,
              MAX(ratio) AS max_ratio,
              AVG(ratio) AS mean_ratio,
              MIN(rho) AS min_rho,
              MAX(rho) AS max_rho
            FROM pairs
            GROUP BY 1
            ORDER BY 1
            """
        ).df()
    finally:
        con.close()


def fmt_int(v: int) -> str:
    return f"{v:,}".replace(",", ".")


def fmt_float(v: float | None, nd: int = 6) -> str:
    if v is None:
        return "-"
    return f"{v:,.{nd}f}".replace(",", "X").replace(".", ",").replace("X", ".")


def case_summary_markdown(summary: pd.DataFrame, constants: pd.DataFrame | None = None, title: str = "") -> str:
    """Resumo por caso em Markdown; constants (de case_constants) acrescenta cota e status."""
    bounds = {}
    if constants is not None:
        bounds = {row.case: (row.bound, bool(row.ok)) for row in constants.itertuples(index=False)}

    lines: list[str] = []
    lines.append(f"# Resumo por caso{f' - {title}' if title else ''}")
    lines.append("")
    lines.append(f"- Pares: `{fmt_int(int(summary['pairs'].sum()))}`")
    lines.append(f"- Casos: `{len(summary)}`")
    lines.append("")
    lines.append("| Caso | Pares | Razão mínima | Razão máxima | Razão média | ρ mín | ρ máx | Cota inversa | OK |")
    lines.append("|---|---:|---:|---:|---:|---:|---:|---:|---|")
    for row in summary.itertuples(index=False):
        bound, ok = bounds.get(row.case, (None, None))
        status = "-" if ok is None else ("sim" if ok else "NÃO")
        lines.append(
            f"| `{row.case}` | {fmt_int(int(row.pairs))} | {fmt_float(row.min_ratio)} | {fmt_float(row.max_ratio)} "
            f"| {fmt_float(row.mean_ratio)} | {fmt_int(int(row.min_rho))} | {fmt_int(int(row.max_rho))} "
            f"| {fmt_float(bound, 0)} | {status} |"
        )
    lines.append("")
    alpha = constants.attrs.get("alpha") if constants is not None else None
    if alpha:
        lines.append(f"- α (menor razão do caso b): `{fmt_float(alpha)}`; M = 6/α = `{fmt_float(6.0 / alpha)}`")
        lines.append("")
    return "\n".join(lines) + "\n"
