"""
Classificação de pares da construção segmentada e constantes por caso.

Para s ≠ s′ com |s| ≥ |s′| e u = gca(s, s′): n, m, p são os níveis de
segmento de |s|, |s′| e |u| (N_{n−1} < |s| ≤ N_n; |u| = 0 dá p = 0).

  a  n ≥ m + 2
  b  n = m + 1 e p = m
  c  n = m + 1 e p ≤ m − 1
  d  n = m = p
  e  n = m e p ≤ n − 2
  f  n = m e p = n − 1
  root  s′ = ∅

CASE_BOUNDS guarda o inverso da constante co-Lipschitz de cada caso; casos sem
constante explícita usam o envelope. Em f a constante é 104(M + 1) com M = 6/α,
α medido como a menor razão ‖G(s) − G(s′)‖/ρ dos pares do caso b.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import pandas as pd

from ..common.errors import ConfigError
from ..trees.core import Node, gca, is_ancestor, segment_level

CASE_LABELS: tuple[str, ...] = ("root", "a", "b", "c", "d", "e", "f")
CASE_BOUNDS: dict[str, float] = {"b": 1308.0, "c": 520.0, "d": 100.0}
ENVELOPE = 2000.0


@dataclass(frozen=True)
class PairCase:
    label: str
    n: int
    m: int
    p: int
    comparable: bool


def classify_segmented_pair(s: Node, s_prime: Node, K: int) -> PairCase:
    if s == s_prime:
        raise ConfigError(f"Par degenerado: {s} = {s_prime}.")
    if len(s) < len(s_prime):
        s, s_prime = s_prime, s
    comparable = is_ancestor(s_prime, s)
    n = segment_level(len(s), K)
    m = segment_level(len(s_prime), K)
    p = segment_level(len(gca(s, s_prime)), K)
    if not s_prime:
        return PairCase("root", n, m, p, comparable)
    if n >= m + 2:
        label = "a"
    elif n == m + 1:
        label = "b" if p == m else "c"
    elif p == n:
        label = "d"
    elif p == n - 1:
        label = "f"
    else:
        label = "e"
    return PairCase(label, n, m, p, comparable)


def case_bound(label: str, alpha: float | None = None, envelope: float = ENVELOPE) -> float:
    if label == "f" and alpha:
        return 104.0 * (6.0 / alpha + 1.0)
    return CASE_BOUNDS.get(label, envelope)


def case_constants(
    frame: pd.DataFrame,
    envelope: float = ENVELOPE,
    bounds: Mapping[str, float] | None = None,
) -> pd.DataFrame:
    """Menor razão medida por caso contra a cota do caso.

    frame: colunas case e ratio (= distância da imagem / ρ). bounds substitui
    CASE_BOUNDS (ex.: rótulos de janela da colagem).
    """
    missing = {"case", "ratio"} - set(frame.columns)
    if missing:
        raise ConfigError(f"Tabela de pares sem colunas {sorted(missing)}.")
    grouped = frame.groupby("case", sort=True)["ratio"].agg(["count", "min"]).reset_index()
    grouped.columns = ["case", "pairs", "min_ratio"]

    alpha = None
    if bounds is None and "b" in set(grouped["case"]):
        alpha = float(grouped.loc[grouped["case"] == "b", "min_ratio"].iloc[0])

    def _bound(label: str) -> float:
        if bounds is not None:
            return float(bounds.get(label, envelope))
        return case_bound(label, alpha, envelope)

    grouped["bound"] = grouped["case"].map(_bound)
    grouped["required"] = 1.0 / grouped["bound"]
    grouped["ok"] = grouped["min_ratio"] >= grouped["required"]
    grouped.attrs["alpha"] = alpha
    grouped.attrs["M"] = 6.0 / alpha if alpha else None
    return grouped
