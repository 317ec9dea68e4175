"""
Certificado de não mergulho para alvos com estimativas (p, q):
a > (2C)^q, m > (2C)^q (mínimos salvo sobrescrita), N = a^{m+1},
cota superior C·m^{1/p}·N contra cota inferior m·N/2.

a, m e N são inteiros exatos; N só é materializado até MAX_N_DIGITS dígitos
(acima disso N = None e vale log10_N). As cotas em ponto flutuante servem só
para o relatório: contradiction segue o predicado algébrico m > (2C)^q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..common.errors import ConfigError

# limite de conversão int -> str do Python (4300 dígitos), com folga
MAX_N_DIGITS = 4000


@dataclass(frozen=True)
class Certificate:
    C: float
    p: float
    q: float
    a: int
    m: int
    N: int | None
    log10_N: float
    upper: float
    lower: float
    contradiction: bool
    threshold: float

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "p": "inf" if math.isinf(self.p) else self.p,
            "q": self.q,
            "a": self.a,
            "m": self.m,
            "N": self.N,
            "log10_N": self.log10_N,
            "upper": self.upper,
            "lower": self.lower,
            "contradiction": self.contradiction,
            "threshold": self.threshold,
        }


def conjugate(p: float) -> float:
    if math.isnan(p) or p <= 1:
        raise ConfigError(f"p = {p} deve ser > 1.")
    return 1.0 if math.isinf(p) else p / (p - 1)


def _float_or_inf(x: int) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def certificate(C: float, p: float, a: int | None = None, m: int | None = None) -> Certificate:
    if math.isnan(C) or C < 1:
        raise ConfigError(f"C = {C} deve ser ≥ 1.")
    q = conjugate(p)
    threshold = (2 * C) ** q
    minimal = math.floor(threshold) + 1
    a = minimal if a is None else int(a)
    m = minimal if m is None else int(m)
    if a < 2 or m < 1:
        raise ConfigError(f"Parâmetros inválidos: a = {a}, m = {m}.")
    log10_N = (m + 1) * math.log10(a)
    N = a ** (m + 1) if log10_N < MAX_N_DIGITS else None
    n_float = _float_or_inf(N) if N is not None else math.inf
    root = 1.0 if math.isinf(p) else m ** (1.0 / p)
    return Certificate(
        C=C,
        p=p,
        q=q,
        a=a,
        m=m,
        N=N,
        log10_N=log10_N,
        upper=C * root * n_float,
        lower=m * n_float / 2,
        contradiction=m > threshold,
        threshold=threshold,
    )
