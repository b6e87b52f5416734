"""Extended reals in [-inf, +inf] carried as plain Python floats.

IEEE floats already order ``-inf < finite < inf`` and absorb infinities under
addition, so the helpers here only guard the cases floats get wrong:
``inf + -inf`` (nan) and ``0 * -inf`` (nan, but an empty product of
probabilities should contribute log 1 = 0).
"""
from __future__ import annotations

import math

ExtendedReal = float

POS_INF: ExtendedReal = math.inf
NEG_INF: ExtendedReal = -math.inf


class IndeterminateError(ArithmeticError):
    """Raised on ``+inf + -inf``."""


def tag(v: ExtendedReal) -> str:
    if math.isnan(v):
        raise ValueError("nan is not an extended real")
    if v == POS_INF:
        return "pos_inf"
    if v == NEG_INF:
        return "neg_inf"
    return "finite"


def ext_add(a: ExtendedReal, b: ExtendedReal) -> ExtendedReal:
    if (a == POS_INF and b == NEG_INF) or (a == NEG_INF and b == POS_INF):
        raise IndeterminateError("inf + -inf is undefined")
    return a + b


def ext_scale(k: float, v: ExtendedReal) -> ExtendedReal:
    """``k * v`` with the convention ``0 * (+-inf) = 0``."""
    if k == 0:
        return 0.0
    return k * v


def fmt(v: ExtendedReal) -> str:
    """17 significant digits for finite values, ``inf``/``-inf`` otherwise."""
    if v == POS_INF:
        return "inf"
    if v == NEG_INF:
        return "-inf"
    if math.isnan(v):
        raise ValueError("refusing to serialize nan")
    return format(v, ".17g")


def parse(s: str) -> ExtendedReal:
    s = s.strip()
    if s in ("inf", "+inf"):
        return POS_INF
    if s == "-inf":
        return NEG_INF
    v = float(s)
    if not math.isfinite(v):
        raise ValueError(f"not an extended real: {s!r}")
    return v


def to_json(v: ExtendedReal) -> float | str:
    return fmt(v) if math.isinf(v) else float(v)
