"""Exact-rational number handling.

All instance data is normalized to `fractions.Fraction` at the boundary, so
verifiers and LP solves are exact.  Floats are converted through
``Fraction(float)`` which is exact for the binary value actually stored.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Num = Union[int, float, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)

#: Sentinel "no finite contract can make this pair individually rational".
INF_WAGE = math.inf


def as_fraction(x: Num) -> Fraction:
    """Convert ints, floats, Fractions, or "num/den" strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite number: {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a number")


def ceil_div(a: Fraction, b: Fraction) -> int:
    """ceil(a / b) for positive b, exact."""
    return -((-a) // b)


def format_number(x: Num, exact: bool = False) -> int | float | str:
    """JSON-friendly form: int when integral, 'num/den' in exact mode,
    otherwise a float rounded to 12 significant digits."""
    f = as_fraction(x)
    if f.denominator == 1:
        return int(f)
    if exact:
        return f"{f.numerator}/{f.denominator}"
    return float(f"{float(f):.12g}")


def format_scalar_text(x: Num, exact: bool = False) -> str:
    """Human-readable scalar with the CLI's 12-significant-digit contract."""
    f = as_fraction(x)
    if exact:
        return str(f) if f.denominator > 1 else str(int(f))
    return f"{float(f):.12g}"
