"""Number handling shared by every module.

Two arithmetic modes exist. In exact mode every quantity is a
``fractions.Fraction``; in float mode every quantity is a ``float`` and all
equality checks use :data:`FLOAT_TOL`.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

import gmpy2

Number = Union[Fraction, float]

FLOAT_TOL = 1e-9

_RATIONAL_RE = re.compile(r"^\s*[-+]?\d+\s*/\s*\d+\s*$")


def parse_number(value, exact: bool = True) -> Number:
    """Convert an int, float, Fraction, ``"a/b"`` or decimal string."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty numeric string")
        if _RATIONAL_RE.match(text):
            num, den = text.split("/")
            frac = Fraction(int(num), int(den))
        else:
            frac = Fraction(text)
        return frac if exact else float(frac)
    if isinstance(value, Fraction):
        return value if exact else float(value)
    if isinstance(value, int):
        return Fraction(value) if exact else float(value)
    if isinstance(value, float):
        # decimal literal semantics: 0.1 means 1/10
        return Fraction(repr(value)) if exact else value
    if type(value).__name__ == "mpq":
        return Fraction(int(value.numerator), int(value.denominator)) if exact else float(value)
    raise TypeError(f"unsupported number {value!r}")


def is_exact(values: Iterable) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def tolerance(exact: bool) -> float:
    return 0 if exact else FLOAT_TOL


def to_mpq(x):
    if isinstance(x, Fraction):
        return gmpy2.mpq(x.numerator, x.denominator)
    return gmpy2.mpq(x)


def from_mpq(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def format_number(x):
    """JSON-friendly rendering: ints stay ints, other rationals become ``"a/b"``."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def as_float_text(x) -> str:
    """Plain decimal text for external tool formats."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    if isinstance(x, int):
        return str(x)
    f = float(x)
    return str(int(f)) if f.is_integer() else repr(f)
