"""Scalar arithmetic and the combinatorial primitives shared by every module.

Two scalar modes are supported.  In ``exact`` mode every value is a
:class:`fractions.Fraction`; in ``float`` mode every value is a Python
``float``.  Formulas throughout the package are written once and work in
either mode, but a single computation must never mix the two.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

Scalar = Union[Fraction, float, int]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)


class ModeError(TypeError):
    """Raised when exact and floating values meet in one computation."""


class DegenerateSizeError(ValueError):
    """Raised for n < 2 where the variance inequality is undefined."""


def mode_of(x) -> str:
    if isinstance(x, float):
        return FLOAT
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return EXACT
    raise ModeError(f"unsupported scalar type {type(x).__name__}")


def check_mode(*values, mode: str | None = None) -> str:
    """Return the common mode of ``values``; raise ModeError if they disagree.

    Plain ints are neutral and adopt whatever mode the others carry.
    """
    found = mode
    for v in values:
        if isinstance(v, int) and not isinstance(v, bool):
            continue
        m = mode_of(v)
        if found is None:
            found = m
        elif m != found:
            raise ModeError(f"cannot mix {found} and {m} scalars")
    return found or EXACT


def check_vector_mode(values: Iterable, mode: str | None = None) -> str:
    return check_mode(*values, mode=mode)


def to_mode(x, mode: str):
    """Convert an int/Fraction/str to ``mode``.  Floats are refused in exact mode."""
    if mode == EXACT:
        if isinstance(x, float):
            raise ModeError("float value supplied in exact mode")
        return Fraction(x)
    if mode == FLOAT:
        return float(Fraction(x)) if isinstance(x, str) else float(x)
    raise ValueError(f"unknown mode {mode!r}")


def one(mode: str):
    return Fraction(1) if mode == EXACT else 1.0


def zero(mode: str):
    return Fraction(0) if mode == EXACT else 0.0


def parse_scalar(text: str, mode: str):
    """Parse ``"p/q"`` or a decimal literal into a scalar of ``mode``.

    In exact mode a decimal such as ``"0.25"`` is read as the rational it
    denotes, never through a binary float.
    """
    text = text.strip()
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational or decimal literal: {text!r}") from exc
    return q if mode == EXACT else float(q)


def parse_theta(text: str, mode: str):
    theta = parse_scalar(text, mode)
    return check_theta(theta)


def check_theta(theta):
    mode_of(theta)
    if not theta > 0:
        raise ValueError(f"theta must be strictly positive, got {theta}")
    return theta


def check_n(n: int, minimum: int = 2) -> int:
    if int(n) != n:
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < minimum:
        raise DegenerateSizeError(f"n must be at least {minimum}, got {n}")
    return int(n)


def render(x) -> str:
    """Canonical text form: ``p/q`` in lowest terms for rationals, repr for floats."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def rising_factorial(x, m: int):
    """Pochhammer symbol (x)_m = x(x+1)...(x+m-1); equals 1 for m = 0."""
    if m < 0:
        raise ValueError("rising factorial needs m >= 0")
    out = one(check_mode(x))
    for k in range(m):
        out *= x + k
    return out


def gen_binomial(a, k: int):
    """Binomial coefficient with arbitrary upper argument; 0 when k < 0."""
    if k < 0:
        return zero(check_mode(a))
    out = one(check_mode(a))
    for i in range(k):
        out *= a - i
    return out / math.factorial(k)


@lru_cache(maxsize=256)
def _theta_table(kind: type, theta, size: int) -> tuple:
    vals = [one(EXACT if kind is Fraction else FLOAT)]
    for m in range(1, size + 1):
        vals.append(vals[-1] * (theta + m - 1) / m)
    return tuple(vals)


def theta_table(theta, size: int) -> tuple:
    """Theta(0), ..., Theta(size) as a tuple, memoized per (theta, size)."""
    if isinstance(theta, int):
        theta = Fraction(theta)
    mode_of(theta)
    # key on the type too: Fraction(1) and 1.0 hash equal
    return _theta_table(type(theta), theta, size)


def theta_coeff(theta, m: int):
    """Theta(m) = (theta)_m / m!, the m-th Taylor coefficient of (1-x)^(-theta).

    Negative arguments give zero.
    """
    if isinstance(theta, int):
        theta = Fraction(theta)
    if m < 0:
        return zero(mode_of(theta))
    return theta_table(theta, m)[m]


class ThetaSeq:
    """Theta(m) lookup for a fixed theta, zero-extended to negative m."""

    def __init__(self, theta, size: int):
        if isinstance(theta, int):
            theta = Fraction(theta)
        self.theta = check_theta(theta)
        self.mode = mode_of(theta)
        self._vals = theta_table(theta, size)
        self._zero = zero(self.mode)

    def __call__(self, m: int):
        return self._vals[m] if m >= 0 else self._zero
