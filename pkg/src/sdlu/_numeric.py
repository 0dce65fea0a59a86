"""Dual-backend number handling.

Values are either exact (``int`` / ``Fraction``) or binary floats.  Exact
inputs stay exact through every operation, and comparisons on exact values
are exact; as soon as a float is involved, comparisons use a symmetric
absolute-plus-relative band of width ``EPS_NUM``.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, float, Fraction]

EPS_SUM = 1e-9
EPS_NUM = 1e-9


def coerce(value, name: str = "value") -> Number:
    """Return ``value`` as an int, Fraction or finite float."""
    from .errors import ValidationError

    if isinstance(value, bool):
        raise ValidationError(name, "must be a number, not a boolean", value)
    if isinstance(value, numbers.Rational):
        return value if isinstance(value, (int, Fraction)) else Fraction(value)
    if isinstance(value, numbers.Real):
        f = float(value)
        if not math.isfinite(f):
            raise ValidationError(name, "must be finite", value)
        return f
    if isinstance(value, str):
        return parse_number(value)
    raise ValidationError(name, "must be a real number", repr(value))


def coerce_vector(values: Iterable, name: str = "entries") -> tuple[Number, ...]:
    return tuple(coerce(v, name) for v in values)


def parse_number(text: str) -> Fraction:
    """Parse ``"a/b"``, ``"3"`` or ``"0.25"`` as an exact rational."""
    from .errors import ValidationError

    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(None, "must be a number or a rational string 'a/b'", repr(text)) from None


def is_exact(*values: Number) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def exactify(value: Number) -> Number:
    """Exact rational for ``value``; floats are read as their shortest decimal."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return value


def total(values: Iterable[Number]) -> Number:
    values = list(values)
    if is_exact(*values):
        return sum(values, 0)
    return math.fsum(values)


def dot(a: Sequence[Number], b: Sequence[Number]) -> Number:
    return total(x * y for x, y in zip(a, b))


def tolerance(*values: Number) -> Number:
    """Comparison band for ``values``: zero when exact, else abs+rel ``EPS_NUM``."""
    if is_exact(*values):
        return 0
    return EPS_NUM * (1.0 + max((abs(float(v)) for v in values), default=0.0))


def gt(a: Number, b: Number) -> bool:
    return a - b > tolerance(a, b)


def lt(a: Number, b: Number) -> bool:
    return b - a > tolerance(a, b)


def close(a: Number, b: Number) -> bool:
    return abs(a - b) <= tolerance(a, b)


def ge(a: Number, b: Number) -> bool:
    return not lt(a, b)


def le(a: Number, b: Number) -> bool:
    return not gt(a, b)


def cumulative(values: Sequence[Number]) -> list[Number]:
    out: list[Number] = []
    running: Number = 0
    for v in values:
        running = running + v
        out.append(running)
    return out


def fmt(value: Number, digits: int = 6) -> str:
    """Human-readable rendering; exact non-integers show ``a/b (decimal)``."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator} ({float(value):.{digits}g})"
    if isinstance(value, int):
        return str(value)
    return f"{value:.{digits}g}"


def div(a: Number, b: Number) -> Number:
    """Division that keeps exact operands exact (``int / int`` would give a float)."""
    if is_exact(a, b):
        return Fraction(a) / b
    return a / b
