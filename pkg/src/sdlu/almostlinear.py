"""Piecewise-linear-through-the-origin utility with upward jumps.

On ``[-w, inf)`` the utility of an amount ``x`` is ``slope * x`` with a slope
that is constant on each segment between breakpoints.  Losses are split by
breakpoints ``x_{-1} > x_{-2} > ... > x_{-n} = -w`` and carry slopes that grow
with depth (``u_{-1} < ... < u_{-n}``); gains are split by
``0 < x_1 < ... < x_{m-1}`` with slopes ``u_1 < ... < u_m``.  Segment layout::

    [-w, x_{-(n-1)})  slope u_{-n}
    (x_{-j}, x_{-(j-1)})  slope u_{-j}      (x_0 = 0)
    (x_{j-1}, x_j)    slope u_j
    (x_{m-1}, inf)    slope u_m

At each interior breakpoint the function takes either its left-segment or its
right-segment product, per ``Side``.  Both kinds of jump are upward, so the
right value is always the larger one.  Segment averages are constant, so each
segment behaves as a state of nature with its own linear utility.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from ._numeric import Number, coerce, coerce_vector, fmt, is_exact, tolerance
from .core import PORA, LinearUtilityProfile, RiskAttitude, certainty_equivalent
from .errors import InvariantViolation, PreconditionError, ValidationError


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    def __str__(self) -> str:
        return self.value


def _sides(values, count: int, name: str) -> tuple[Side, ...]:
    if values is None:
        return (Side.RIGHT,) * count
    try:
        sides = tuple(Side(v) for v in values)
    except ValueError:
        raise ValidationError(name, "entries must be 'left' or 'right'", list(values)) from None
    if len(sides) != count:
        raise ValidationError(name, f"must have one entry per interior breakpoint ({count})", len(sides))
    return sides


@dataclass(frozen=True)
class AlmostLinearUtility:
    """Validated breakpoints, slopes and breakpoint sides.

    ``loss_sides[j-1]`` belongs to ``x_{-j}`` and ``gain_sides[j-1]`` to
    ``x_j``; ``None`` means right everywhere.  ``strict=False`` relaxes the
    slope orderings to non-strict, which allows kink-free boundary instances.
    """

    wealth: Number
    loss_breakpoints: tuple[Number, ...]
    loss_slopes: tuple[Number, ...]
    gain_breakpoints: tuple[Number, ...]
    gain_slopes: tuple[Number, ...]
    loss_sides: tuple[Side, ...] | None = None
    gain_sides: tuple[Side, ...] | None = None
    strict: bool = True

    def __post_init__(self):
        w = coerce(self.wealth, "wealth")
        lb = coerce_vector(self.loss_breakpoints, "loss_breakpoints")
        ls = coerce_vector(self.loss_slopes, "loss_slopes")
        gb = coerce_vector(self.gain_breakpoints, "gain_breakpoints")
        gs = coerce_vector(self.gain_slopes, "gain_slopes")
        if w <= 0:
            raise ValidationError("wealth", "must be > 0", w)
        if not lb:
            raise ValidationError("loss_breakpoints", "must end with -wealth", "empty")
        if lb[-1] != -w:
            raise ValidationError("loss_breakpoints", "must end with -wealth exactly", lb[-1])
        if any(b >= 0 for b in lb):
            raise ValidationError("loss_breakpoints", "must all be negative", lb)
        if any(not a > b for a, b in zip(lb, lb[1:])):
            raise ValidationError("loss_breakpoints", "must be strictly decreasing", lb)
        if len(ls) != len(lb):
            raise ValidationError("loss_slopes", f"must have one slope per loss breakpoint ({len(lb)})", len(ls))
        if not gs:
            raise ValidationError("gain_slopes", "must have at least one slope", "empty")
        if len(gb) != len(gs) - 1:
            raise ValidationError("gain_breakpoints", f"must have len(gain_slopes) - 1 = {len(gs) - 1} entries", len(gb))
        if any(b <= 0 for b in gb):
            raise ValidationError("gain_breakpoints", "must all be positive", gb)
        if any(not a < b for a, b in zip(gb, gb[1:])):
            raise ValidationError("gain_breakpoints", "must be strictly increasing", gb)
        for name, slopes in (("loss_slopes", ls), ("gain_slopes", gs)):
            if any(s <= 0 for s in slopes):
                raise ValidationError(name, "must all be positive", slopes)
            ordered = all((a < b) if self.strict else (a <= b) for a, b in zip(slopes, slopes[1:]))
            if not ordered:
                raise ValidationError(name, "must be strictly increasing" if self.strict else "must be non-decreasing", slopes)
        object.__setattr__(self, "wealth", w)
        object.__setattr__(self, "loss_breakpoints", lb)
        object.__setattr__(self, "loss_slopes", ls)
        object.__setattr__(self, "gain_breakpoints", gb)
        object.__setattr__(self, "gain_slopes", gs)
        object.__setattr__(self, "loss_sides", _sides(self.loss_sides, len(lb) - 1, "loss_sides"))
        object.__setattr__(self, "gain_sides", _sides(self.gain_sides, len(gb), "gain_sides"))
        self._check_jumps()

    @classmethod
    def relaxed(cls, *args, **kwargs) -> "AlmostLinearUtility":
        """Instance with non-strict slope ordering (boundary and test use)."""
        return cls(*args, strict=False, **kwargs)

    def _check_jumps(self) -> None:
        for k in self.interior_breakpoints():
            b = self.breakpoint(k)
            left, right = self.adjacent_slopes(k)
            jump = right * b - left * b
            if jump < 0 or (self.strict and jump == 0):
                raise ValidationError("slopes", f"must give an upward jump at breakpoint {k}", b)

    @property
    def n(self) -> int:
        return len(self.loss_breakpoints)

    @property
    def m(self) -> int:
        return len(self.gain_slopes)

    @property
    def exact(self) -> bool:
        return is_exact(self.wealth, *self.loss_breakpoints, *self.loss_slopes, *self.gain_breakpoints, *self.gain_slopes)

    def interior_breakpoints(self) -> list[int]:
        """Signed indices of the jump points, in increasing order of position."""
        return [-j for j in range(self.n - 1, 0, -1)] + list(range(1, self.m))

    def _check_index(self, k: int) -> None:
        if not ((k < 0 and 1 <= -k <= self.n - 1) or (k > 0 and k <= self.m - 1)):
            raise PreconditionError(f"{k} is not an interior breakpoint index")

    def breakpoint(self, k: int) -> Number:
        self._check_index(k)
        return self.loss_breakpoints[-k - 1] if k < 0 else self.gain_breakpoints[k - 1]

    def side(self, k: int) -> Side:
        self._check_index(k)
        return self.loss_sides[-k - 1] if k < 0 else self.gain_sides[k - 1]

    def adjacent_slopes(self, k: int) -> tuple[Number, Number]:
        """(left-segment slope, right-segment slope) at breakpoint ``k``."""
        self._check_index(k)
        if k > 0:
            return self.gain_slopes[k - 1], self.gain_slopes[k]
        j = -k
        return self.loss_slopes[j], self.loss_slopes[j - 1]

    def neighbors(self, k: int) -> tuple[Number, Number]:
        """Far ends of the two segments adjacent to breakpoint ``k``."""
        self._check_index(k)
        if k > 0:
            left = self.gain_breakpoints[k - 2] if k >= 2 else 0
            right = self.gain_breakpoints[k] if k <= self.m - 2 else math.inf
            return left, right
        j = -k
        left = self.loss_breakpoints[j]
        right = self.loss_breakpoints[j - 2] if j >= 2 else 0
        return left, right

    def edges(self) -> list[Number]:
        """Left ends of all segments: ``-w``, loss breakpoints, ``0``, gain breakpoints."""
        return [*reversed(self.loss_breakpoints), 0, *self.gain_breakpoints]

    def segment_slopes(self) -> list[Number]:
        return [*reversed(self.loss_slopes), *self.gain_slopes]

    def _edge_side(self, index: int) -> Side | None:
        """Side flag of ``edges()[index]``; ``None`` for ``-w`` and ``0``."""
        n = self.n
        if index == 0 or index == n:
            return None
        if index < n:
            return self.loss_sides[n - 1 - index]
        return self.gain_sides[index - n - 1]

    def __call__(self, x: Number) -> Number:
        return evaluate(self, x)


def evaluate(alu: AlmostLinearUtility, x: Number) -> Number:
    """Utility of the amount ``x >= -w``."""
    if x < -alu.wealth:
        raise PreconditionError(f"{x} lies below -wealth = {-alu.wealth}")
    if x == 0:
        return 0 * x
    edges, slopes = alu.edges(), alu.segment_slopes()
    i = bisect.bisect_right(edges, x) - 1
    if x == edges[i] and alu._edge_side(i) is Side.LEFT:
        return slopes[i - 1] * x
    return slopes[i] * x


def perturbation_pora(alu: AlmostLinearUtility, k: int, delta: Number) -> PORA:
    """Even odds of ``x_k - delta`` and ``x_k + delta``; both must sit inside the adjacent open segments."""
    b = alu.breakpoint(k)
    left, right = alu.neighbors(k)
    if not delta > 0:
        raise PreconditionError(f"delta must be positive, got {delta}")
    if not (b - delta > left and b + delta < right):
        raise PreconditionError(f"delta {delta} too large at breakpoint {k}: segments span ({left}, {right})")
    half = Fraction(1, 2) if is_exact(b, delta) else 0.5
    return PORA((b - delta, b + delta), (half, half))


def default_delta(alu: AlmostLinearUtility, k: int) -> Number:
    """A quarter of the narrower adjacent (finite) segment."""
    b = alu.breakpoint(k)
    left, right = alu.neighbors(k)
    widths = [w for w in (b - left, right - b) if w != math.inf]
    smallest = min(widths)
    return smallest / 4 if not is_exact(smallest) else Fraction(smallest) / 4


def risk_attitude_at_breakpoint(alu: AlmostLinearUtility, k: int, delta: Number) -> RiskAttitude:
    """Attitude toward an even ``+-delta`` gamble centred on breakpoint ``k``.

    The gamble's expected utility is compared with the utility of its mean
    ``x_k``: below means averse, above means loving.  Taking the right-segment
    (upper) value at the jump makes the agent averse there; the left value
    makes it loving.
    """
    pora = perturbation_pora(alu, k, delta)
    eu = sum(p * evaluate(alu, r) for r, p in zip(pora.returns, pora.probs))
    at_mean = evaluate(alu, alu.breakpoint(k))
    band = tolerance(eu, at_mean)
    if eu > at_mean + band:
        attitude = RiskAttitude.LOVING
    elif eu < at_mean - band:
        attitude = RiskAttitude.AVERSE
    else:
        attitude = RiskAttitude.NEUTRAL
    left, right = alu.adjacent_slopes(k)
    if left != right:
        expected = RiskAttitude.AVERSE if alu.side(k) is Side.RIGHT else RiskAttitude.LOVING
        if attitude is not expected:
            raise InvariantViolation(f"breakpoint {k}: got {attitude}, side {alu.side(k)} implies {expected}")
    return attitude


def perturbation_certainty_equivalent(alu: AlmostLinearUtility, k: int, delta: Number) -> Number:
    """Certainty equivalent of the ``+-delta`` gamble at ``x_k`` for the two adjacent segment slopes.

    The gamble straddles two states with slopes ``u_a`` and ``u_b``, so the
    sure amount solves ``(u_a + u_b) / 2 * CE = Eu``.  It lands above ``x_k``
    at a gain breakpoint and below it at a loss breakpoint, whichever side the
    function takes at the jump.
    """
    pora = perturbation_pora(alu, k, delta)
    profile = LinearUtilityProfile(alu.adjacent_slopes(k))
    ce = certainty_equivalent(profile, pora)
    b = alu.breakpoint(k)
    left, right = alu.adjacent_slopes(k)
    if left != right and (ce > b) != (b > 0):
        raise InvariantViolation(f"breakpoint {k}: CE {ce} on the wrong side of {b}")
    return ce


@dataclass(frozen=True)
class Event:
    """A money interval with constant average utility ``slope``."""

    lower: Number
    upper: Number
    lower_closed: bool
    upper_closed: bool
    slope: Number

    def contains(self, x: Number) -> bool:
        above = x > self.lower or (self.lower_closed and x == self.lower)
        below = x < self.upper or (self.upper_closed and x == self.upper)
        return above and below

    def utility(self, x: Number) -> Number:
        return self.slope * x

    def __str__(self) -> str:
        lo = "[" if self.lower_closed else "("
        hi = "]" if self.upper_closed else ")"
        upper = "inf" if self.upper == math.inf else fmt(self.upper)
        return f"{lo}{fmt(self.lower)}, {upper}{hi} slope {fmt(self.slope)}"


@dataclass(frozen=True)
class StateDependentProfile:
    """Disjoint events covering ``[-w, inf)``, each with its own linear utility."""

    events: tuple[Event, ...]

    def __post_init__(self):
        ev = self.events
        if not ev or not ev[0].lower_closed or ev[-1].upper != math.inf or ev[-1].upper_closed:
            raise ValidationError("events", "must cover [-w, inf)", None)
        for a, b in zip(ev, ev[1:]):
            if a.upper != b.lower or a.upper_closed == b.lower_closed:
                raise ValidationError("events", "must be disjoint and contiguous", f"{a} | {b}")

    def event_for(self, x: Number) -> Event:
        for e in self.events:
            if e.contains(x):
                return e
        raise PreconditionError(f"{x} lies outside every event")

    def utility(self, x: Number) -> Number:
        return self.event_for(x).utility(x)

    @property
    def slopes(self) -> list[Number]:
        return [e.slope for e in self.events]


def derive_state_profile(alu: AlmostLinearUtility) -> StateDependentProfile:
    """Partition ``[-w, inf)`` into the segments of constant average utility.

    A breakpoint joins the segment whose value the function takes there; zero
    opens the first gain event.
    """
    edges, slopes = alu.edges(), alu.segment_slopes()
    events = []
    for i, (lo, slope) in enumerate(zip(edges, slopes)):
        hi = edges[i + 1] if i + 1 < len(edges) else math.inf
        lower_closed = i == 0 or lo == 0 or alu._edge_side(i) is Side.RIGHT
        upper_closed = i + 1 < len(edges) and alu._edge_side(i + 1) is Side.LEFT
        events.append(Event(lo, hi, lower_closed, upper_closed, slope))
    return StateDependentProfile(tuple(events))


__all__ = [
    "AlmostLinearUtility",
    "Event",
    "Side",
    "StateDependentProfile",
    "default_delta",
    "derive_state_profile",
    "evaluate",
    "perturbation_certainty_equivalent",
    "perturbation_pora",
    "risk_attitude_at_breakpoint",
]
