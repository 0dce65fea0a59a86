"""First-order dominance, mean-preserving spreads and their utility characterizations.

With state-dependent linear utility the usual "all increasing utilities"
quantifier becomes "all profiles whose state utilities ``u_j x_j`` increase
along the (sorted) return grid".  This module decides the orders themselves,
builds the profiles that witness the converse directions, and runs randomized
and exhaustive checks of the two characterizations:

* ``(x, p)`` first-order dominates ``(x, q)`` iff every increasing profile
  strictly prefers ``p`` (:func:`verify_prop1`);
* a mean-preserving spread is strictly disliked by every increasing-concave
  profile (:func:`verify_prop2a`), and with three states the converse holds
  whenever the middle probabilities differ (:func:`verify_prop2b`).

Profiles are generated in *product space*: pick the sequence ``v_j = u_j x_j``
first, then recover ``u_j = v_j / x_j`` (``u_j = 1`` where ``x_j = 0``).  This
requires ``sign(v_j) == sign(x_j)``; for a strictly increasing ``x`` the
negatives precede any zero which precedes the positives, so an increasing
``v`` can always be shifted to match.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from ._numeric import (
    Number,
    close,
    coerce_vector,
    cumulative,
    div,
    fmt,
    gt,
    is_exact,
    le,
    lt,
)
from .core import (
    PORA,
    LinearUtilityProfile,
    ProbabilityVector,
    ReturnVector,
    expected_utility,
    expected_value,
    tail_probability,
)
from .errors import InvariantViolation, PreconditionError, ValidationError

ADVERSARIAL_BOUND = Fraction(-3, 2)


@dataclass(frozen=True)
class SpreadWitness:
    """States ``i < j < k`` (1-based) of a mean-preserving spread.

    Mass leaves the middle state ``j`` and lands on ``i`` and ``k``.
    """

    i: int
    j: int
    k: int

    def __post_init__(self):
        if not 1 <= self.i < self.j < self.k:
            raise ValidationError("witness", "indices must satisfy 1 <= i < j < k", (self.i, self.j, self.k))

    def weight(self, x: Sequence[Number]) -> Number:
        """Position of ``x_j`` between ``x_i`` and ``x_k`` as a convex weight on ``x_k``."""
        xi, xj, xk = x[self.i - 1], x[self.j - 1], x[self.k - 1]
        return div(xj - xi, xk - xi)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)


@dataclass(frozen=True)
class DominanceVerdict:
    dominates: bool
    strict_at: Number | None = None

    def __post_init__(self):
        if self.dominates != (self.strict_at is not None):
            raise ValidationError("strict_at", "must be present exactly when dominates is true", self.strict_at)

    def __bool__(self) -> bool:
        return self.dominates


@dataclass
class VerificationReport:
    """Outcome of one randomized or constructive check on a pair ``(x, p)``, ``(x, q)``.

    ``margins`` are ``Eu(x, p) - Eu(x, q)`` for every profile evaluated.
    """

    check: str
    direction: str
    passed: bool
    x: tuple[Number, ...]
    p: tuple[Number, ...]
    q: tuple[Number, ...]
    samples: int = 0
    margins: list[Number] = field(default_factory=list, repr=False)
    witness: LinearUtilityProfile | None = None
    spread: SpreadWitness | None = None
    note: str = ""

    @property
    def min_margin(self) -> Number | None:
        return min(self.margins) if self.margins else None

    @property
    def max_margin(self) -> Number | None:
        return max(self.margins) if self.margins else None

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        parts = [
            f"{self.check}: {status}",
            f"direction={self.direction}",
            f"p=({', '.join(map(str, self.p))})",
            f"q=({', '.join(map(str, self.q))})",
            f"samples={self.samples}",
        ]
        if self.margins:
            parts.append(f"min_margin={fmt(self.min_margin)}")
        if self.note:
            parts.append(self.note)
        return "  ".join(parts)


def _entries(values) -> tuple[Number, ...]:
    if isinstance(values, (ReturnVector, ProbabilityVector, LinearUtilityProfile)):
        return tuple(values.entries)
    return coerce_vector(values)


def _increasing_returns(x, min_states: int = 2) -> tuple[Number, ...]:
    xs = _entries(x)
    if len(xs) < min_states:
        raise PreconditionError(f"need at least {min_states} states, got {len(xs)}")
    if any(not a < b for a, b in zip(xs, xs[1:])):
        raise PreconditionError(f"returns must be strictly increasing, got {xs}")
    return xs


def _probs(p, size: int, name: str) -> ProbabilityVector:
    pv = p if isinstance(p, ProbabilityVector) else ProbabilityVector(tuple(p))
    if len(pv) != size:
        raise PreconditionError(f"{name} has {len(pv)} states, returns have {size}")
    return pv


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def first_order_dominates(a: PORA, b: PORA) -> DominanceVerdict:
    """Whether ``a`` first-order stochastically dominates ``b``.

    Upper-tail probabilities are step functions that only move at support
    points, so checking every point of the merged support is exhaustive.  The
    first threshold with a strict gap is reported.
    """
    strict_at = None
    for alpha in sorted(set(a.returns) | set(b.returns)):
        pa = tail_probability(a, alpha, ">")
        pb = tail_probability(b, alpha, ">")
        if lt(pa, pb):
            return DominanceVerdict(False)
        if strict_at is None and gt(pa, pb):
            strict_at = alpha
    return DominanceVerdict(strict_at is not None, strict_at)


def is_increasing_concave(profile, x) -> bool:
    """Whether the state utilities rise along ``x`` and lie strictly above every chord.

    ``x`` must be strictly increasing with at least three states.  Concavity
    is checked for every triple ``i < j < k`` against the chord between
    ``(x_i, v_i)`` and ``(x_k, v_k)``.
    """
    xs = _increasing_returns(x, 3)
    us = _entries(profile)
    if len(us) != len(xs):
        raise PreconditionError(f"profile has {len(us)} slopes, returns have {len(xs)} states")
    v = [u * r for u, r in zip(us, xs)]
    if any(not lt(a, b) for a, b in zip(v, v[1:])):
        return False
    if is_exact(*xs, *v):
        # exact: every-triple concavity is equivalent to falling consecutive chord slopes
        chords = [(b - a) / (s - r) for a, b, r, s in zip(v, v[1:], xs, xs[1:])]
        return all(a > b for a, b in zip(chords, chords[1:]))
    for i, j, k in itertools.combinations(range(len(xs)), 3):
        delta = div(xs[j] - xs[i], xs[k] - xs[i])
        if not gt(v[j], (1 - delta) * v[i] + delta * v[k]):
            return False
    return True


def is_mean_preserving_spread(x, p, q) -> SpreadWitness | None:
    """The lexicographically first triple turning ``(x, p)`` into ``(x, q)`` by a spread.

    Returns ``None`` when the means differ or no triple has the sign pattern
    ``q_i > p_i``, ``q_j < p_j``, ``q_k > p_k`` with every other state unchanged.
    """
    xs = _increasing_returns(x, 3)
    ps = _probs(p, len(xs), "p").entries
    qs = _probs(q, len(xs), "q").entries
    if not close(expected_value(PORA(xs, ps)), expected_value(PORA(xs, qs))):
        return None
    changed = [h for h in range(len(xs)) if not close(ps[h], qs[h])]
    if len(changed) != 3:
        return None
    i, j, k = changed
    if gt(qs[i], ps[i]) and lt(qs[j], ps[j]) and gt(qs[k], ps[k]):
        return SpreadWitness(i + 1, j + 1, k + 1)
    return None


def _draw_positive(rng: random.Random, exact: bool) -> Number:
    if exact:
        return Fraction(rng.randint(1, 1000), 100)
    return rng.randint(1, 1000) / 100


def _draw_unit(rng: random.Random, exact: bool) -> Number:
    if exact:
        return Fraction(rng.randint(1, 999), 1000)
    return rng.randint(1, 999) / 1000


def _place_products(xs: Sequence[Number], increments: Sequence[Number], rng: random.Random | None = None) -> list[Number]:
    """Shift the increasing sequence with the given gaps so its signs match ``xs``.

    With ``rng`` the free offset is drawn at random; without it the choice is
    deterministic: ``u_1 = 1`` when all returns are positive, ``u_L = 1`` when
    all are negative, the midpoint of the admissible range across a sign change.
    """
    exact = is_exact(*xs, *increments)
    offsets = [0, *cumulative(increments)]
    neg = [h for h, r in enumerate(xs) if r < 0]
    pos = [h for h, r in enumerate(xs) if r > 0]
    zero = [h for h, r in enumerate(xs) if r == 0]
    if zero:
        c = -offsets[zero[0]]
    elif not neg:
        c = xs[0] if rng is None else _draw_positive(rng, exact)
    elif not pos:
        c = xs[-1] - offsets[-1] if rng is None else -offsets[-1] - _draw_positive(rng, exact)
    else:
        lo, hi = -offsets[pos[0]], -offsets[neg[-1]]
        t = div(1, 2) if rng is None else _draw_unit(rng, exact)
        if not exact:
            t = float(t)
        c = lo + (hi - lo) * t
    return [c + o for o in offsets]


def _profile_from_products(xs: Sequence[Number], v: Sequence[Number]) -> LinearUtilityProfile:
    slopes = [1 if r == 0 else div(vj, r) for r, vj in zip(xs, v)]
    if not is_exact(*xs, *v):
        slopes = [float(s) for s in slopes]
    return LinearUtilityProfile(tuple(slopes))


def random_increasing_profile(x, seed=None) -> LinearUtilityProfile:
    """A random profile with ``u_j x_j`` strictly increasing along a strictly increasing ``x``."""
    xs = _increasing_returns(x)
    rng = _rng(seed)
    exact = is_exact(*xs)
    gaps = [_draw_positive(rng, exact) for _ in range(len(xs) - 1)]
    return _profile_from_products(xs, _place_products(xs, gaps, rng))


def _concave_increments(xs: Sequence[Number], chord_slopes: Sequence[Number]) -> list[Number]:
    return [s * (b - a) for s, a, b in zip(chord_slopes, xs, xs[1:])]


def random_increasing_concave_profile(x, seed=None) -> LinearUtilityProfile:
    """A random profile that is increasing-concave with respect to ``x``.

    Chord slopes between consecutive states are distinct positive draws sorted
    in decreasing order, which makes the product sequence strictly concave in
    ``x`` (decreasing *increments* alone would not be enough on an uneven grid).
    """
    xs = _increasing_returns(x, 3)
    rng = _rng(seed)
    exact = is_exact(*xs)
    for _ in range(8):
        draws = sorted(rng.sample(range(1, 10_000), len(xs) - 1), reverse=True)
        slopes = [Fraction(d, 100) if exact else d / 100 for d in draws]
        profile = _profile_from_products(xs, _place_products(xs, _concave_increments(xs, slopes), rng))
        if is_increasing_concave(profile, xs):
            return profile
    raise InvariantViolation(f"could not draw an increasing-concave profile for x={xs}")


def _grid_concave_profiles(xs: Sequence[Number]) -> Iterator[LinearUtilityProfile]:
    """10 tilt levels x 10 concavity levels of geometric chord-slope sequences."""
    exact = is_exact(*xs)
    n = len(xs) - 1
    for tilt in range(1, 11):
        for bend in range(1, 11):
            last = Fraction(tilt, 5)
            ratio = 1 + Fraction(bend, 5)
            slopes = [last * ratio ** (n - 1 - h) for h in range(n)]
            if not exact:
                slopes = [float(s) for s in slopes]
            yield _profile_from_products(xs, _place_products(xs, _concave_increments(xs, slopes)))


def random_mean_preserving_spread(x, seed=None) -> tuple[ProbabilityVector, ProbabilityVector, SpreadWitness]:
    """Draw ``p`` and a spread ``q`` of it over a random triple of states."""
    xs = _increasing_returns(x, 3)
    rng = _rng(seed)
    exact = is_exact(*xs)
    weights = [rng.randint(1, 100) for _ in xs]
    total_weight = sum(weights)
    p = [Fraction(w, total_weight) if exact else w / total_weight for w in weights]
    i, j, k = sorted(rng.sample(range(len(xs)), 3))
    delta = div(xs[j] - xs[i], xs[k] - xs[i])
    moved = p[j] * _draw_unit(rng, exact)
    q = list(p)
    q[i] = p[i] + moved * (1 - delta)
    q[j] = p[j] - moved
    q[k] = p[k] + moved * delta
    return ProbabilityVector(tuple(p)), ProbabilityVector(tuple(q)), SpreadWitness(i + 1, j + 1, k + 1)


def probability_grid(states: int, denominator: int) -> list[ProbabilityVector]:
    """All strictly positive probability vectors with entries in ``(1/denominator) * Z``."""
    if states < 2 or denominator < states:
        raise PreconditionError(f"no strictly positive grid for states={states}, denominator={denominator}")
    out = []
    for cuts in itertools.combinations(range(1, denominator), states - 1):
        bounds = (0, *cuts, denominator)
        out.append(ProbabilityVector(tuple(Fraction(b - a, denominator) for a, b in zip(bounds, bounds[1:]))))
    return out


def cumulative_gaps(p, q) -> list[Number]:
    """``sum_{k<=j} p_k - sum_{k<=j} q_k`` for ``j = 1..L-1``."""
    cp, cq = cumulative(_entries(p)), cumulative(_entries(q))
    return [a - b for a, b in zip(cp[:-1], cq[:-1])]


def construct_adversarial_profile(x, p, q) -> LinearUtilityProfile:
    """An increasing profile under which ``(x, p)`` loses to ``(x, q)`` by at least 3/2.

    Requires that ``(x, p)`` does not dominate ``(x, q)`` and that some
    cumulative gap ``P_j - Q_j`` is positive.  With ``eta`` the smallest
    positive gap, state utilities climb by ``2 / eta`` across each positive-gap
    step and by ``1 / (4L)`` elsewhere, so the utility difference is at most
    ``-2 + (L - 1) / (4L)``.
    """
    xs = _increasing_returns(x)
    pv, qv = _probs(p, len(xs), "p"), _probs(q, len(xs), "q")
    if first_order_dominates(PORA(xs, pv), PORA(xs, qv)):
        raise PreconditionError("(x, p) first-order dominates (x, q); no adversarial profile exists")
    gaps = cumulative_gaps(pv, qv)
    positive = [g for g in gaps if gt(g, 0)]
    if not positive:
        raise PreconditionError("no positive cumulative gap: p and q define the same distribution")
    eta = min(positive)
    exact = is_exact(*xs, *gaps)
    small = Fraction(1, 4 * len(xs)) if exact else 1 / (4 * len(xs))
    steps = [div(2, eta) if gt(g, 0) else small for g in gaps]
    return _profile_from_products(xs, _place_products(xs, steps))


def verify_prop1(x, p, q, sample_count: int = 200, seed=0) -> VerificationReport:
    """Check the dominance characterization on one pair.

    If ``(x, p)`` dominates ``(x, q)``, every one of ``sample_count`` random
    increasing profiles must strictly prefer ``p``.  Otherwise the adversarial
    profile must produce a margin of at most -3/2.  Equal distributions are
    reported as the degenerate case (no profile separates them).
    """
    xs = _increasing_returns(x)
    pv, qv = _probs(p, len(xs), "p"), _probs(q, len(xs), "q")
    a, b = PORA(xs, pv), PORA(xs, qv)
    report = VerificationReport("Prop1", "", False, xs, pv.entries, qv.entries)
    if first_order_dominates(a, b):
        rng = _rng(seed)
        report.direction = "forward"
        for _ in range(sample_count):
            u = random_increasing_profile(xs, rng)
            report.margins.append(expected_utility(u, a) - expected_utility(u, b))
        report.samples = sample_count
        report.passed = all(gt(m, 0) for m in report.margins)
        return report
    if not any(gt(g, 0) for g in cumulative_gaps(pv, qv)):
        report.direction = "degenerate"
        report.passed = True
        report.note = "equal distributions: expected utilities coincide for every profile"
        return report
    u = construct_adversarial_profile(xs, pv, qv)
    report.direction = "reverse"
    report.witness = u
    report.samples = 1
    report.margins.append(expected_utility(u, a) - expected_utility(u, b))
    bound = ADVERSARIAL_BOUND if is_exact(report.margins[0]) else float(ADVERSARIAL_BOUND)
    report.passed = le(report.margins[0], bound)
    return report


def verify_prop2a(x, p, q, sample_count: int = 50, seed=0) -> VerificationReport:
    """Every sampled increasing-concave profile must strictly prefer ``p`` to its spread ``q``."""
    xs = _increasing_returns(x, 3)
    pv, qv = _probs(p, len(xs), "p"), _probs(q, len(xs), "q")
    witness = is_mean_preserving_spread(xs, pv, qv)
    if witness is None:
        raise PreconditionError("(x, q) is not a mean-preserving spread of (x, p)")
    a, b = PORA(xs, pv), PORA(xs, qv)
    rng = _rng(seed)
    report = VerificationReport("Prop2a", "spread", False, xs, pv.entries, qv.entries, spread=witness)
    for _ in range(sample_count):
        u = random_increasing_concave_profile(xs, rng)
        report.margins.append(expected_utility(u, a) - expected_utility(u, b))
    report.samples = sample_count
    report.passed = all(gt(m, 0) for m in report.margins)
    if sample_count == 0:
        report.note = "vacuous: no profiles sampled"
    return report


def verify_prop2b(x, p, q, search_budget: int = 1000, seed=0) -> VerificationReport:
    """Three-state converse, checked through its contrapositive.

    For an equal-mean pair with ``p_2 != q_2`` that is *not* a spread, search
    (a fixed 10 x 10 grid, then random draws, ``search_budget`` profiles in
    total) for an increasing-concave profile with ``Eu(x, p) <= Eu(x, q)``.
    Spread pairs are handed to :func:`verify_prop2a` with ``search_budget``
    samples.
    """
    xs = _increasing_returns(x, 3)
    if len(xs) != 3:
        raise PreconditionError(f"the converse check needs exactly 3 states, got {len(xs)}")
    pv, qv = _probs(p, 3, "p"), _probs(q, 3, "q")
    a, b = PORA(xs, pv), PORA(xs, qv)
    if not close(expected_value(a), expected_value(b)):
        raise PreconditionError("p and q must have equal means")
    if close(pv[1], qv[1]):
        raise PreconditionError("p_2 must differ from q_2")
    if is_mean_preserving_spread(xs, pv, qv) is not None:
        report = verify_prop2a(xs, pv, qv, search_budget, seed)
        report.check, report.direction = "Prop2b", "delegated"
        return report

    rng = _rng(seed)

    def candidates() -> Iterator[LinearUtilityProfile]:
        yield from _grid_concave_profiles(xs)
        while True:
            yield random_increasing_concave_profile(xs, rng)

    report = VerificationReport("Prop2b", "contrapositive", False, xs, pv.entries, qv.entries)
    for tried, u in enumerate(itertools.islice(candidates(), search_budget), start=1):
        margin = expected_utility(u, a) - expected_utility(u, b)
        if le(margin, 0):
            report.samples = tried
            report.margins.append(margin)
            report.witness = u
            report.passed = True
            return report
    report.samples = search_budget
    report.note = "no witness within budget"
    return report
