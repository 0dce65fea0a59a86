"""Expected utility with state-dependent linear utility of money.

An agent facing ``L`` states of nature values a monetary amount ``a`` in state
``j`` at ``u[j] * a``.  A portfolio of risky assets (PORA) pairs a return per
state with a strictly positive probability per state.  Everything here is a
pure function over immutable values and works with either float or exact
rational inputs (see :mod:`sdlu._numeric`).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from ._numeric import (
    EPS_SUM,
    Number,
    coerce_vector,
    cumulative,
    div,
    dot,
    gt,
    is_exact,
    tolerance,
    total,
)
from .errors import DimensionMismatch, ValidationError


class _Vector:
    entries: tuple[Number, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Number]:
        return iter(self.entries)

    def __getitem__(self, index):
        return self.entries[index]

    @property
    def exact(self) -> bool:
        return is_exact(*self.entries)


@dataclass(frozen=True)
class ReturnVector(_Vector):
    """Monetary return in each state.  Any finite reals, in any order."""

    entries: tuple[Number, ...]

    def __post_init__(self):
        entries = coerce_vector(self.entries)
        if len(entries) < 2:
            raise ValidationError(None, "must have at least 2 states", len(entries))
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class ProbabilityVector(_Vector):
    """Strictly positive state probabilities summing to one.

    Exact vectors must sum to exactly 1; float vectors within ``EPS_SUM``.
    Nothing is renormalized.
    """

    entries: tuple[Number, ...]

    def __post_init__(self):
        entries = coerce_vector(self.entries)
        if len(entries) < 2:
            raise ValidationError(None, "must have at least 2 states", len(entries))
        for e in entries:
            if e <= 0:
                raise ValidationError(None, "entries must be strictly positive", e)
        s = total(entries)
        if (s != 1) if is_exact(*entries) else abs(s - 1) > EPS_SUM:
            raise ValidationError(None, "must sum to 1", s)
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class LinearUtilityProfile(_Vector):
    """One strictly positive utility-per-money slope per state."""

    slopes: tuple[Number, ...]

    def __post_init__(self):
        slopes = coerce_vector(self.slopes)
        if len(slopes) < 2:
            raise ValidationError(None, "must have at least 2 states", len(slopes))
        for s in slopes:
            if s <= 0:
                raise ValidationError(None, "slopes must be strictly positive", s)
        object.__setattr__(self, "slopes", slopes)

    @property
    def entries(self) -> tuple[Number, ...]:
        return self.slopes


@dataclass(frozen=True)
class PORA:
    """A portfolio of risky assets: returns paired with state probabilities.

    Plain sequences are accepted for either field and wrapped.
    """

    returns: ReturnVector
    probs: ProbabilityVector

    def __post_init__(self):
        if not isinstance(self.returns, ReturnVector):
            object.__setattr__(self, "returns", ReturnVector(tuple(self.returns)))
        if not isinstance(self.probs, ProbabilityVector):
            object.__setattr__(self, "probs", ProbabilityVector(tuple(self.probs)))
        if len(self.returns) != len(self.probs):
            raise DimensionMismatch(
                "returns", "must have the same length as probs", f"{len(self.returns)} vs {len(self.probs)}"
            )

    def __len__(self) -> int:
        return len(self.returns)

    @property
    def exact(self) -> bool:
        return self.returns.exact and self.probs.exact


class RiskAttitude(str, Enum):
    AVERSE = "Averse"
    NEUTRAL = "Neutral"
    LOVING = "Loving"

    def __str__(self) -> str:
        return self.value


def _profile(profile) -> LinearUtilityProfile:
    if isinstance(profile, LinearUtilityProfile):
        return profile
    return LinearUtilityProfile(tuple(profile))


def _check_dims(profile: LinearUtilityProfile, pora: PORA) -> None:
    if len(profile) != len(pora):
        raise DimensionMismatch(
            "profile", "must have one slope per state of the PORA", f"{len(profile)} vs {len(pora)}"
        )


def expected_value(pora: PORA) -> Number:
    return dot(pora.probs, pora.returns)


_RELATIONS = {
    ">": ">", ">=": ">=", "≥": ">=",
    "<": "<", "<=": "<=", "≤": "<=",
    "=": "=", "==": "=",
}


def tail_probability(pora: PORA, threshold: Number, relation: str = ">") -> Number:
    """Probability that the realized return stands in ``relation`` to ``threshold``.

    ``<=`` and ``<`` are computed as complements of ``>`` and ``>=`` so that
    P{X <= a} + P{X > a} == 1 holds exactly, float or not.
    """
    try:
        rel = _RELATIONS[relation]
    except KeyError:
        raise ValidationError("relation", f"must be one of {sorted(set(_RELATIONS))}", relation) from None
    xs, ps = pora.returns.entries, pora.probs.entries
    if rel == ">":
        return total(p for x, p in zip(xs, ps) if x > threshold)
    if rel == ">=":
        return total(p for x, p in zip(xs, ps) if x >= threshold)
    if rel == "<=":
        return 1 - tail_probability(pora, threshold, ">")
    if rel == "<":
        return 1 - tail_probability(pora, threshold, ">=")
    return total(p for x, p in zip(xs, ps) if x == threshold)


def utility_products(profile, returns: Sequence[Number]) -> list[Number]:
    """State utilities ``u_j * x_j``."""
    return [u * x for u, x in zip(_profile(profile), returns)]


def expected_utility(profile, pora: PORA) -> Number:
    profile = _profile(profile)
    _check_dims(profile, pora)
    return dot(pora.probs, utility_products(profile, pora.returns))


def expected_utility_telescoped(profile, pora: PORA) -> Number:
    """Expected utility via cumulative probabilities and successive utility gaps.

    Sum over j < L of P_j * (v_j - v_{j+1}) plus P_L * v_L, where P is the
    running probability total and v_j = u_j x_j.
    """
    profile = _profile(profile)
    _check_dims(profile, pora)
    v = utility_products(profile, pora.returns)
    cum = cumulative(pora.probs.entries)
    terms = [cum[j] * (v[j] - v[j + 1]) for j in range(len(v) - 1)]
    terms.append(cum[-1] * v[-1])
    return total(terms)


def certainty_equivalent(profile, pora: PORA) -> Number:
    """The sure amount ``c`` with sum_j p_j u_j c equal to the expected utility."""
    profile = _profile(profile)
    return div(expected_utility(profile, pora), dot(pora.probs, profile))


def risk_premium(profile, pora: PORA) -> Number:
    return expected_value(pora) - certainty_equivalent(profile, pora)


def attitude_from_premium(premium: Number, band: Number) -> RiskAttitude:
    if premium > band:
        return RiskAttitude.AVERSE
    if premium < -band:
        return RiskAttitude.LOVING
    return RiskAttitude.NEUTRAL


def classify_risk_attitude(profile, pora: PORA) -> RiskAttitude:
    """Averse when the expected value exceeds the certainty equivalent.

    Float inputs get a symmetric neutral band of ``tolerance(E, CE)`` around
    zero premium; exact inputs are classified exactly.
    """
    ev = expected_value(pora)
    ce = certainty_equivalent(profile, pora)
    return attitude_from_premium(ev - ce, tolerance(ev, ce))


def more_risk_averse(u, a: PORA, v, b: PORA) -> bool:
    """True iff ``u`` facing ``a`` carries a strictly larger risk premium than ``v`` facing ``b``."""
    return gt(risk_premium(u, a), risk_premium(v, b))


__all__ = [
    "PORA",
    "LinearUtilityProfile",
    "ProbabilityVector",
    "ReturnVector",
    "RiskAttitude",
    "attitude_from_premium",
    "certainty_equivalent",
    "classify_risk_attitude",
    "expected_utility",
    "expected_utility_telescoped",
    "expected_value",
    "more_risk_averse",
    "risk_premium",
    "tail_probability",
    "utility_products",
]
