"""Ambiguous returns and sign-dependent (loss-averse) linear utility.

A generalized PORA lists, for each state, a finite set of returns that might
be realized there.  An ambiguity-averse agent evaluates it at the worst
return of every state (the MIN-PORA), using separate slopes for losses and
gains in each state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from ._numeric import Number, coerce, coerce_vector, dot
from .core import PORA, ProbabilityVector
from .errors import DimensionMismatch, ValidationError


@dataclass(frozen=True)
class GeneralizedPORA:
    """Per-state candidate return sets with one probability vector.

    Candidate sets are stored sorted and de-duplicated.
    """

    candidate_returns: tuple[tuple[Number, ...], ...]
    probs: ProbabilityVector

    def __post_init__(self):
        sets = []
        for j, values in enumerate(self.candidate_returns, start=1):
            values = coerce_vector(values, f"candidate_returns[{j}]")
            if not values:
                raise ValidationError("candidate_returns", f"state {j} has an empty candidate set", None)
            sets.append(tuple(sorted(set(values))))
        object.__setattr__(self, "candidate_returns", tuple(sets))
        if not isinstance(self.probs, ProbabilityVector):
            object.__setattr__(self, "probs", ProbabilityVector(tuple(self.probs)))
        if len(sets) != len(self.probs):
            raise DimensionMismatch(
                "candidate_returns", "must have one set per state", f"{len(sets)} vs {len(self.probs)}"
            )

    def __len__(self) -> int:
        return len(self.probs)

    def selections(self) -> Iterator[PORA]:
        """Every PORA that picks one candidate per state."""
        for choice in itertools.product(*self.candidate_returns):
            yield PORA(choice, self.probs)


@dataclass(frozen=True)
class SignDependentProfile:
    """Per-state ``(loss slope, gain slope)`` with loss slope >= gain slope > 0."""

    slopes: tuple[tuple[Number, Number], ...]

    def __post_init__(self):
        pairs = []
        for j, pair in enumerate(self.slopes, start=1):
            pair = tuple(pair)
            if len(pair) != 2:
                raise ValidationError("slopes", f"state {j} needs a (loss, gain) pair", pair)
            u_minus, u_plus = (coerce(v, "slopes") for v in pair)
            if not u_plus > 0:
                raise ValidationError("slopes", f"state {j} gain slope must be > 0", u_plus)
            if u_minus < u_plus:
                raise ValidationError("slopes", f"state {j} loss slope must be >= gain slope", (u_minus, u_plus))
            pairs.append((u_minus, u_plus))
        if len(pairs) < 2:
            raise ValidationError("slopes", "must cover at least 2 states", len(pairs))
        object.__setattr__(self, "slopes", tuple(pairs))

    def __len__(self) -> int:
        return len(self.slopes)


def min_pora(g: GeneralizedPORA) -> PORA:
    return PORA(tuple(values[0] for values in g.candidate_returns), g.probs)


def sign_dependent_expected_utility(sp: SignDependentProfile, pora: PORA) -> Number:
    """``sum_j p_j (u_j^- min(x_j, 0) + u_j^+ max(x_j, 0))``; a zero return contributes nothing."""
    if len(sp) != len(pora):
        raise DimensionMismatch("profile", "must have one slope pair per state", f"{len(sp)} vs {len(pora)}")
    utilities = [um * min(x, 0) + up * max(x, 0) for (um, up), x in zip(sp.slopes, pora.returns)]
    return dot(pora.probs, utilities)


def min_expected_utility(sp: SignDependentProfile, g: GeneralizedPORA) -> Number:
    return sign_dependent_expected_utility(sp, min_pora(g))


__all__ = [
    "GeneralizedPORA",
    "SignDependentProfile",
    "min_expected_utility",
    "min_pora",
    "sign_dependent_expected_utility",
]
