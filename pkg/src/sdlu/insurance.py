"""Insurance against a single risky loss under state-dependent linear utility.

Two states: no loss (probability ``1 - p``, slope ``u1``) and a loss of ``L``
(probability ``p``, slope ``u2 >= u1``).  An optional third slope ``u3`` with
``u1 < u3 < u2`` applies when the loss strikes an agent who *did* insure.

A contract is a premium ``pi`` and a deductible ``d`` in ``[0, L]``; the
insurer pays ``L - d`` on a loss and earns ``pi - p (L - d)`` in expectation.
The buyer accepts iff

    [(1-p) u1 + p u] pi + p u d <= p u2 L,        u = u3 if given, else u2

(acceptance at indifference), and the insurer sells iff ``pi + p d >= p L``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._numeric import Number, coerce, div, is_exact
from .core import PORA, LinearUtilityProfile, RiskAttitude, classify_risk_attitude
from .errors import InvariantViolation, PreconditionError, ValidationError


@dataclass(frozen=True)
class InsuranceScenario:
    """Wealth, loss, loss probability and the agent's state slopes."""

    wealth: Number
    loss: Number
    loss_prob: Number
    u1: Number
    u2: Number
    u3: Number | None = None
    invest_return: Number | None = None

    def __post_init__(self):
        for name in ("wealth", "loss", "loss_prob", "u1", "u2", "u3", "invest_return"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, coerce(value, name))
        w, L, p = self.wealth, self.loss, self.loss_prob
        if w <= 0:
            raise ValidationError("wealth", "must be > 0", w)
        if L <= 0:
            raise ValidationError("loss", "must be > 0", L)
        if L >= w:
            raise ValidationError("loss", "must be < wealth", f"loss={L}, wealth={w}")
        if not 0 < p < 1:
            raise ValidationError("loss_prob", "must lie strictly between 0 and 1", p)
        if self.u1 <= 0:
            raise ValidationError("u1", "must be > 0", self.u1)
        if self.u2 < self.u1:
            raise ValidationError("u2", "must be >= u1", f"u1={self.u1}, u2={self.u2}")
        if self.u3 is not None and not self.u1 < self.u3 < self.u2:
            raise ValidationError("u3", "must lie strictly between u1 and u2", self.u3)
        if self.invest_return is not None and self.invest_return <= 0:
            raise ValidationError("invest_return", "must be > 0", self.invest_return)

    @property
    def exact(self) -> bool:
        values = [self.wealth, self.loss, self.loss_prob, self.u1, self.u2, self.u3, self.invest_return]
        return is_exact(*(v for v in values if v is not None))

    @property
    def insured_loss_slope(self) -> Number:
        """Slope in the loss state once a policy is held."""
        return self.u2 if self.u3 is None else self.u3


@dataclass(frozen=True)
class InsuranceContract:
    premium: Number
    deductible: Number
    expected_profit: Number


@dataclass(frozen=True)
class DiversificationReport:
    single: Number
    split: Number

    @property
    def gain(self) -> Number:
        return self.split - self.single


def expected_profit(s: InsuranceScenario, premium: Number, deductible: Number) -> Number:
    return premium - s.loss_prob * (s.loss - deductible)


def buyer_expected_utility(s: InsuranceScenario, premium: Number, deductible: Number) -> Number:
    p, u = s.loss_prob, s.insured_loss_slope
    return -((1 - p) * s.u1 + p * u) * premium - p * u * deductible


def no_insurance_expected_utility(s: InsuranceScenario) -> Number:
    return -s.loss_prob * s.u2 * s.loss


def no_insurance_certainty_equivalent(s: InsuranceScenario) -> Number:
    p = s.loss_prob
    return div(-p * s.u2 * s.loss, (1 - p) * s.u1 + p * s.u2)


def no_insurance_pora(s: InsuranceScenario) -> tuple[LinearUtilityProfile, PORA]:
    """The uninsured position as a profile and PORA, loss state first."""
    p = s.loss_prob
    return LinearUtilityProfile((s.u2, s.u1)), PORA((-s.loss, 0), (p, 1 - p))


def actuarially_fair_premium(s: InsuranceScenario) -> Number:
    return s.loss_prob * s.loss


def seller_premium_band(s: InsuranceScenario) -> tuple[Number, Number]:
    """Open interval of full-coverage premiums that both sides strictly prefer.

    The seller invests the premium at rate ``r``; any premium above
    ``pL / (1 + r)`` pays, and any premium below ``pL`` suits the buyer.
    """
    if s.invest_return is None:
        raise PreconditionError("seller_premium_band needs invest_return")
    fair = actuarially_fair_premium(s)
    return div(fair, 1 + s.invest_return), fair


def diversification_comparison(w, investment, p, u1, u2, u3) -> DiversificationReport:
    """Expected utility of staking ``investment`` on one venture vs. splitting it over two.

    Each venture fails independently with probability ``p``.  Slopes rise with
    the share lost: ``u1`` nothing, ``u2`` half, ``u3`` all.
    """
    w, investment, p, u1, u2, u3 = (coerce(v) for v in (w, investment, p, u1, u2, u3))
    if not 0 < investment < w:
        raise PreconditionError(f"investment must lie in (0, wealth), got {investment}")
    if not 0 < u1 < u2 < u3:
        raise PreconditionError(f"slopes must satisfy 0 < u1 < u2 < u3, got {(u1, u2, u3)}")
    if not 0 < p < 1:
        raise PreconditionError(f"failure probability must lie in (0, 1), got {p}")
    single = -p * u3 * investment
    split = -p * ((1 - p) * u2 + p * u3) * investment
    if not split > single:
        raise InvariantViolation(f"split {split} does not beat single {single}")
    return DiversificationReport(single, split)


def optimal_contract_two_son(s: InsuranceScenario, *, allow_degenerate: bool = False) -> InsuranceContract:
    """Profit-maximizing contract when the insured loss state keeps slope ``u2``.

    The buyer constraint binds and the deductible is zero; the premium is the
    negated no-insurance certainty equivalent ``p u2 L / ((1-p) u1 + p u2)``.
    ``u1 == u2`` leaves no surplus and is refused unless ``allow_degenerate``.
    """
    if s.u3 is not None:
        raise PreconditionError("scenario has u3; use optimal_contract_three_son")
    if s.u1 == s.u2 and not allow_degenerate:
        raise PreconditionError("u1 == u2: zero-profit boundary, no strictly profitable contract")
    p, L, u1, u2 = s.loss_prob, s.loss, s.u1, s.u2
    denom = (1 - p) * u1 + p * u2
    premium = div(p * u2 * L, denom)
    profit = div(p * (1 - p) * (u2 - u1) * L, denom)
    if u1 != u2 and not (premium > p * L and profit > 0):
        raise InvariantViolation(f"premium {premium} / profit {profit} not strictly above break-even")
    return InsuranceContract(premium, 0, profit)


def optimal_contract_three_son(s: InsuranceScenario) -> InsuranceContract:
    """Profit-maximizing contract when a policy holder's loss state has slope ``u3``.

    Premium ``p u2 L / ((1-p) u1 + p u3)`` with zero deductible; both premium
    and profit exceed the two-state values for the same scenario.
    """
    if s.u3 is None:
        raise PreconditionError("scenario has no u3")
    p, L, u1, u2, u3 = s.loss_prob, s.loss, s.u1, s.u2, s.u3
    premium = div(p * u2 * L, (1 - p) * u1 + p * u3)
    contract = InsuranceContract(premium, 0, premium - p * L)
    two = optimal_contract_two_son(
        InsuranceScenario(s.wealth, L, p, u1, u2, invest_return=s.invest_return), allow_degenerate=True
    )
    if not (contract.premium > two.premium and contract.expected_profit > two.expected_profit):
        raise InvariantViolation("three-state contract does not improve on the two-state contract")
    return contract


def optimal_contract(s: InsuranceScenario, *, allow_degenerate: bool = False) -> InsuranceContract:
    if s.u3 is None:
        return optimal_contract_two_son(s, allow_degenerate=allow_degenerate)
    return optimal_contract_three_son(s)


def premium_grid_upper(s: InsuranceScenario) -> float:
    """Upper end of the oracle's premium axis; every optimal premium is at most ``p L u2 / u1``."""
    return float(2 * s.loss_prob * s.loss * s.u2 / s.u1)


def grid_oracle_optimal_contract(
    s: InsuranceScenario, resolution: int = 2000, *, resolve_ties: bool = True, chunk: int = 256
) -> InsuranceContract:
    """Brute-force the insurer's problem on a ``resolution x resolution`` grid.

    Premiums span ``[0, 2 p L u2 / u1]`` and deductibles ``[0, L]``, both
    endpoints included.  Every grid point is tested against both participation
    constraints; the best feasible point is returned.

    The objective's slope along the deductible axis can be far smaller than
    the premium grid step, so the raw argmax may sit deductible cells away from
    the true corner purely through premium rounding.  With ``resolve_ties``
    (the default) the grid cannot tell apart objectives within one premium
    step of the best, and among those the smallest deductible wins.
    ``resolve_ties=False`` returns the raw first argmax.
    """
    if resolution < 2:
        raise PreconditionError("resolution must be at least 2")
    p, L = float(s.loss_prob), float(s.loss)
    u1, u2, u = float(s.u1), float(s.u2), float(s.insured_loss_slope)
    premiums = np.linspace(0.0, premium_grid_upper(s), resolution)
    deductibles = np.linspace(0.0, L, resolution)
    step = premiums[1] - premiums[0]
    a = (1 - p) * u1 + p * u
    slack = 1e-12 * (1 + p * u2 * L)

    best_premium = np.full(resolution, -1, dtype=np.int64)
    for start in range(0, resolution, chunk):
        d = deductibles[start:start + chunk, None]
        pi = premiums[None, :]
        feasible = (pi + p * d >= p * L - slack) & (a * pi + p * u * d <= p * u2 * L + slack)
        # within a row the feasible premiums form an interval; keep its top end
        has_any = feasible.any(axis=1)
        last = resolution - 1 - np.argmax(feasible[:, ::-1], axis=1)
        best_premium[start:start + chunk] = np.where(has_any, last, -1)

    rows = np.flatnonzero(best_premium >= 0)
    if rows.size == 0:
        raise InvariantViolation("oracle found no feasible contract on the grid")
    objective = premiums[best_premium[rows]] + p * deductibles[rows] - p * L
    if resolve_ties:
        # rows are in increasing deductible order
        pick = rows[np.argmax(objective >= objective.max() - step * (1 + 1e-9))]
    else:
        pick = rows[np.argmax(objective)]
    premium = float(premiums[best_premium[pick]])
    deductible = float(deductibles[pick])
    return InsuranceContract(premium, deductible, premium - p * (L - deductible))


def strict_profitability_holds(s: InsuranceScenario) -> bool:
    """Whether the uninsured agent is risk averse toward ``((-L, 0), (p, 1 - p))``.

    This is the condition for an insurer to extract a strictly positive
    expected profit, and it holds exactly when ``u2 > u1``.
    """
    profile, pora = no_insurance_pora(s)
    return classify_risk_attitude(profile, pora) is RiskAttitude.AVERSE


def full_coverage_gain(s: InsuranceScenario, premium: Number | None = None) -> Number:
    """Buyer's utility gain from full coverage at ``premium`` (default: actuarially fair)."""
    premium = actuarially_fair_premium(s) if premium is None else premium
    p = s.loss_prob
    return -((1 - p) * s.u1 + p * s.u2) * premium - no_insurance_expected_utility(s)


__all__ = [
    "DiversificationReport",
    "InsuranceContract",
    "InsuranceScenario",
    "actuarially_fair_premium",
    "buyer_expected_utility",
    "diversification_comparison",
    "expected_profit",
    "full_coverage_gain",
    "grid_oracle_optimal_contract",
    "no_insurance_certainty_equivalent",
    "no_insurance_expected_utility",
    "no_insurance_pora",
    "optimal_contract",
    "optimal_contract_three_son",
    "optimal_contract_two_son",
    "premium_grid_upper",
    "seller_premium_band",
    "strict_profitability_holds",
]
