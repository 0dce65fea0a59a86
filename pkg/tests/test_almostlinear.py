from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sdlu.almostlinear import (
    AlmostLinearUtility,
    Side,
    default_delta,
    derive_state_profile,
    evaluate,
    perturbation_certainty_equivalent,
    perturbation_pora,
    risk_attitude_at_breakpoint,
)
from sdlu.core import RiskAttitude
from sdlu.errors import PreconditionError, ValidationError


def gain_only(side="right"):
    """x_1 = 10 with slopes 1 then 2; single loss segment of slope 2."""
    return AlmostLinearUtility(20, (-20,), (2,), (10,), (1, 2), gain_sides=(side,))


def loss_kink(side="right"):
    """x_{-1} = -10 with slopes 2 (above) and 3 (below)."""
    return AlmostLinearUtility(20, (-10, -20), (2, 3), (), (1,), loss_sides=(side,))


@st.composite
def instances(draw):
    wealth = draw(st.integers(10, 200))
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 4))
    inner = sorted(draw(st.lists(st.integers(1, wealth - 1), min_size=n - 1, max_size=n - 1, unique=True)))
    loss_bps = tuple(-b for b in inner) + (-wealth,)
    gain_bps = tuple(sorted(draw(st.lists(st.integers(1, 500), min_size=m - 1, max_size=m - 1, unique=True))))
    loss_slopes = tuple(sorted(draw(st.lists(st.integers(1, 60), min_size=n, max_size=n, unique=True))))
    gain_slopes = tuple(sorted(draw(st.lists(st.integers(1, 60), min_size=m, max_size=m, unique=True))))
    sides = st.sampled_from(["left", "right"])
    loss_sides = tuple(draw(st.lists(sides, min_size=n - 1, max_size=n - 1)))
    gain_sides = tuple(draw(st.lists(sides, min_size=m - 1, max_size=m - 1)))
    return AlmostLinearUtility(
        wealth,
        loss_bps,
        tuple(F(s, 10) for s in loss_slopes),
        gain_bps,
        tuple(F(s, 10) for s in gain_slopes),
        loss_sides,
        gain_sides,
    )


# --- validation -------------------------------------------------------------------


def test_last_loss_breakpoint_must_be_minus_wealth():
    with pytest.raises(ValidationError):
        AlmostLinearUtility(20, (-10,), (2,), (), (1,))


def test_slopes_must_increase_away_from_zero():
    with pytest.raises(ValidationError):
        AlmostLinearUtility(20, (-20,), (2,), (10,), (2, 1))
    with pytest.raises(ValidationError):
        AlmostLinearUtility(20, (-10, -20), (3, 2), (), (1,))


def test_sides_length_checked():
    with pytest.raises(ValidationError):
        AlmostLinearUtility(20, (-20,), (2,), (10,), (1, 2), gain_sides=("left", "right"))


def test_relaxed_instance_allows_equal_slopes():
    with pytest.raises(ValidationError):
        AlmostLinearUtility(20, (-20,), (2,), (10,), (1, 1))
    AlmostLinearUtility.relaxed(20, (-20,), (2,), (10,), (1, 1))


# --- evaluation --------------------------------------------------------------------


def test_evaluate_examples():
    alu = gain_only()
    assert evaluate(alu, 5) == 5
    assert evaluate(alu, 20) == 40
    assert evaluate(alu, 0) == 0
    assert evaluate(gain_only("right"), 10) == 20
    assert evaluate(gain_only("left"), 10) == 10


def test_evaluate_below_minus_wealth_rejected():
    with pytest.raises(PreconditionError):
        evaluate(gain_only(), -21)
    assert evaluate(gain_only(), -20) == -40


def test_loss_side_values():
    assert evaluate(loss_kink("right"), -10) == -20
    assert evaluate(loss_kink("left"), -10) == -30
    assert evaluate(loss_kink(), -15) == -45


# --- breakpoint attitudes --------------------------------------------------------------


def test_gain_breakpoint_attitudes():
    assert risk_attitude_at_breakpoint(gain_only("left"), 1, 1) is RiskAttitude.LOVING
    assert risk_attitude_at_breakpoint(gain_only("right"), 1, 1) is RiskAttitude.AVERSE


def test_loss_breakpoint_attitudes():
    assert risk_attitude_at_breakpoint(loss_kink("right"), -1, 1) is RiskAttitude.AVERSE
    assert risk_attitude_at_breakpoint(loss_kink("left"), -1, 1) is RiskAttitude.LOVING


def test_perturbation_expected_utility_example():
    pora = perturbation_pora(gain_only(), 1, 1)
    assert pora.returns.entries == (9, 11)
    alu = loss_kink()
    pora = perturbation_pora(alu, -1, 1)
    assert sum(p * evaluate(alu, r) for r, p in zip(pora.returns, pora.probs)) == F(-51, 2)


def test_perturbation_certainty_equivalents():
    assert perturbation_certainty_equivalent(gain_only(), 1, 1) == F(31, 3)
    assert perturbation_certainty_equivalent(loss_kink(), -1, 1) == F(-51, 5)


def test_perturbation_certainty_equivalent_without_kink():
    alu = AlmostLinearUtility.relaxed(20, (-20,), (2,), (10,), (1, 1))
    assert perturbation_certainty_equivalent(alu, 1, 1) == 10
    assert risk_attitude_at_breakpoint(alu, 1, 1) is RiskAttitude.NEUTRAL


def test_delta_must_stay_inside_adjacent_segments():
    with pytest.raises(PreconditionError):
        perturbation_pora(gain_only(), 1, 10)
    with pytest.raises(PreconditionError):
        perturbation_pora(gain_only(), 1, 0)
    assert default_delta(gain_only(), 1) == F(5, 2)


def test_breakpoint_zero_is_not_a_kink():
    with pytest.raises(PreconditionError):
        gain_only().breakpoint(0)


# --- state profile ---------------------------------------------------------------------


def test_state_profile_three_events():
    profile = derive_state_profile(gain_only())
    assert [str(e) for e in profile.events] == ["[-20, 0) slope 2", "[0, 10) slope 1", "[10, inf) slope 2"]


def test_state_profile_minimal_case():
    alu = AlmostLinearUtility(20, (-20,), (3,), (), (1,))
    assert [str(e) for e in derive_state_profile(alu).events] == ["[-20, 0) slope 3", "[0, inf) slope 1"]


def test_state_profile_loss_layout():
    alu = AlmostLinearUtility(50, (-10, -50), (2, 3), (), (1,))
    events = derive_state_profile(alu).events
    assert [(e.lower, e.upper, e.slope) for e in events[:2]] == [(-50, -10, 3), (-10, 0, 2)]


# --- properties --------------------------------------------------------------------------


@given(instances(), st.data())
def test_strictly_increasing(alu, data):
    xs = sorted(set(data.draw(st.lists(st.integers(-int(alu.wealth), 600), min_size=2, max_size=30))))
    points = sorted(set(xs) | set(alu.edges()))
    values = [evaluate(alu, x) for x in points]
    assert all(a < b for a, b in zip(values, values[1:]))


@given(instances(), st.integers(1, 5))
def test_breakpoint_attitude_follows_side(alu, share):
    for k in alu.interior_breakpoints():
        delta = default_delta(alu, k) * 4 * F(share, 6)
        expected = RiskAttitude.AVERSE if alu.side(k) is Side.RIGHT else RiskAttitude.LOVING
        assert risk_attitude_at_breakpoint(alu, k, delta) is expected


@given(instances(), st.integers(1, 5))
def test_certainty_equivalent_moves_away_from_zero(alu, share):
    for k in alu.interior_breakpoints():
        delta = default_delta(alu, k) * 4 * F(share, 6)
        ce = perturbation_certainty_equivalent(alu, k, delta)
        b = alu.breakpoint(k)
        assert ce > b if b > 0 else ce < b


@given(instances(), st.data())
def test_state_profile_matches_utility(alu, data):
    profile = derive_state_profile(alu)
    for x in data.draw(st.lists(st.integers(-int(alu.wealth), 600), min_size=1, max_size=20)) + alu.edges():
        assert profile.utility(x) == evaluate(alu, x)
