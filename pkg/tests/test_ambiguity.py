from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sdlu.ambiguity import (
    GeneralizedPORA,
    SignDependentProfile,
    min_expected_utility,
    min_pora,
    sign_dependent_expected_utility,
)
from sdlu.core import PORA
from sdlu.errors import DimensionMismatch, ValidationError
from strategies import probability_vectors

HALF = (F(1, 2), F(1, 2))
LOSS_AVERSE = SignDependentProfile(((2, 1), (2, 1)))


@st.composite
def ambiguous_cases(draw, max_states=4, max_candidates=3):
    size = draw(st.integers(2, max_states))
    sets = tuple(
        tuple(draw(st.lists(st.integers(-20, 20), min_size=1, max_size=max_candidates, unique=True)))
        for _ in range(size)
    )
    probs = draw(probability_vectors(size))
    pairs = []
    for _ in range(size):
        gain = draw(st.integers(1, 30))
        pairs.append((F(gain + draw(st.integers(0, 30)), 10), F(gain, 10)))
    return GeneralizedPORA(sets, probs), SignDependentProfile(tuple(pairs))


def test_min_pora_examples():
    assert min_pora(GeneralizedPORA(((1, 3), (0, 2)), HALF)).returns.entries == (1, 0)
    assert min_pora(GeneralizedPORA(((4,), (7,)), HALF)).returns.entries == (4, 7)
    assert min_pora(GeneralizedPORA(((-1, 5), (2,)), (0.3, 0.7))).returns.entries == (-1, 2)


def test_sign_dependent_expected_utility_examples():
    assert sign_dependent_expected_utility(LOSS_AVERSE, PORA((1, 0), HALF)) == F(1, 2)
    assert sign_dependent_expected_utility(LOSS_AVERSE, PORA((0, 0), HALF)) == 0
    assert abs(sign_dependent_expected_utility(LOSS_AVERSE, PORA((-1, 2), (0.3, 0.7))) - 0.8) < 1e-12


def test_min_expected_utility_examples():
    assert min_expected_utility(LOSS_AVERSE, GeneralizedPORA(((1, 3), (0, 2)), HALF)) == F(1, 2)
    single = GeneralizedPORA(((3,), (-4,)), HALF)
    assert min_expected_utility(LOSS_AVERSE, single) == sign_dependent_expected_utility(
        LOSS_AVERSE, PORA((3, -4), HALF)
    )
    value = min_expected_utility(LOSS_AVERSE, GeneralizedPORA(((-1, 5), (2, 9)), (0.3, 0.7)))
    assert abs(value - 0.8) < 1e-12


def test_validation():
    with pytest.raises(ValidationError):
        SignDependentProfile(((1, 2), (2, 1)))
    with pytest.raises(ValidationError):
        SignDependentProfile(((2, 0), (2, 1)))
    with pytest.raises(ValidationError):
        GeneralizedPORA(((1,), ()), HALF)
    with pytest.raises(DimensionMismatch):
        GeneralizedPORA(((1,), (2,), (3,)), HALF)


def test_candidate_sets_are_normalized():
    g = GeneralizedPORA(((3, 1, 3), (2,)), HALF)
    assert g.candidate_returns == ((1, 3), (2,))
    assert len(list(g.selections())) == 2


@given(ambiguous_cases())
def test_min_expected_utility_is_a_lower_bound(case):
    g, sp = case
    floor = min_expected_utility(sp, g)
    worst = min_pora(g).returns.entries
    for selection in g.selections():
        value = sign_dependent_expected_utility(sp, selection)
        assert floor <= value
        assert (value == floor) == (selection.returns.entries == worst)


@given(ambiguous_cases(), st.integers(0, 3), st.integers(1, 10))
def test_raising_a_return_never_lowers_utility(case, state, bump):
    g, sp = case
    state %= len(g)
    x = list(min_pora(g).returns.entries)
    base = sign_dependent_expected_utility(sp, PORA(tuple(x), g.probs))
    x[state] += bump
    assert sign_dependent_expected_utility(sp, PORA(tuple(x), g.probs)) > base
