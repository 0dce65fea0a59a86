"""Acceptance gate: one test per criterion, each at its stated tolerance and time budget.

A pass/fail line per criterion is printed in the terminal summary (see conftest).
"""

from __future__ import annotations

import io
import itertools
import json
import math
import random
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from sdlu import almostlinear as al
from sdlu import ambiguity as amb
from sdlu import insurance as ins
from sdlu import stochastic as st
from sdlu.cli import main, parse_scenario, serialize_scenario
from sdlu.core import (
    PORA,
    RiskAttitude,
    certainty_equivalent,
    classify_risk_attitude,
    expected_utility,
    expected_utility_telescoped,
)

DATA = Path(__file__).parent / "data"
X3 = (0, 1, 2)


class Budget:
    def __init__(self, seconds: float):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f}s, budget {self.seconds}s"


@pytest.mark.criterion(1, "two-state reference certainty equivalents and attitudes")
def test_criterion_1_two_state_reference():
    cases = [((2, 0), F(2, 3), RiskAttitude.AVERSE), ((0, 2), F(4, 3), RiskAttitude.LOVING), ((1, 1), 1, RiskAttitude.NEUTRAL)]
    with Budget(1):
        for x, ce, attitude in cases:
            exact = PORA(x, (F(1, 2), F(1, 2)))
            assert certainty_equivalent((1, 2), exact) == ce
            assert classify_risk_attitude((1, 2), exact) is attitude
            floats = PORA(tuple(float(v) for v in x), (0.5, 0.5))
            assert abs(certainty_equivalent((1.0, 2.0), floats) - float(ce)) <= 1e-12
            assert classify_risk_attitude((1.0, 2.0), floats) is attitude


@pytest.mark.criterion(2, "telescoped expected utility matches the direct sum")
def test_criterion_2_telescoping():
    rng = random.Random(2)
    with Budget(1):
        for _ in range(1000):
            size = rng.randint(2, 8)
            u = [rng.uniform(0.01, 10) for _ in range(size)]
            x = [rng.uniform(-100, 100) for _ in range(size)]
            w = [rng.uniform(0.01, 1) for _ in range(size)]
            p = [v / math.fsum(w) for v in w]
            a = PORA(x, p)
            direct, telescoped = expected_utility(u, a), expected_utility_telescoped(u, a)
            scale = max(abs(uj * xj) for uj, xj in zip(u, x))
            assert abs(direct - telescoped) <= 1e-9 * (1 + scale)


@pytest.mark.criterion(3, "dominance characterization on the denominator-6 grid")
def test_criterion_3_prop1_grid():
    grid = st.probability_grid(3, 6)
    forward = reverse = 0
    with Budget(30):
        for seed, (p, q) in enumerate(itertools.permutations(grid, 2)):
            report = st.verify_prop1(X3, p, q, 200, seed=seed)
            assert report.passed, report.line()
            if report.direction == "forward":
                forward += 1
                assert report.samples == 200 and all(m > 0 for m in report.margins)
            else:
                reverse += 1
                assert report.direction == "reverse"
                assert report.margins[0] <= F(-3, 2)
    assert forward + reverse == 90 and forward > 0 and reverse > 0


@pytest.mark.criterion(4, "spreads lower expected utility for increasing-concave profiles")
def test_criterion_4_prop2a():
    rng = random.Random(4)
    with Budget(10):
        for i in range(500):
            size = 3 + i % 3
            x = tuple(sorted(rng.sample(range(-20, 21), size)))
            p, q, _ = st.random_mean_preserving_spread(x, rng)
            report = st.verify_prop2a(x, p, q, 50, rng)
            assert report.passed and report.samples == 50, report.line()


@pytest.mark.criterion(5, "three-state converse via witness search")
def test_criterion_5_prop2b():
    grid = st.probability_grid(3, 6)
    checked = 0
    with Budget(30):
        for p, q in itertools.permutations(grid, 2):
            same_mean = p[1] + 2 * p[2] == q[1] + 2 * q[2]
            if not same_mean or p[1] == q[1] or st.is_mean_preserving_spread(X3, p, q) is not None:
                continue
            report = st.verify_prop2b(X3, p, q)
            assert report.direction == "contrapositive" and report.passed, report.line()
            u = report.witness
            assert st.is_increasing_concave(u, X3)
            assert expected_utility(u, PORA(X3, p)) <= expected_utility(u, PORA(X3, q))
            checked += 1
    assert checked > 0


def _random_scenario(rng: random.Random, three: bool = False) -> ins.InsuranceScenario:
    loss = rng.uniform(1, 1000)
    u1 = rng.uniform(0.1, 5)
    u2 = u1 * rng.uniform(1.01, 4)
    u3 = rng.uniform(u1, u2) if three else None
    return ins.InsuranceScenario(loss * rng.uniform(1.1, 3), loss, rng.uniform(0.01, 0.99), u1, u2, u3)


@pytest.mark.criterion(6, "insurance closed form against the grid oracle")
def test_criterion_6_insurance_oracle():
    ref = ins.optimal_contract_two_son(ins.InsuranceScenario(1000, 100, F(1, 10), 1, 2))
    assert (ref.premium, ref.deductible, ref.expected_profit) == (F(200, 11), 0, F(90, 11))
    rng = random.Random(6)
    with Budget(60):
        for _ in range(100):
            s = _random_scenario(rng)
            closed = ins.optimal_contract_two_son(s)
            oracle = ins.grid_oracle_optimal_contract(s, 2000)
            step = ins.premium_grid_upper(s) / 1999
            assert abs(closed.premium - oracle.premium) <= step
            assert oracle.deductible == 0
            p, L, u1, u2 = s.loss_prob, s.loss, s.u1, s.u2
            formula = p * (1 - p) * (u2 - u1) * L / ((1 - p) * u1 + p * u2)
            assert abs(formula - (closed.premium - p * L)) <= 1e-9 * (1 + abs(formula))
            u3 = rng.uniform(u1, u2)
            if u1 < u3 < u2:
                three = ins.optimal_contract_three_son(ins.InsuranceScenario(s.wealth, L, p, u1, u2, u3))
                assert three.premium > closed.premium


@pytest.mark.criterion(7, "strict profitability iff risk aversion iff u2 > u1")
def test_criterion_7_strict_profitability():
    rng = random.Random(7)
    with Budget(1):
        for i in range(1001):
            loss = rng.randint(1, 1000)
            u1 = F(rng.randint(1, 100), 10)
            u2 = u1 if i == 1000 or i % 10 == 0 else u1 + F(rng.randint(1, 100), 10)
            s = ins.InsuranceScenario(2 * loss, loss, F(rng.randint(1, 99), 100), u1, u2)
            profile, pora = ins.no_insurance_pora(s)
            averse = classify_risk_attitude(profile, pora) is RiskAttitude.AVERSE
            assert ins.strict_profitability_holds(s) == averse == (u2 > u1)
    boundary = ins.InsuranceScenario(200, 100, F(1, 10), 1, 1)
    assert not ins.strict_profitability_holds(boundary)


def _random_almost_linear(rng: random.Random) -> al.AlmostLinearUtility:
    wealth = rng.randint(20, 500)
    n, m = rng.randint(1, 4), rng.randint(1, 4)
    inner = sorted(rng.sample(range(1, wealth), n - 1))
    gains = sorted(rng.sample(range(1, 1000), m - 1))
    loss_slopes = sorted(F(v, 10) for v in rng.sample(range(1, 100), n))
    gain_slopes = sorted(F(v, 10) for v in rng.sample(range(1, 100), m))
    sides = ("left", "right")
    return al.AlmostLinearUtility(
        wealth,
        tuple(-b for b in inner) + (-wealth,),
        tuple(loss_slopes),
        tuple(gains),
        tuple(gain_slopes),
        tuple(rng.choice(sides) for _ in range(n - 1)),
        tuple(rng.choice(sides) for _ in range(m - 1)),
    )


@pytest.mark.criterion(8, "almost linear breakpoints: monotonicity, side rule, CE sign")
def test_criterion_8_almost_linear():
    gain = al.AlmostLinearUtility(20, (-20,), (2,), (10,), (1, 2))
    loss = al.AlmostLinearUtility(20, (-10, -20), (2, 3), (), (1,))
    assert al.perturbation_certainty_equivalent(gain, 1, 1) == F(31, 3)
    assert al.perturbation_certainty_equivalent(loss, -1, 1) == F(-51, 5)
    rng = random.Random(8)
    with Budget(5):
        for _ in range(200):
            alu = _random_almost_linear(rng)
            points = sorted(set(alu.edges()) | {F(rng.randint(-alu.wealth * 10, 10_000), 10) for _ in range(40)})
            values = [al.evaluate(alu, v) for v in points]
            assert all(a < b for a, b in zip(values, values[1:]))
            for k in alu.interior_breakpoints():
                b = alu.breakpoint(k)
                expected = RiskAttitude.AVERSE if alu.side(k) is al.Side.RIGHT else RiskAttitude.LOVING
                widest = 4 * al.default_delta(alu, k)
                for share in range(1, 6):
                    delta = widest * F(share, 6)
                    assert al.risk_attitude_at_breakpoint(alu, k, delta) is expected
                    ce = al.perturbation_certainty_equivalent(alu, k, delta)
                    assert ce > b if b > 0 else ce < b


@pytest.mark.criterion(9, "MIN-PORA expected utility is a lower bound over all selections")
def test_criterion_9_ambiguity():
    rng = random.Random(9)
    with Budget(5):
        for _ in range(100):
            size = rng.randint(2, 4)
            sets = tuple(tuple(rng.sample(range(-20, 21), rng.randint(1, 3))) for _ in range(size))
            weights = [rng.randint(1, 20) for _ in range(size)]
            probs = tuple(F(w, sum(weights)) for w in weights)
            pairs = []
            for _ in range(size):
                up = F(rng.randint(1, 30), 10)
                pairs.append((up + F(rng.randint(0, 30), 10), up))
            g = amb.GeneralizedPORA(sets, probs)
            sp = amb.SignDependentProfile(tuple(pairs))
            floor = amb.min_expected_utility(sp, g)
            worst = tuple(min(c) for c in sets)
            for selection in g.selections():
                value = amb.sign_dependent_expected_utility(sp, selection)
                assert floor <= value
                assert (value == floor) == (selection.returns.entries == worst)


@pytest.mark.criterion(10, "CLI golden report, round trip and deterministic JSON")
def test_criterion_10_cli():
    source = DATA / "two_state.json"
    with Budget(5):
        out, err = io.StringIO(), io.StringIO()
        assert main(["eval", "--input", str(source)], stdout=out, stderr=err) == 0
        assert out.getvalue() == (DATA / "two_state_report.txt").read_text()

        doc = parse_scenario(source.read_bytes())
        assert parse_scenario(serialize_scenario(doc)) == doc

        verify = json.dumps({"kind": "verify", "payload": {"returns": [0, 1, 2], "denominator": 6, "samples": 20,
                                                           "concave_samples": 20, "search_budget": 100}})
        outputs = []
        for _ in range(2):
            buf = io.StringIO()
            assert main(["verify", "--format", "json", "--seed", "11"], stdin=io.StringIO(verify), stdout=buf) == 0
            outputs.append(buf.getvalue())
        assert outputs[0] == outputs[1]
        assert json.loads(outputs[0])["results"]["summary"] == "Prop1: pass, Prop2a: pass, Prop2b: pass"
