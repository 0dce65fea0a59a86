"""Command-line front end: JSON scenario documents in, reports out.

A scenario document is a UTF-8 JSON object::

    {"kind": "pora_eval", "metadata": {"label": "..."}, "payload": {...}}

Numbers may be JSON numbers or strings such as ``"2/3"``; strings are read as
exact rationals, and a computation stays exact as long as every number it
touches is exact.  ``--exact`` converts every decimal in the payload to the
rational it spells before running.

Exit codes: 0 success, 2 invalid input, 3 failed internal check.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import almostlinear as al
from . import ambiguity as amb
from . import core
from . import insurance as ins
from . import stochastic as st
from ._numeric import Number, close, exactify, fmt, is_exact, parse_number
from .errors import InvariantViolation, PreconditionError, ValidationError

COMMANDS = {
    "eval": "pora_eval",
    "dominance": "dominance",
    "spread": "spread",
    "insure": "insurance",
    "almost": "almost_linear",
    "ambiguity": "ambiguity",
    "verify": "verify",
}

_PORA_FIELDS = {"returns": ("vector", True), "probs": ("vector", True)}
_EVAL_FIELDS = {"profile": ("vector", True), **_PORA_FIELDS}

SCHEMAS: dict[str, dict[str, tuple[Any, bool]]] = {
    "pora_eval": {**_EVAL_FIELDS, "reference": (_EVAL_FIELDS, False)},
    "dominance": {"a": (_PORA_FIELDS, True), "b": (_PORA_FIELDS, True)},
    "spread": {
        "returns": ("vector", True),
        "p": ("vector", True),
        "q": ("vector", True),
        "profile": ("vector", False),
    },
    "insurance": {
        "wealth": ("number", True),
        "loss": ("number", True),
        "loss_prob": ("number", True),
        "u1": ("number", True),
        "u2": ("number", True),
        "u3": ("number", False),
        "invest_return": ("number", False),
        "diversification": (
            {
                "investment": ("number", True),
                "fail_prob": ("number", True),
                "u1": ("number", True),
                "u2": ("number", True),
                "u3": ("number", True),
            },
            False,
        ),
    },
    "almost_linear": {
        "wealth": ("number", True),
        "loss_breakpoints": ("vector", True),
        "loss_slopes": ("vector", True),
        "gain_breakpoints": ("vector", False),
        "gain_slopes": ("vector", True),
        "loss_sides": ("strings", False),
        "gain_sides": ("strings", False),
        "evaluate_at": ("vector", False),
        "delta": ("number", False),
    },
    "ambiguity": {
        "candidate_returns": ("matrix", True),
        "probs": ("vector", True),
        "profile": ("matrix", True),
    },
    "verify": {
        "returns": ("vector", True),
        "denominator": ("count", True),
        "samples": ("count", False),
        "concave_samples": ("count", False),
        "search_budget": ("count", False),
    },
}


class ScenarioError(ValueError):
    """A scenario document failed to parse or validate.

    ``path`` is the dotted location of the first offending field.
    """

    def __init__(self, path: str, constraint: str, observed: Any = None):
        self.path = path
        self.constraint = constraint
        self.observed = observed
        message = f"{path} {constraint}"
        if observed is not None:
            message += f" (observed {observed})"
        super().__init__(message)


@dataclass(frozen=True)
class ScenarioDocument:
    kind: str
    payload: dict
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RunOptions:
    seed: int = 0
    oracle: int | None = None
    exact: bool = False
    delta: Number | None = None


# --------------------------------------------------------------------------
# parsing


def _number(value, path: str) -> Number:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ScenarioError(path, "must be a number or a rational string 'a/b'", json.dumps(value))
    if isinstance(value, str):
        try:
            return parse_number(value)
        except ValidationError:
            raise ScenarioError(path, "must be a number or a rational string 'a/b'", repr(value)) from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ScenarioError(path, "must be finite", value)
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(path, "must be an array", json.dumps(value))
    return value


def _normalize(value, kind, path: str):
    if isinstance(kind, dict):
        return _normalize_object(value, kind, path)
    if kind == "number":
        return _number(value, path)
    if kind == "vector":
        return [_number(v, f"{path}[{i}]") for i, v in enumerate(_list(value, path))]
    if kind == "matrix":
        return [
            [_number(v, f"{path}[{i}][{j}]") for j, v in enumerate(_list(row, f"{path}[{i}]"))]
            for i, row in enumerate(_list(value, path))
        ]
    if kind == "strings":
        items = _list(value, path)
        for i, v in enumerate(items):
            if not isinstance(v, str):
                raise ScenarioError(f"{path}[{i}]", "must be a string", json.dumps(v))
        return list(items)
    if kind == "count":
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ScenarioError(path, "must be a non-negative integer", json.dumps(value))
        return value
    raise AssertionError(kind)


def _normalize_object(value, schema: dict, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(path, "must be an object", json.dumps(value))
    for key in value:
        if key not in schema:
            raise ScenarioError(f"{path}.{key}", "is not a known field", None)
    out = {}
    for key, (kind, required) in schema.items():
        if key not in value:
            if required:
                raise ScenarioError(f"{path}.{key}", "is required", None)
            continue
        out[key] = _normalize(value[key], kind, f"{path}.{key}")
    return out


@contextlib.contextmanager
def _at(path: str):
    """Re-raise domain validation errors against a document path."""
    try:
        yield
    except ValidationError as exc:
        where = f"{path}.{exc.field}" if exc.field and not path.endswith(exc.field) else path
        raise ScenarioError(where, exc.constraint, exc.observed) from None
    except PreconditionError as exc:
        raise ScenarioError(path, str(exc), None) from None


def _pora(obj: dict, path: str) -> core.PORA:
    with _at(f"{path}.returns"):
        returns = core.ReturnVector(tuple(obj["returns"]))
    with _at(f"{path}.probs"):
        probs = core.ProbabilityVector(tuple(obj["probs"]))
    with _at(path):
        return core.PORA(returns, probs)


def _profile(values, path: str) -> core.LinearUtilityProfile:
    with _at(path):
        return core.LinearUtilityProfile(tuple(values))


def _build(kind: str, payload: dict) -> dict:
    """Construct the typed inputs of a payload; raises ScenarioError on any invariant violation."""
    P = "payload"
    if kind == "pora_eval":
        built = {"profile": _profile(payload["profile"], f"{P}.profile"), "pora": _pora(payload, P)}
        if len(built["profile"]) != len(built["pora"]):
            raise ScenarioError(f"{P}.profile", "must have one slope per state", len(built["profile"]))
        if "reference" in payload:
            ref = payload["reference"]
            built["ref_profile"] = _profile(ref["profile"], f"{P}.reference.profile")
            built["ref_pora"] = _pora(ref, f"{P}.reference")
            if len(built["ref_profile"]) != len(built["ref_pora"]):
                raise ScenarioError(f"{P}.reference.profile", "must have one slope per state", None)
        return built
    if kind == "dominance":
        return {"a": _pora(payload["a"], f"{P}.a"), "b": _pora(payload["b"], f"{P}.b")}
    if kind == "spread":
        with _at(f"{P}.returns"):
            x = st._increasing_returns(payload["returns"], 3)
        built = {"x": x}
        for name in ("p", "q"):
            with _at(f"{P}.{name}"):
                built[name] = st._probs(payload[name], len(x), name)
        if "profile" in payload:
            built["profile"] = _profile(payload["profile"], f"{P}.profile")
            if len(built["profile"]) != len(x):
                raise ScenarioError(f"{P}.profile", "must have one slope per state", None)
        return built
    if kind == "insurance":
        with _at(P):
            scenario = ins.InsuranceScenario(
                payload["wealth"], payload["loss"], payload["loss_prob"], payload["u1"], payload["u2"],
                payload.get("u3"), payload.get("invest_return"),
            )
        built = {"scenario": scenario}
        if "diversification" in payload:
            d = payload["diversification"]
            if not 0 < d["investment"] < scenario.wealth:
                raise ScenarioError(f"{P}.diversification.investment", "must be > 0 and < wealth", d["investment"])
            if not 0 < d["fail_prob"] < 1:
                raise ScenarioError(f"{P}.diversification.fail_prob", "must lie strictly between 0 and 1", d["fail_prob"])
            if not 0 < d["u1"] < d["u2"] < d["u3"]:
                raise ScenarioError(f"{P}.diversification", "slopes must satisfy 0 < u1 < u2 < u3", None)
            built["diversification"] = d
        return built
    if kind == "almost_linear":
        with _at(P):
            alu = al.AlmostLinearUtility(
                payload["wealth"],
                tuple(payload["loss_breakpoints"]),
                tuple(payload["loss_slopes"]),
                tuple(payload.get("gain_breakpoints", ())),
                tuple(payload["gain_slopes"]),
                payload.get("loss_sides"),
                payload.get("gain_sides"),
            )
        for i, x in enumerate(payload.get("evaluate_at", [])):
            if x < -alu.wealth:
                raise ScenarioError(f"{P}.evaluate_at[{i}]", "must be >= -wealth", x)
        if "delta" in payload and not payload["delta"] > 0:
            raise ScenarioError(f"{P}.delta", "must be > 0", payload["delta"])
        return {"alu": alu}
    if kind == "ambiguity":
        with _at(f"{P}.probs"):
            probs = core.ProbabilityVector(tuple(payload["probs"]))
        with _at(f"{P}.candidate_returns"):
            g = amb.GeneralizedPORA(tuple(tuple(r) for r in payload["candidate_returns"]), probs)
        with _at(f"{P}.profile"):
            sp = amb.SignDependentProfile(tuple(tuple(r) for r in payload["profile"]))
        if len(sp) != len(g):
            raise ScenarioError(f"{P}.profile", "must have one slope pair per state", f"{len(sp)} vs {len(g)}")
        return {"g": g, "sp": sp}
    if kind == "verify":
        with _at(f"{P}.returns"):
            x = st._increasing_returns(payload["returns"], 3)
        with _at(f"{P}.denominator"):
            grid = st.probability_grid(len(x), payload["denominator"])
        return {"x": x, "grid": grid}
    raise AssertionError(kind)


def _validate(raw) -> ScenarioDocument:
    if not isinstance(raw, dict):
        raise ScenarioError("document", "must be a JSON object", None)
    for key in raw:
        if key not in ("kind", "payload", "metadata"):
            raise ScenarioError(key, "is not a known top-level field", None)
    kind = raw.get("kind")
    if kind not in SCHEMAS:
        raise ScenarioError("kind", f"must be one of {sorted(SCHEMAS)}", json.dumps(kind))
    if "payload" not in raw:
        raise ScenarioError("payload", "is required", None)
    metadata = raw.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ScenarioError("metadata", "must be an object", json.dumps(metadata))
    payload = _normalize_object(raw["payload"], SCHEMAS[kind], "payload")
    _build(kind, payload)
    return ScenarioDocument(kind, payload, dict(metadata))


def parse_scenario(source) -> ScenarioDocument:
    """Parse and validate a scenario from a text/binary stream, ``bytes`` or ``str``."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError("document", "must be UTF-8", str(exc)) from None
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ScenarioError("document", "is not valid JSON", f"{exc.msg} at line {exc.lineno} column {exc.colno}") from None
    return _validate(raw)


def _plain(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def serialize_scenario(doc: ScenarioDocument) -> str:
    """JSON text that parses back to an identical document; rationals become ``"a/b"``."""
    raw = {"kind": doc.kind, "metadata": doc.metadata, "payload": _plain(doc.payload)}
    return json.dumps(raw, indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# running


def _exactify_tree(value):
    if isinstance(value, dict):
        return {k: _exactify_tree(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_exactify_tree(v) for v in value]
    if isinstance(value, (float, int)) and not isinstance(value, bool):
        return exactify(value)
    return value


def _numbers_in(value) -> list:
    if isinstance(value, dict):
        return [n for v in value.values() for n in _numbers_in(v)]
    if isinstance(value, list):
        return [n for v in value for n in _numbers_in(v)]
    if isinstance(value, (int, float, Fraction)) and not isinstance(value, bool):
        return [value]
    return []


def _verdict(v: st.DominanceVerdict) -> dict:
    return {"dominates": v.dominates, "strict_at": v.strict_at}


def _run_pora_eval(built: dict, opts: RunOptions) -> dict:
    u, a = built["profile"], built["pora"]
    out = {
        "expected_value": core.expected_value(a),
        "expected_utility": core.expected_utility(u, a),
        "expected_utility_telescoped": core.expected_utility_telescoped(u, a),
        "certainty_equivalent": core.certainty_equivalent(u, a),
        "risk_premium": core.risk_premium(u, a),
        "risk_attitude": str(core.classify_risk_attitude(u, a)),
    }
    if not close(out["expected_utility"], out["expected_utility_telescoped"]):
        raise InvariantViolation("telescoped expected utility disagrees with the direct sum")
    if "ref_profile" in built:
        v, b = built["ref_profile"], built["ref_pora"]
        out["reference_risk_premium"] = core.risk_premium(v, b)
        out["more_risk_averse_than_reference"] = core.more_risk_averse(u, a, v, b)
    return out


def _run_dominance(built: dict, opts: RunOptions) -> dict:
    a, b = built["a"], built["b"]
    out = {
        "a_dominates_b": _verdict(st.first_order_dominates(a, b)),
        "b_dominates_a": _verdict(st.first_order_dominates(b, a)),
    }
    xs = a.returns.entries
    same_grid = xs == b.returns.entries and all(s < t for s, t in zip(xs, xs[1:]))
    if same_grid and not out["a_dominates_b"]["dominates"]:
        if any(st.gt(g, 0) for g in st.cumulative_gaps(a.probs, b.probs)):
            u = st.construct_adversarial_profile(xs, a.probs, b.probs)
            out["adversarial_profile"] = list(u.slopes)
            out["adversarial_margin"] = core.expected_utility(u, a) - core.expected_utility(u, b)
    return out


def _run_spread(built: dict, opts: RunOptions) -> dict:
    x, p, q = built["x"], built["p"], built["q"]
    witness = st.is_mean_preserving_spread(x, p, q)
    out = {
        "mean_p": core.expected_value(core.PORA(x, p)),
        "mean_q": core.expected_value(core.PORA(x, q)),
        "spread_witness": list(witness.as_tuple()) if witness else None,
    }
    if witness:
        out["spread_weight"] = witness.weight(x)
    if "profile" in built:
        u = built["profile"]
        out["increasing_concave"] = st.is_increasing_concave(u, x)
        out["expected_utility_p"] = core.expected_utility(u, core.PORA(x, p))
        out["expected_utility_q"] = core.expected_utility(u, core.PORA(x, q))
    return out


def _contract(c: ins.InsuranceContract) -> dict:
    return {"premium": c.premium, "deductible": c.deductible, "expected_profit": c.expected_profit}


def _run_insurance(built: dict, opts: RunOptions) -> dict:
    s = built["scenario"]
    degenerate = s.u3 is None and s.u1 == s.u2
    contract = ins.optimal_contract(s, allow_degenerate=True)
    out = {
        "expected_loss": -s.loss_prob * s.loss,
        "no_insurance_expected_utility": ins.no_insurance_expected_utility(s),
        "no_insurance_certainty_equivalent": ins.no_insurance_certainty_equivalent(s),
        "actuarially_fair_premium": ins.actuarially_fair_premium(s),
        "strict_profitability": ins.strict_profitability_holds(s),
        "contract": {**_contract(contract), "states": 2 if s.u3 is None else 3, "degenerate": degenerate},
    }
    if s.invest_return is not None:
        low, high = ins.seller_premium_band(s)
        out["seller_premium_band"] = {"low": low, "high": high}
    if "diversification" in built:
        d = built["diversification"]
        rep = ins.diversification_comparison(s.wealth, d["investment"], d["fail_prob"], d["u1"], d["u2"], d["u3"])
        out["diversification"] = {"single": rep.single, "split": rep.split, "gain": rep.gain}
    if opts.oracle:
        oracle = ins.grid_oracle_optimal_contract(s, opts.oracle)
        step = ins.premium_grid_upper(s) / (opts.oracle - 1)
        agrees = abs(float(contract.premium) - oracle.premium) <= step * (1 + 1e-9) and oracle.deductible == 0
        out["oracle"] = {"resolution": opts.oracle, **_contract(oracle), "premium_step": step, "agrees": agrees}
        if not agrees:
            raise InvariantViolation(
                f"grid oracle ({oracle.premium}, {oracle.deductible}) disagrees with closed form {contract.premium}"
            )
    return out


def _run_almost_linear(built: dict, opts: RunOptions, payload: dict) -> dict:
    alu = built["alu"]
    profile = al.derive_state_profile(alu)
    breakpoints = []
    for k in alu.interior_breakpoints():
        delta = opts.delta if opts.delta is not None else payload.get("delta", al.default_delta(alu, k))
        try:
            al.perturbation_pora(alu, k, delta)
        except PreconditionError:
            delta = al.default_delta(alu, k)
        breakpoints.append(
            {
                "index": k,
                "position": alu.breakpoint(k),
                "side": str(alu.side(k)),
                "value": al.evaluate(alu, alu.breakpoint(k)),
                "delta": delta,
                "risk_attitude": str(al.risk_attitude_at_breakpoint(alu, k, delta)),
                "certainty_equivalent": al.perturbation_certainty_equivalent(alu, k, delta),
            }
        )
    out = {"events": [str(e) for e in profile.events], "breakpoints": breakpoints}
    if payload.get("evaluate_at"):
        out["evaluations"] = [{"x": x, "utility": al.evaluate(alu, x)} for x in payload["evaluate_at"]]
    return out


def _run_ambiguity(built: dict, opts: RunOptions) -> dict:
    g, sp = built["g"], built["sp"]
    worst = amb.min_pora(g)
    return {
        "min_pora_returns": list(worst.returns.entries),
        "min_expected_utility": amb.min_expected_utility(sp, g),
        "expected_value_of_min_pora": core.expected_value(worst),
        "selections": math.prod(len(c) for c in g.candidate_returns),
    }


def _summarize(reports: list[st.VerificationReport]) -> dict:
    directions: dict[str, int] = {}
    for r in reports:
        directions[r.direction] = directions.get(r.direction, 0) + 1
    margins = [r.min_margin for r in reports if r.min_margin is not None]
    return {
        "status": "pass" if all(r.passed for r in reports) else "FAIL",
        "pairs": len(reports),
        "by_direction": dict(sorted(directions.items())),
        "worst_min_margin": min(margins) if margins else None,
        "failures": [r.line() for r in reports if not r.passed],
    }


def _run_verify(built: dict, opts: RunOptions, payload: dict) -> dict:
    x, grid = built["x"], built["grid"]
    rng = random.Random(opts.seed)
    samples = payload.get("samples", 200)
    concave_samples = payload.get("concave_samples", 50)
    budget = payload.get("search_budget", 1000)
    pairs = [(p, q) for p in grid for q in grid if p != q]

    prop1 = [st.verify_prop1(x, p, q, samples, rng) for p, q in pairs]
    prop2a = [
        st.verify_prop2a(x, p, q, concave_samples, rng)
        for p, q in pairs
        if st.is_mean_preserving_spread(x, p, q) is not None
    ]
    out = {"grid_size": len(grid), "Prop1": _summarize(prop1), "Prop2a": _summarize(prop2a)}
    if len(x) == 3:
        candidates = [
            (p, q)
            for p, q in pairs
            if close(core.expected_value(core.PORA(x, p)), core.expected_value(core.PORA(x, q))) and not close(p[1], q[1])
        ]
        out["Prop2b"] = _summarize([st.verify_prop2b(x, p, q, budget, rng) for p, q in candidates])
    else:
        out["Prop2b"] = {"status": "skipped", "pairs": 0, "note": "the converse check needs exactly 3 states"}
    out["summary"] = ", ".join(f"{k}: {out[k]['status']}" for k in ("Prop1", "Prop2a", "Prop2b"))
    return out


def run_command(doc: ScenarioDocument, options: RunOptions | None = None) -> dict:
    """Run the analysis for ``doc`` and return the report as a plain nested dict."""
    opts = options or RunOptions()
    payload = _exactify_tree(doc.payload) if opts.exact else doc.payload
    delta = exactify(opts.delta) if (opts.exact and opts.delta is not None) else opts.delta
    opts = RunOptions(opts.seed, opts.oracle, opts.exact, delta)
    if opts.oracle is not None and opts.oracle < 2:
        raise ScenarioError("--oracle", "must be at least 2", opts.oracle)
    built = _build(doc.kind, payload)
    if doc.kind in ("almost_linear", "verify"):
        results = {"almost_linear": _run_almost_linear, "verify": _run_verify}[doc.kind](built, opts, payload)
    else:
        runner = {
            "pora_eval": _run_pora_eval,
            "dominance": _run_dominance,
            "spread": _run_spread,
            "insurance": _run_insurance,
            "ambiguity": _run_ambiguity,
        }[doc.kind]
        results = runner(built, opts)
    numbers = _numbers_in(payload)
    return {
        "kind": doc.kind,
        "label": doc.metadata.get("label", ""),
        "backend": "exact" if is_exact(*numbers) else "float",
        "seed": opts.seed,
        "inputs": payload,
        "results": results,
    }


# --------------------------------------------------------------------------
# rendering


def _json_value(value):
    if isinstance(value, Fraction):
        return {"decimal": float(value), "rational": f"{value.numerator}/{value.denominator}"}
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def render_json(report: dict) -> str:
    return json.dumps(_json_value(report), indent=2, ensure_ascii=False) + "\n"


def _text_value(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if isinstance(value, (int, float, Fraction)):
        return fmt(value)
    if isinstance(value, (list, tuple)) and all(not isinstance(v, (dict, list)) for v in value):
        return "(" + ", ".join(_text_value(v) for v in value) + ")"
    return str(value)


def _text_lines(value, indent: int) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, item in value.items():
        if isinstance(item, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_text_lines(item, indent + 1))
        elif isinstance(item, list) and any(isinstance(v, (dict, list)) for v in item):
            lines.append(f"{pad}{key}:")
            for entry in item:
                if isinstance(entry, dict):
                    first, *rest = _text_lines(entry, indent + 2)
                    lines.append(f"{pad}  - {first.strip()}")
                    lines.extend(rest)
                else:
                    lines.append(f"{pad}  - {_text_value(entry)}")
        elif isinstance(item, list) and item and all(isinstance(v, str) for v in item):
            lines.append(f"{pad}{key}:")
            lines.extend(f"{pad}  - {v}" for v in item)
        else:
            lines.append(f"{pad}{key}: {_text_value(item)}")
    return lines


def render_text(report: dict) -> str:
    title = f"{report['kind']}" + (f" - {report['label']}" if report["label"] else "")
    lines = [title, "=" * len(title), f"backend: {report['backend']}", f"seed: {report['seed']}", "", "inputs:"]
    lines += _text_lines(report["inputs"], 1)
    lines += ["", "results:"]
    lines += _text_lines(report["results"], 1)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# entry point


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("must be an integer >= 2")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", default="-", help="scenario file (default: stdin)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    common.add_argument("--oracle", type=_positive_int, default=None, metavar="RESOLUTION",
                        help="cross-check insurance contracts on a RESOLUTION x RESOLUTION grid")
    common.add_argument("--exact", action="store_true", help="read every decimal as an exact rational")
    common.add_argument("--delta", type=str, default=None,
                        help="perturbation half-width at almost-linear breakpoints")
    parser = argparse.ArgumentParser(prog="sdlu", description="State-dependent linear utility analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, kind in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=f"run a '{kind}' scenario")
    return parser


def main(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.input == "-":
            stream = getattr(stdin, "buffer", stdin)
            doc = parse_scenario(stream)
        else:
            try:
                with open(args.input, "rb") as fh:
                    doc = parse_scenario(fh)
            except OSError as exc:
                raise ScenarioError("--input", "could not be read", exc.strerror) from None
        expected = COMMANDS[args.command]
        if doc.kind != expected:
            raise ScenarioError("kind", f"must be '{expected}' for the '{args.command}' command", doc.kind)
        delta = None
        if args.delta is not None:
            try:
                # integers and "a/b" stay exact; other decimals follow the float backend
                delta = parse_number(args.delta)
                if delta.denominator != 1 and "/" not in args.delta:
                    delta = float(args.delta)
            except (ValueError, ValidationError):
                raise ScenarioError("--delta", "must be a number", args.delta) from None
        opts = RunOptions(seed=args.seed, oracle=args.oracle, exact=args.exact, delta=delta)
        report = run_command(doc, opts)
        if doc.kind == "verify" and "FAIL" in report["results"]["summary"]:
            failures = [line for key in ("Prop1", "Prop2a", "Prop2b") for line in report["results"][key].get("failures", [])]
            raise InvariantViolation("\n".join([report["results"]["summary"], *failures]))
        text = render_json(report) if args.format == "json" else render_text(report)
    except (ScenarioError, ValidationError, PreconditionError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except (InvariantViolation, AssertionError) as exc:
        stderr.write(f"internal check failed: {exc}\n")
        return 3
    stdout.write(text)
    return 0


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
