"""Worked example models with their expected thresholds, bound sets and regimes.

Numbers are kept as closed-form strings (``"2/(e-1)"``) and evaluated when
checked; decimal approximations only serve as a loose sanity corridor.
Every expected entry is marked either ``stated`` (given with the example) or
``derived`` (follows from the definitions for the pinned parameters).
Jump laws are compound Poisson with intensity one, so probabilities are rates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .asymptotics import classify
from .bounds import compute_bounds, delta, g_eval, upsilon
from .exact import evaluate
from .intervals import ExtInterval, Kind
from .levy import BivariateTriplet, marginal
from .modelio import model_to_dict
from .ruin import Regime, certain_ruin_threshold, classify_ruin
from .simulate import SimConfig, run_batch

EXACT_TOL = 1e-9
APPROX_TOL = 0.15

PLUS = "drifts_to_plus_infinity"
MINUS = "drifts_to_minus_infinity"
OSC = "oscillates"

# Closed forms of the critical levels that recur below.
U44_LO = "1/(e^2-1)"
U44_HI = "-2/(e^-4-1)"
TWO_OVER_EM1 = "2/(e-1)"
L47_HI = "-3/(e^2-1)"
L49_LO = "2/(e^-1-1)"
U48_HI = "8/(e^-1-1)"


@dataclass(frozen=True)
class Fixture:
    """A pinned model plus the values it must reproduce.

    ``expected`` keys: ``theta``/``theta_prime`` (index -> expression),
    ``Lstar``/``Ustar``/``L``/``U`` (``[]`` empty, ``[a]`` point, ``[a, b]``
    interval), ``degenerate`` (expression or None), ``taxonomy``,
    ``asymptotic``, ``regime`` (list of ``[regime, right end, closed]``),
    ``certain_ruin_m``, ``g`` (u -> expression for the drift of eta - uW).
    ``approx`` holds rounded decimals for the corridor. ``alternatives``
    keeps a stated value that disagrees with the derived one; it is exported
    for reference and not checked.
    """

    name: str
    drift: tuple[str, str]
    jumps: tuple[tuple[str, str, str], ...] = ()
    gaussian: tuple[str, str, str] = ("0", "0", "0")
    expected: dict = field(default_factory=dict)
    approx: dict = field(default_factory=dict)
    stated: frozenset = frozenset()
    note: str = ""
    alternatives: dict = field(default_factory=dict)

    def triplet(self) -> BivariateTriplet:
        return BivariateTriplet.build(
            tuple(evaluate(v) for v in self.drift),
            tuple(evaluate(v) for v in self.gaussian),
            [tuple(evaluate(v) for v in atom) for atom in self.jumps],
        )

    def provenance(self, key: str) -> str:
        return "stated" if key.split(".")[0] in self.stated else "derived"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "model": model_to_dict(self.triplet()),
            "exact_model": {"drift": list(self.drift), "gaussian": list(self.gaussian), "jumps": [list(a) for a in self.jumps]},
            "expected": self.expected,
            "approx": self.approx,
            "provenance": {k: self.provenance(k) for k in list(self.expected) + list(self.approx)},
            "note": self.note,
            "alternatives": self.alternatives,
        }


def _e43(tag: str, d_xi: str, asym: str, below: str) -> Fixture:
    return Fixture(
        name=f"example-4.3{tag}",
        drift=(d_xi, f"-2*({d_xi})"),
        jumps=(("1/2", "3", "2*e^-3-2"), ("1/2", "-3", "2*e^3-2")),
        expected={
            "theta": {2: "2", 4: "2"},
            "theta_prime": {2: "2", 4: "2"},
            "Lstar": ["2"],
            "Ustar": ["2"],
            "L": ["2"],
            "U": ["2"],
            "degenerate": "2",
            "taxonomy": "degenerate:point",
            "asymptotic": asym,
            "regime": [[below, "2", False], ["Zero", "inf", False]],
        },
        stated=frozenset({"theta", "theta_prime", "Lstar", "Ustar", "L", "U", "asymptotic"}),
    )


def _e42(tag: str, d_xi: str, d_eta: str, asym: str, below: str) -> Fixture:
    return Fixture(
        name=f"example-4.2{tag}",
        drift=(d_xi, d_eta),
        gaussian=("1", "-1", "1"),
        expected={
            "L": ["1"],
            "U": ["1"],
            "degenerate": "1",
            "taxonomy": "degenerate:point",
            "asymptotic": asym,
            "regime": [[below, "1", False], ["Zero", "inf", False]],
        },
        stated=frozenset({"L", "U", "asymptotic"}),
    )


def _e41(tag: str, d_xi: str, asym: str, regime: str) -> Fixture:
    return Fixture(
        name=f"example-4.1{tag}",
        drift=(d_xi, "2"),
        gaussian=("1", "1", "1"),
        jumps=(("1/2", "10", "10"), ("1/2", "-10", "10")),
        expected={
            "L": ["-1"],
            "U": [],
            "degenerate": None,
            "taxonomy": "brownian:L-singleton",
            "asymptotic": asym,
            "regime": [[regime, "inf", False]],
            "g": {-1: f"5/2-({d_xi})"},
        },
        stated=frozenset({"L", "U", "asymptotic"}),
        note="drift of eta - uW at u=-1 is 5/2 - d_xi here; any d_xi <= 3/2 keeps it nonnegative",
        alternatives={"g": {-1: f"3/2-({d_xi})"}},
    )


def _e44(tag: str, d_xi: str, d_eta: str, U: list, asym: str, regime: list) -> Fixture:
    return Fixture(
        name=f"example-4.4-{tag}",
        drift=(d_xi, d_eta),
        jumps=(("1/3", "4", "-2"), ("1/3", "-2", "-3"), ("1/3", "-2", "1")),
        expected={
            "theta_prime": {4: U44_LO, 2: U44_HI},
            "Lstar": [],
            "Ustar": [U44_LO, U44_HI],
            "L": [],
            "U": U,
            "degenerate": None,
            "taxonomy": {0: "a:U=empty", 1: "a:U=singleton", 2: "a:U=closed"}[len(U)],
            "asymptotic": asym,
            "regime": regime,
        },
        approx={"theta_prime.4": 0.2, "theta_prime.2": 2.0},
        stated=frozenset({"theta_prime", "Lstar", "Ustar", "L", "U", "asymptotic"}),
        note="the interval endpoints are listed in the other order with the example",
    )


ALL_ONE = [["One", "inf", False]]
ALL_BETWEEN = [["StrictlyBetween", "inf", False]]
ALL_ZERO = [["Zero", "inf", False]]


def _one_then_between(m: str) -> list:
    return [["One", m, True], ["StrictlyBetween", "inf", False]]


FIXTURES: tuple[Fixture, ...] = (
    _e41("-plus", "1", PLUS, "StrictlyBetween"),
    _e41("-osc", "0", OSC, "One"),
    _e41("-minus", "-1", MINUS, "One"),
    _e42("", "1/2", "0", PLUS, "One"),
    _e42("-minus", "-1/2", "1", MINUS, "StrictlyBetween"),
    _e42("-osc", "0", "1/2", OSC, "One"),
    _e43("-plus", "1", PLUS, "One"),
    _e43("-minus", "-1", MINUS, "StrictlyBetween"),
    _e43("-osc", "0", OSC, "One"),
    _e44("empty-osc", "0", "1", [], OSC, ALL_ONE),
    _e44("empty-plus", "1", "0", [], PLUS, ALL_BETWEEN),
    _e44("empty-minus", "-1", "3", [], MINUS, ALL_ONE),
    _e44("full-osc", "0", "-1", [U44_LO, U44_HI], OSC, ALL_ONE),
    _e44("full-plus", "1", "-3", [U44_LO, U44_HI], PLUS, _one_then_between(U44_HI)),
    _e44("full-minus", "-1", "0", [U44_LO, U44_HI], MINUS, ALL_ONE),
    _e44("low-point-plus", "1", f"-({U44_LO})", [U44_LO], PLUS, _one_then_between(U44_LO)),
    _e44("high-point-minus", "-1", U44_HI, [U44_HI], MINUS, ALL_ONE),
    Fixture(
        name="example-4.5",
        drift=("0", "-2"),
        jumps=(("1/3", "2", "e^-2-1"), ("1/3", "-1", "e-1"), ("1/3", "-1", "-2")),
        expected={
            "theta": {2: "1", 4: "1"},
            "theta_prime": {2: "1", 4: "1"},
            "Lstar": [],
            "Ustar": ["1"],
            "L": [],
            "U": ["1"],
            "degenerate": None,
            "taxonomy": "a:U=singleton",
            "asymptotic": OSC,
            "regime": ALL_ONE,
        },
        approx={"theta.2": 1.0, "theta_prime.4": 1.0},
        stated=frozenset({"theta", "theta_prime", "Ustar", "L", "U", "asymptotic"}),
    ),
    Fixture(
        name="example-4.6",
        drift=("0", "-2"),
        jumps=(("1/3", "-1", "2"), ("1/3", "-2", "-3"), ("1/3", "0", "-5")),
        expected={
            "theta_prime": {4: TWO_OVER_EM1, 2: "inf"},
            "Lstar": [],
            "Ustar": [TWO_OVER_EM1, "inf"],
            "L": [],
            "U": [TWO_OVER_EM1, "inf"],
            "degenerate": None,
            "taxonomy": "a:U=right-ray",
            "asymptotic": MINUS,
            "regime": ALL_ONE,
        },
        approx={"theta_prime.4": 1.2},
        stated=frozenset({"theta_prime", "Lstar", "Ustar", "L", "U", "asymptotic"}),
        note="mean of xi is -1 with unit intensity; only its sign matters",
    ),
    *(
        Fixture(
            name=f"example-4.7{tag}",
            drift=(d_xi, "0"),
            jumps=(("1/2", "-1", "2"), ("1/2", "-2", "-3")),
            expected={
                "theta": {1: "-inf", 3: L47_HI},
                "theta_prime": {4: TWO_OVER_EM1, 2: "inf"},
                "Lstar": ["-inf", L47_HI],
                "Ustar": [TWO_OVER_EM1, "inf"],
                "L": ["-inf", L47_HI],
                "U": [TWO_OVER_EM1, "inf"],
                "degenerate": None,
                "taxonomy": "c:L-left,U-right",
                "asymptotic": MINUS,
                "regime": ALL_ONE,
            },
            approx={"theta.3": -0.5, "theta_prime.4": 1.2},
            stated=frozenset({"theta", "theta_prime", "Lstar", "Ustar", "L", "U", "asymptotic"}),
        )
        for tag, d_xi in (("", "0"), ("-drift", "-1"))
    ),
    Fixture(
        name="example-4.8",
        drift=("0", "0"),
        jumps=(("1/3", "1", "2"), ("1/3", "1", "8"), ("1/3", "0", "-5")),
        expected={
            "theta_prime": {1: U48_HI, 3: "-inf"},
            "Lstar": [],
            "Ustar": ["-inf", U48_HI],
            "L": [],
            "U": ["-inf", U48_HI],
            "degenerate": None,
            "taxonomy": "a:U=left-ray",
            "asymptotic": PLUS,
            "regime": ALL_BETWEEN,
        },
        approx={"theta_prime.1": -12.6},
        stated=frozenset({"theta_prime", "Lstar", "Ustar", "L", "U", "asymptotic"}),
        note="mean of xi is 2/3 with unit intensity; only its sign matters",
    ),
    Fixture(
        name="example-4.9",
        drift=("0", "0"),
        jumps=(("1/2", "1", "2"), ("1/2", "1", "8")),
        expected={
            "theta": {1: L49_LO, 4: "inf"},
            "theta_prime": {1: U48_HI, 3: "-inf"},
            "Lstar": [L49_LO, "inf"],
            "Ustar": ["-inf", U48_HI],
            "L": [L49_LO, "inf"],
            "U": ["-inf", U48_HI],
            "degenerate": None,
            "taxonomy": "c:U-left,L-right",
            "asymptotic": PLUS,
            "regime": ALL_ZERO,
        },
        approx={"theta.1": -3.2, "theta_prime.1": -12.6},
        stated=frozenset({"theta", "theta_prime", "Lstar", "Ustar", "L", "U", "asymptotic"}),
    ),
    Fixture(
        name="remark-2-3",
        drift=("1", "-1"),
        jumps=(("1", "0", "-1"),),
        expected={
            "theta_prime": {4: "0", 2: "inf"},
            "L": [],
            "U": ["-inf", "1"],
            "degenerate": None,
            "taxonomy": "a:U=left-ray",
            "asymptotic": PLUS,
            "certain_ruin_m": "1",
            "regime": _one_then_between("1"),
        },
        stated=frozenset({"certain_ruin_m", "regime"}),
        note="(xi, eta)_t = (t, -t - N_t): certain ruin exactly for z <= 1",
    ),
    Fixture(
        name="remark-2-1",
        drift=("-1", "-1"),
        jumps=(("1", "1", "0"), ("1", "0", "1")),
        expected={
            "L": [],
            "U": [],
            "degenerate": None,
            "taxonomy": "a:U=empty",
            "asymptotic": OSC,
            "regime": ALL_ONE,
        },
        note="independent xi = -t + N, eta = -t + M; V cannot reach 0 within one unit of time from large z",
    ),
)

FIXTURES_BY_NAME = {f.name: f for f in FIXTURES}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES_BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES_BY_NAME)}") from None


@dataclass(frozen=True)
class Check:
    key: str
    expected: str
    actual: str
    ok: bool
    provenance: str = "derived"

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "expected": self.expected,
            "actual": self.actual,
            "ok": self.ok,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class FixtureResult:
    name: str
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def diff(self) -> str:
        rows = [c for c in self.checks if not c.ok]
        width = max((len(c.key) for c in rows), default=0)
        return "\n".join(f"  {c.key:<{width}}  expected {c.expected:<28} got {c.actual}" for c in rows)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checks": [c.to_json() for c in self.checks]}


def _close(actual: float, expected: float, tol: float = EXACT_TOL) -> bool:
    if math.isinf(expected) or math.isinf(actual):
        return actual == expected
    return abs(actual - expected) <= tol * max(1.0, abs(expected))


def _interval_matches(iv: ExtInterval, spec: list) -> bool:
    if not spec:
        return iv.is_empty
    vals = [evaluate(s) for s in spec]
    if len(vals) == 1:
        return iv.kind is Kind.SINGLETON and _close(iv.a, vals[0])
    if iv.is_empty or iv.kind is Kind.SINGLETON:
        return False
    return _close(iv.a, vals[0]) and _close(iv.b, vals[1])


def _fmt_interval_spec(spec: list) -> str:
    if not spec:
        return "{}"
    if len(spec) == 1:
        return "{" + spec[0] + "}"
    return f"[{spec[0]}, {spec[1]}]"


def _regime_matches(regime, spec: list) -> bool:
    if len(regime.segments) != len(spec):
        return False
    for (span, r), (name, hi, closed) in zip(regime.segments, spec):
        if r is not Regime(name) or not _close(span.hi, evaluate(hi)):
            return False
        if math.isfinite(span.hi) and span.hi_closed != closed:
            return False
    return True


def _sim_points(regime) -> list[float]:
    pts = []
    for span, _ in regime.segments:
        if math.isfinite(span.hi):
            pts.append(0.5 * (span.lo + span.hi))
        else:
            pts.append(span.lo + 1.0)
    return pts


def _simulation_checks(fx: Fixture, triplet: BivariateTriplet, report, regime, paths: int) -> list[Check]:
    if triplet.has_gaussian:
        return []
    checks = []
    zs = _sim_points(regime)
    config = SimConfig(z=zs[0], horizon=20.0, paths=paths, seed=20240607)
    for z, res in zip(zs, run_batch(triplet, config, zs)):
        lo, hi = delta(report, z), upsilon(report, z)
        scale = 1e-9 * max(1.0, abs(z))
        if regime.regime_at(z) is Regime.ZERO:
            n = int(res.ruined.sum())
            checks.append(Check(f"sim.no_ruin@{z:g}", "0", str(n), n == 0))
        if math.isfinite(lo):
            m = float(res.vmin.min())
            checks.append(Check(f"sim.min@{z:g}", f">= {lo:.10g}", f"{m:.10g}", m >= lo - scale * max(1, abs(lo))))
        if math.isfinite(hi):
            m = float(res.vmax.max())
            checks.append(Check(f"sim.max@{z:g}", f"<= {hi:.10g}", f"{m:.10g}", m <= hi + scale * max(1, abs(hi))))
    return checks


def verify_fixture(fx: Fixture, simulate: bool = True, paths: int = 1000) -> FixtureResult:
    triplet = fx.triplet()
    report = compute_bounds(triplet)
    asym = classify(marginal(triplet, "xi"))
    regime = classify_ruin(triplet, report, asym)
    prof = report.profile
    exp = fx.expected
    checks: list[Check] = []

    def add(key: str, expected: str, actual: str, ok: bool) -> None:
        checks.append(Check(key, expected, actual, ok, fx.provenance(key)))

    for fam, values in (("theta", prof.theta), ("theta_prime", prof.theta_prime)):
        for i, expr in exp.get(fam, {}).items():
            got = values[int(i) - 1]
            add(f"{fam}.{i}", str(expr), repr(got), _close(got, evaluate(expr)))
    for key in ("Lstar", "Ustar", "L", "U"):
        if key in exp:
            iv = getattr(report, key)
            add(key, _fmt_interval_spec(exp[key]), str(iv), _interval_matches(iv, exp[key]))
    if "degenerate" in exp:
        want = exp["degenerate"]
        got = report.degenerate
        if want is None:
            add("degenerate", "none", "none" if got is None else f"c={got.c!r}", got is None)
        else:
            ok = got is not None and _close(got.c, evaluate(want))
            add("degenerate", f"c={want}", "none" if got is None else f"c={got.c!r}", ok)
    if "taxonomy" in exp:
        add("taxonomy", exp["taxonomy"], report.taxonomy, report.taxonomy == exp["taxonomy"])
    if "asymptotic" in exp:
        add("asymptotic", exp["asymptotic"], asym.tag.value, asym.tag.value == exp["asymptotic"])
    if "regime" in exp:
        want = ", ".join(f"{r} up to {hi}{']' if c else ')'}" for r, hi, c in exp["regime"])
        add("regime", want, str(regime), _regime_matches(regime, exp["regime"]))
    if "certain_ruin_m" in exp:
        got = certain_ruin_threshold(triplet, report, asym)
        ok = got is not None and _close(got, evaluate(exp["certain_ruin_m"]))
        add("certain_ruin_m", exp["certain_ruin_m"], repr(got), ok)
    for u, value in exp.get("g", {}).items():
        got = g_eval(triplet, float(u))
        add(f"g.{u}", value, repr(got), _close(got, evaluate(value)))
    for key, approx in fx.approx.items():
        fam, i = key.split(".")
        got = (prof.theta if fam == "theta" else prof.theta_prime)[int(i) - 1]
        add(f"approx.{key}", f"{approx} +- {APPROX_TOL}", repr(got), abs(got - approx) <= APPROX_TOL)
    if simulate:
        checks.extend(_simulation_checks(fx, triplet, report, regime, paths))
    return FixtureResult(fx.name, tuple(checks))


def verify_examples(simulate: bool = True, paths: int = 1000) -> list[FixtureResult]:
    return [verify_fixture(fx, simulate, paths) for fx in FIXTURES]


def export_fixtures(directory: str | Path) -> list[Path]:
    """Write ``<name>.json`` (a plain model file) and ``<name>.expected.json`` per fixture."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for fx in FIXTURES:
        model_path = out / f"{fx.name}.json"
        model_path.write_text(json.dumps(model_to_dict(fx.triplet()), indent=2) + "\n")
        exp_path = out / f"{fx.name}.expected.json"
        exp_path.write_text(json.dumps(fx.to_json(), indent=2, default=str) + "\n")
        written += [model_path, exp_path]
    return written
