import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gouruin.asymptotics import Asymptotic, classify
from gouruin.bounds import compute_bounds
from gouruin.fixtures import FIXTURES, get_fixture
from gouruin.intervals import Kind
from gouruin.levy import BivariateTriplet, marginal
from gouruin.ruin import (
    Regime,
    certain_ruin_threshold,
    classify_ruin,
    regime_is_monotone,
    z_infinity_support,
    zero_region_start,
)

from strategies import coords, models, rates

INF = math.inf
U_GRID = np.linspace(0.0, 50.0, 100001)
U_STEP = U_GRID[1] - U_GRID[0]


def ruin_of(name):
    return classify_ruin(get_fixture(name).triplet())


@st.composite
def certain_ruin_models(draw):
    """xi drifts to +inf, no Gaussian part, no mass in the closed first quadrant."""
    jumps = []
    for _ in range(draw(st.integers(1, 4))):
        x, y = draw(coords), draw(coords)
        if (x >= 0 and y >= 0) or (x == 0 and y == 0):
            continue
        jumps.append((draw(rates), x, y))
    slack = draw(st.floats(0.1, 2.0))
    d_xi = slack - sum(r * x for r, x, _ in jumps)
    d_eta = draw(st.floats(-3, 3).map(lambda v: round(v, 3)))
    assume(d_eta != 0 or any(y != 0 for _, _, y in jumps))
    return BivariateTriplet.build((d_xi, d_eta), (0, 0, 0), jumps)


def grid_certain_ruin(t):
    """Largest grid u >= 0 at which -(eta - uW) is a subordinator."""
    x = np.array([a.x for a in t.atoms])
    y = np.array([a.y for a in t.atoms])
    f = y[None, :] - U_GRID[:, None] * np.expm1(-x)[None, :]
    ok = np.all(f <= 0, axis=1) & (t.drift_eta + U_GRID * t.drift_xi <= 0)
    return U_GRID[ok].max() if ok.any() else None


class TestFixtureRegimes:
    @pytest.mark.parametrize("fx", FIXTURES, ids=lambda f: f.name)
    def test_monotone(self, fx):
        assert regime_is_monotone(classify_ruin(fx.triplet()))

    def test_remark_2_3(self):
        r = ruin_of("remark-2-3")
        assert r.regime_at(0.0) is Regime.ONE
        assert r.regime_at(1.0) is Regime.ONE
        assert r.regime_at(1.0 + 1e-9) is Regime.STRICTLY_BETWEEN
        assert r.regime_at(1e6) is Regime.STRICTLY_BETWEEN
        assert r.certain_ruin_m == 1.0
        assert str(r) == "One on [0, 1], StrictlyBetween on (1, inf)"

    def test_example_4_3_degenerate(self):
        r = ruin_of("example-4.3-plus")
        assert r.regime_at(2.0 - 1e-12) is Regime.ONE
        assert r.regime_at(2.0) is Regime.ZERO
        assert r.theorem == "degenerate" and r.degenerate_c == 2.0

    def test_example_4_9(self):
        r = ruin_of("example-4.9")
        assert [reg for _, reg in r.segments] == [Regime.ZERO]
        assert r.theorem == "convergent-branch"

    def test_example_4_7(self):
        r = ruin_of("example-4.7")
        assert [reg for _, reg in r.segments] == [Regime.ONE]
        assert r.theorem == "stationary-branch"

    def test_hypotheses_recorded(self):
        r = ruin_of("example-4.5")
        assert r.theorem == "oscillating-branch"
        statuses = {h.status for h in r.hypotheses}
        assert "asserted" in statuses and "verified" in statuses
        js = r.to_json()
        assert js["asymptotic"] == "oscillates" and js["segments"][0]["regime"] == "One"

    def test_negative_start_rejected(self):
        with pytest.raises(ValueError):
            ruin_of("example-4.9").regime_at(-1.0)

    def test_xi_zero_is_unknown(self):
        t = BivariateTriplet.build((0.0, -1.0), jumps=[(1.0, 0.0, 2.0)])
        r = classify_ruin(t)
        assert any(reg is Regime.UNKNOWN for _, reg in r.segments)


class TestRegimeProperties:
    @settings(max_examples=300, deadline=None)
    @given(models())
    def test_monotone(self, t):
        assert regime_is_monotone(classify_ruin(t))

    @settings(max_examples=300, deadline=None)
    @given(models())
    def test_zero_region_matches_L(self, t):
        b = compute_bounds(t)
        r = classify_ruin(t, b)
        if b.degenerate is not None or marginal(t, "xi").is_zero:
            return
        start = zero_region_start(r)
        if b.L.is_empty or b.L.sup < 0:
            assert start == INF
        else:
            assert start == max(b.L.inf, 0.0)

    @settings(max_examples=300, deadline=None)
    @given(models(gaussian=False))
    def test_one_region_ends_at_sup_U(self, t):
        b = compute_bounds(t)
        asym = classify(marginal(t, "xi"))
        if asym.tag is not Asymptotic.DRIFTS_TO_PLUS_INFINITY or b.degenerate is not None:
            return
        r = classify_ruin(t, b, asym)
        ones = [span for span, reg in r.segments if reg is Regime.ONE]
        if not b.U.is_empty and b.U.sup >= 0:
            assert ones and ones[-1].hi == b.U.sup and ones[-1].hi_closed
        else:
            assert not ones


class TestCertainRuin:
    def test_remark_2_3(self):
        assert certain_ruin_threshold(get_fixture("remark-2-3").triplet()) == 1.0

    def test_example_4_9_none(self):
        assert certain_ruin_threshold(get_fixture("example-4.9").triplet()) is None

    def test_negative_eta_subordinator(self):
        # An atom on the positive x-axis charges A1, so only the subordinator clause applies.
        t = BivariateTriplet.build((1.0, -1.0), jumps=[(1.0, 2.0, 0.0), (1.0, 0.0, -2.0)])
        assert certain_ruin_threshold(t) == 0.0

    def test_requires_drift_to_plus_infinity(self):
        with pytest.raises(ValueError):
            certain_ruin_threshold(get_fixture("example-4.7").triplet())

    def test_gaussian_root(self):
        # var_xi = 1, cov = -2 links eta - 2W; g(2) = -5 + 2 (1 - 1/2) = -4 <= 0.
        t = BivariateTriplet.build((1.0, -5.0), (1.0, -2.0, 4.0))
        assert certain_ruin_threshold(t) == 2.0

    @settings(max_examples=100, deadline=None)
    @given(certain_ruin_models())
    def test_grid_oracle(self, t):
        m = certain_ruin_threshold(t)
        oracle = grid_certain_ruin(t)
        if oracle is None:
            assert m is None
        elif oracle >= U_GRID[-1]:
            assert m is not None and m >= U_GRID[-1] - U_STEP
        else:
            assert m is not None and abs(m - oracle) <= U_STEP


class TestZInfinity:
    def test_example_4_9(self):
        s = z_infinity_support(get_fixture("example-4.9").triplet())
        assert s.lower == pytest.approx(3.1639, abs=1e-4)
        assert s.upper == pytest.approx(12.6558, abs=1e-4)

    def test_degenerate(self):
        s = z_infinity_support(get_fixture("example-4.3-plus").triplet())
        assert s.degenerate_point == -2.0 and s.lower == s.upper == -2.0

    def test_empty_bounds(self):
        s = z_infinity_support(get_fixture("example-4.4-empty-plus").triplet())
        assert (s.lower, s.upper) == (-INF, INF)

    def test_outside_convergence(self):
        with pytest.raises(ValueError):
            z_infinity_support(get_fixture("example-4.7").triplet())

    @settings(max_examples=200, deadline=None)
    @given(models())
    def test_ordered(self, t):
        if classify(marginal(t, "xi")).tag is not Asymptotic.DRIFTS_TO_PLUS_INFINITY:
            return
        s = z_infinity_support(t)
        if s.degenerate_point is None:
            assert s.lower <= s.upper
