import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gouruin.asymptotics import (
    A_minus,
    A_plus,
    Asymptotic,
    I_integral,
    J_minus,
    J_plus,
    QuadratureError,
    TailFunction,
    ZERO_TAIL,
    classify,
    classify_by_tails,
    derive_K_measure,
    limit_conditions,
    mean_xi1,
)
from gouruin.fixtures import FIXTURES, get_fixture
from gouruin.levy import BivariateTriplet, MarginalTriplet, marginal
from gouruin.simulate import JumpSampler, path_rng

from strategies import models


def xi_of(name):
    return marginal(get_fixture(name).triplet(), "xi")


class TestMean:
    def test_example_4_9(self):
        assert mean_xi1(xi_of("example-4.9")) == pytest.approx(1.0)

    def test_example_4_5(self):
        assert mean_xi1(xi_of("example-4.5")) == pytest.approx(0.0, abs=1e-15)

    def test_zero(self):
        assert mean_xi1(MarginalTriplet(0.0)) == 0.0


class TestClassify:
    def test_examples(self):
        assert classify(xi_of("example-4.9")).tag is Asymptotic.DRIFTS_TO_PLUS_INFINITY
        c = classify(xi_of("example-4.7"))
        assert c.tag is Asymptotic.DRIFTS_TO_MINUS_INFINITY
        assert c.mean == pytest.approx(-1.5)
        assert c.basis == "mean_sign"
        assert classify(xi_of("example-4.5")).tag is Asymptotic.OSCILLATES

    @pytest.mark.parametrize("fx", [f for f in FIXTURES if not f.triplet().has_gaussian], ids=lambda f: f.name)
    def test_agrees_with_simulated_slope(self, fx):
        # xi_T / T over long paths; 3 standard errors around the exact mean.
        t = fx.triplet()
        horizon, paths = 1000.0, 40
        sampler = JumpSampler.of(t)
        slope = np.array(
            [(t.drift_xi * horizon + sampler.draw(path_rng(7, i), horizon)[1].sum()) / horizon for i in range(paths)]
        )
        mu = mean_xi1(marginal(t, "xi"))
        var1 = sum(a.rate * a.x**2 for a in t.atoms)
        se = math.sqrt(var1 / horizon / paths)
        assert abs(slope.mean() - mu) <= 3 * se + 1e-12
        if abs(mu) > 3 * se:
            assert np.sign(slope.mean()) == np.sign(mu)


class TestA:
    def test_zero_tail(self):
        assert A_tail_value(ZERO_TAIL, 5.0) == 1.0

    def test_inverse_square_tail(self):
        tail = TailFunction(lambda u: 1.0 / u**2, "integrable")
        assert A_plus(tail, 2.0) == pytest.approx(1.5, rel=1e-8)

    def test_constant_tail(self):
        tail = TailFunction(lambda u: 3.0, "integrable")
        assert A_plus(tail, 4.0) == pytest.approx(3.0 + 3.0 * 3.0, rel=1e-8)

    def test_domain(self):
        with pytest.raises(ValueError):
            A_plus(MarginalTriplet(0.0), 0.5)

    @settings(max_examples=100, deadline=None)
    @given(models(), st.floats(1, 20), st.floats(0, 20))
    def test_nondecreasing_and_at_least_one(self, t, x, dx):
        xi = marginal(t, "xi")
        for f in (A_plus, A_minus):
            a, b = f(xi, x), f(xi, x + dx)
            assert a >= 1.0 and b >= a - 1e-12

    def test_atomic_matches_quadrature(self):
        # Direct sum over atoms against quadrature of the step tail.
        xi = MarginalTriplet(0.0, 0.0, ((1.0, 2.0), (0.5, 3.5), (2.0, -4.0)))
        tail = TailFunction.from_atoms(xi.atoms, "+")
        for x in (1.0, 1.5, 2.5, 3.0, 6.0):
            assert A_plus(xi, x) == pytest.approx(A_plus(tail, x), rel=1e-7)


def A_tail_value(tail, x):
    return A_plus(tail, x)


class TestJ:
    def test_bounded_jumps(self):
        assert J_plus(MarginalTriplet(0.0, 0.0, ((1.0, 0.5), (1.0, -1.0)))) == 0.0

    def test_single_atom(self):
        assert J_plus(MarginalTriplet(0.0, 0.0, ((1.0, 2.0),))) == pytest.approx(2.0)

    def test_zero_tail(self):
        assert J_plus(ZERO_TAIL) == 0.0

    def test_minus_mirrors_plus(self):
        m = MarginalTriplet(0.0, 0.0, ((1.0, -3.0), (1.0, 2.0)))
        assert J_minus(m) == pytest.approx(J_plus(m.negated()))

    def test_divergent_hint(self):
        # A heavy positive tail against a light negative one: xi drifts to +inf.
        heavy = TailFunction(lambda u: 1.0 / u, "divergent")
        assert J_plus(heavy) == math.inf
        c = classify_by_tails(heavy, TailFunction(lambda u: u**-3, "integrable"))
        assert c.tag is Asymptotic.DRIFTS_TO_PLUS_INFINITY and c.basis == "j_integral"

    def test_unknown_hint_is_not_guessed(self):
        assert J_plus(TailFunction(lambda u: u**-1.5, "unknown")) is None
        assert classify_by_tails(TailFunction(lambda u: u**-1.5, "unknown"), ZERO_TAIL) is None

    def test_pareto_tail_closed_form(self):
        # tail u^-3 with no negative tail: int_1^inf x * 3 x^-4 dx = 3/2.
        tail = TailFunction(lambda u: u**-3, "integrable")
        assert J_plus(tail) == pytest.approx(1.5, rel=1e-6)

    def test_quadrature_failure_reported(self):
        wild = TailFunction(lambda u: 1.0 / math.floor(u * 1e2) ** 0.5, "integrable")
        with pytest.raises(QuadratureError):
            A_plus(wild, 1e6)


class TestI:
    def test_small_jumps(self):
        assert I_integral(MarginalTriplet(1.0), MarginalTriplet(0.0, 0.0, ((1.0, 2.0), (1.0, -2.7)))) == 0.0

    def test_single_term(self):
        assert I_integral(MarginalTriplet(1.0), MarginalTriplet(0.0, 0.0, ((1.0, math.e**2),))) == pytest.approx(2.0)

    def test_example_4_9_finite(self):
        t = get_fixture("example-4.9").triplet()
        k = derive_K_measure(t)
        assert [s for _, s in k.atoms] == pytest.approx([2 * math.e, 8 * math.e])
        val = I_integral(marginal(t, "xi"), k.as_marginal())
        assert math.isfinite(val) and val > 0

    def test_atomic_matches_stieltjes(self):
        xi = MarginalTriplet(0.5, 0.0, ((1.0, 2.0),))
        target = MarginalTriplet(0.0, 0.0, ((1.0, 5.0), (2.0, -9.0)))
        tail = TailFunction(lambda y: (1.0 if y < 5.0 else 0.0) + (2.0 if y < 9.0 else 0.0), "integrable", support=9.0)
        assert I_integral(xi, target) == pytest.approx(I_integral(xi, tail), rel=1e-6)


class TestK:
    def test_axis_atom(self):
        t = BivariateTriplet.build((0.0, 0.0), jumps=[(1.0, 0.0, 1.5)])
        assert derive_K_measure(t).atoms == ((1.0, 1.5),)

    def test_example_4_7_atom(self):
        k = derive_K_measure(get_fixture("example-4.7").triplet())
        assert (0.5, pytest.approx(2 * math.exp(-1))) in [(r, s) for r, s in k.atoms]

    def test_example_4_2_drift_correction(self):
        k = derive_K_measure(get_fixture("example-4.2").triplet())
        assert k.drift_correction == 1.0

    def test_drops_zero_eta_jumps(self):
        t = BivariateTriplet.build((0.0, 1.0), jumps=[(1.0, 1.0, 0.0), (1.0, 1.0, 2.0)])
        assert len(derive_K_measure(t).atoms) == 1


class TestLimitConditions:
    def test_convergent_and_stationary(self):
        assert limit_conditions(get_fixture("example-4.9").triplet()).convergent
        lc = limit_conditions(get_fixture("example-4.7").triplet())
        assert lc.stationary and not lc.convergent
        lc = limit_conditions(get_fixture("example-4.5").triplet())
        assert not lc.stationary and not lc.convergent
        assert "finite" in lc.justification
