"""Long-run behaviour of xi and the integral tests for convergence/stationarity.

For atomic models every mean exists and every jump is bounded, so ``classify``
uses the sign of ``E(xi_1)`` and the ``I`` integrals reduce to finite sums.
The tail-function route (``TailFunction``) keeps the general criteria usable
for user-supplied measures whose mean may not exist.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy import integrate

from .levy import BivariateTriplet, MarginalTriplet, marginal

QUAD_RTOL = 1e-8


class QuadratureError(RuntimeError):
    pass


class Asymptotic(enum.Enum):
    DRIFTS_TO_PLUS_INFINITY = "drifts_to_plus_infinity"
    DRIFTS_TO_MINUS_INFINITY = "drifts_to_minus_infinity"
    OSCILLATES = "oscillates"


@dataclass(frozen=True)
class AsymptoticClass:
    tag: Asymptotic
    basis: Literal["mean_sign", "j_integral"]
    mean: float | None = None

    def to_json(self) -> dict:
        return {"tag": self.tag.value, "basis": self.basis, "mean": self.mean}


@dataclass(frozen=True)
class TailFunction:
    """A nonincreasing tail ``x -> Pi((x, inf))`` (or the mirrored negative tail).

    ``integrability`` is the caller's declaration about the integral being
    evaluated against this tail: ``"integrable"`` lets quadrature run to
    infinity, ``"divergent"`` short-circuits to ``inf`` and ``"unknown"``
    yields ``None`` instead of a guess. ``support`` is an optional finite
    right end of the support, which turns the integral into a proper one.
    """

    func: Callable[[float], float]
    integrability: Literal["integrable", "divergent", "unknown"] = "integrable"
    support: float | None = None

    def __post_init__(self) -> None:
        grid = np.geomspace(1.0, 1e6, 64)
        vals = np.array([self.func(float(u)) for u in grid])
        if np.any(vals < 0) or np.any(np.diff(vals) > 1e-12 * (1 + np.abs(vals[:-1]))):
            raise ValueError("tail function must be nonnegative and nonincreasing")

    def __call__(self, x: float) -> float:
        if self.support is not None and x >= self.support:
            return 0.0
        return float(self.func(x))

    @classmethod
    def from_atoms(cls, atoms: tuple[tuple[float, float], ...], side: Literal["+", "-"]):
        sizes = [(r, s if side == "+" else -s) for r, s in atoms]
        sizes = [(r, s) for r, s in sizes if s > 0]
        top = max((s for _, s in sizes), default=0.0)
        return cls(lambda x: sum(r for r, s in sizes if s > x), "integrable", top)


ZERO_TAIL = TailFunction(lambda x: 0.0, "integrable", 1.0)


def _quad(f: Callable[[float], float], a: float, b: float) -> float:
    if b <= a:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _err = integrate.quad(f, a, b, epsrel=QUAD_RTOL, limit=200)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {exc}") from exc
    return val


def mean_xi1(m: MarginalTriplet) -> float:
    return m.drift + sum(r * s for r, s in m.atoms)


def classify(m: MarginalTriplet) -> AsymptoticClass:
    mu = mean_xi1(m)
    if mu > 0:
        tag = Asymptotic.DRIFTS_TO_PLUS_INFINITY
    elif mu < 0:
        tag = Asymptotic.DRIFTS_TO_MINUS_INFINITY
    else:
        tag = Asymptotic.OSCILLATES
    return AsymptoticClass(tag, "mean_sign", mu)


def classify_by_tails(plus: TailFunction, minus: TailFunction) -> AsymptoticClass | None:
    """Trichotomy from the J integrals, for measures whose mean does not exist."""
    jp, jm = J_plus(plus, minus), J_minus(plus, minus)
    if jp is None or jm is None:
        return None
    if jm < math.inf:
        return AsymptoticClass(Asymptotic.DRIFTS_TO_PLUS_INFINITY, "j_integral")
    if jp < math.inf:
        return AsymptoticClass(Asymptotic.DRIFTS_TO_MINUS_INFINITY, "j_integral")
    return AsymptoticClass(Asymptotic.OSCILLATES, "j_integral")


def _atomic_A(atoms: tuple[tuple[float, float], ...], side: str, x: float) -> float:
    sizes = [(r, s if side == "+" else -s) for r, s in atoms]
    tail1 = sum(r for r, s in sizes if s > 1)
    return max(tail1, 1.0) + sum(r * (min(s, x) - 1.0) for r, s in sizes if s > 1)


def A_tail(tail: TailFunction, x: float) -> float:
    """``max(tail(1), 1) + int_1^x tail(u) du``."""
    if x < 1:
        raise ValueError(f"A is defined for x >= 1, got {x!r}")
    upper = x if tail.support is None else min(x, tail.support)
    return max(tail(1.0), 1.0) + _quad(tail, 1.0, upper)


def A_plus(m: MarginalTriplet | TailFunction, x: float) -> float:
    if isinstance(m, MarginalTriplet):
        if x < 1:
            raise ValueError(f"A is defined for x >= 1, got {x!r}")
        return _atomic_A(m.atoms, "+", x)
    return A_tail(m, x)


def A_minus(m: MarginalTriplet | TailFunction, x: float) -> float:
    if isinstance(m, MarginalTriplet):
        if x < 1:
            raise ValueError(f"A is defined for x >= 1, got {x!r}")
        return _atomic_A(m.atoms, "-", x)
    return A_tail(m, x)


def _stieltjes(
    weight: Callable[[float], float],
    dweight: Callable[[float], float],
    tail: TailFunction,
    lower: float,
) -> float | None:
    """``int_(lower, inf) weight d(-tail)`` via integration by parts.

    Returns ``inf`` or ``None`` as declared by the tail's integrability hint.
    """
    if tail.integrability == "divergent":
        return math.inf
    if tail.integrability == "unknown" and tail.support is None:
        return None
    upper = tail.support if tail.support is not None else math.inf
    if upper <= lower:
        return 0.0
    head = weight(lower) * tail(lower)
    body = _quad(lambda u: dweight(u) * tail(u), lower, upper)
    if upper == math.inf:
        far = 1e12
        if weight(far) * tail(far) > 1e-6 * max(1.0, abs(head + body)):
            return None
    return head + body


def J_plus(plus: TailFunction | MarginalTriplet, minus: TailFunction | None = None) -> float | None:
    """``int_1^inf x / A^-(x) |d tail^+(x)|``; a finite sum for atomic input.

    ``None`` means convergence could not be decided.
    """
    if isinstance(plus, MarginalTriplet):
        m = plus
        return sum(r * s / _atomic_A(m.atoms, "-", s) for r, s in m.atoms if s > 1)
    minus = minus or ZERO_TAIL
    return _stieltjes(
        lambda x: x / A_tail(minus, x),
        lambda x: 1.0 / A_tail(minus, x) - x * minus(x) / A_tail(minus, x) ** 2,
        plus,
        1.0,
    )


def J_minus(plus: TailFunction | MarginalTriplet, minus: TailFunction | None = None) -> float | None:
    if isinstance(plus, MarginalTriplet):
        return J_plus(plus.negated())
    minus = minus or ZERO_TAIL
    return J_plus(minus, plus)


def I_integral(
    xi: MarginalTriplet | TailFunction, target: MarginalTriplet | TailFunction
) -> float | None:
    """``int_(e, inf) ln(y) / A_xi^+(ln y) |d tail_target(y)|``.

    ``target`` is the two-sided tail of the integrator process (a marginal, or
    a ``TailFunction`` giving ``Pi((-inf,-y)) + Pi((y,inf))``).
    """

    def A(v: float) -> float:
        return A_plus(xi, v)

    if isinstance(target, MarginalTriplet):
        return sum(r * math.log(abs(s)) / A(math.log(abs(s))) for r, s in target.atoms if abs(s) > math.e)

    def plus_tail(v: float) -> float:
        return xi(v) if isinstance(xi, TailFunction) else _atomic_tail(xi, v)

    return _stieltjes(
        lambda y: math.log(y) / A(math.log(y)),
        lambda y: (A(math.log(y)) - math.log(y) * plus_tail(math.log(y))) / (y * A(math.log(y)) ** 2),
        target,
        math.e,
    )


def _atomic_tail(m: MarginalTriplet, x: float) -> float:
    return sum(r for r, s in m.atoms if s > x)


@dataclass(frozen=True)
class KMeasure:
    """Jump atoms and drift of the auxiliary process ``K = eta + sum (e^dxi - 1) deta - t Cov``."""

    atoms: tuple[tuple[float, float], ...]
    drift: float
    drift_correction: float
    variance: float

    def as_marginal(self) -> MarginalTriplet:
        return MarginalTriplet(self.drift, self.variance, self.atoms)


def derive_K_measure(triplet: BivariateTriplet) -> KMeasure:
    atoms = tuple((a.rate, math.exp(a.x) * a.y) for a in triplet.atoms if a.y != 0)
    corr = -triplet.gaussian.cov
    return KMeasure(atoms, triplet.drift_eta + corr, corr, triplet.gaussian.var_eta)


@dataclass(frozen=True)
class LimitConditions:
    """Whether the convergence (Z_t -> Z_inf) and stationarity (V) tests pass."""

    asymptotic: AsymptoticClass
    I_xi_eta: float | None
    I_negxi_K: float | None
    convergent: bool
    stationary: bool
    justification: str

    def to_json(self) -> dict:
        return {
            "asymptotic": self.asymptotic.to_json(),
            "I_xi_eta": _ext(self.I_xi_eta),
            "I_negxi_K": _ext(self.I_negxi_K),
            "convergent": self.convergent,
            "stationary": self.stationary,
            "justification": self.justification,
        }


def _ext(v: float | None):
    if v is None:
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def limit_conditions(triplet: BivariateTriplet) -> LimitConditions:
    xi = marginal(triplet, "xi")
    eta = marginal(triplet, "eta")
    asym = classify(xi)
    i_conv = I_integral(xi, eta)
    i_stat = I_integral(xi.negated(), derive_K_measure(triplet).as_marginal())
    return LimitConditions(
        asymptotic=asym,
        I_xi_eta=i_conv,
        I_negxi_K=i_stat,
        convergent=asym.tag is Asymptotic.DRIFTS_TO_PLUS_INFINITY and i_conv < math.inf,
        stationary=asym.tag is Asymptotic.DRIFTS_TO_MINUS_INFINITY and i_stat < math.inf,
        justification=(
            "finite-activity atomic measure: every jump is bounded, so both I integrals "
            "are finite sums and the tests reduce to the sign of E(xi_1)"
        ),
    )
