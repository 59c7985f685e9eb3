"""Lower/upper bound sets of the GOU process and their structure.

``L`` is the set of starting values from which ``V`` is a.s. nondecreasing
for a while, i.e. the ``u`` for which ``eta - u W`` is a subordinator; ``U``
is the mirror image. ``L*``/``U*`` drop the drift and Gaussian requirements
and only ask for no negative (positive) jumps of ``V`` at level ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .intervals import INF, ExtInterval, Kind, Span, ext_to_json
from .levy import (
    STRUCT_TOL,
    BivariateTriplet,
    GaussianCovariance,
    bivariate_gamma,
    has_no_negative_eta_jumps,
    has_no_positive_eta_jumps,
    is_subordinator,
    marginal,
)
from .thresholds import ThetaProfile, ratio, theta_profile

DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class GDescriptor:
    """``g(u) = c0 + c1 u``, the drift of ``eta - u W`` (finite variation only)."""

    c0: float
    c1: float
    form: str = "linear"

    def __call__(self, u: float) -> float:
        return self.c0 + u * self.c1

    def nonneg_set(self) -> ExtInterval:
        return _sign_set(self.c0, self.c1)

    def nonpos_set(self) -> ExtInterval:
        return _sign_set(-self.c0, -self.c1)

    def to_json(self) -> dict:
        return {"form": self.form, "c0": self.c0, "c1": self.c1}


def _sign_set(c0: float, c1: float) -> ExtInterval:
    """``{u: c0 + c1 u >= 0}``."""
    if c1 > 0:
        return ExtInterval.between(-c0 / c1, INF)
    if c1 < 0:
        return ExtInterval.between(-INF, -c0 / c1)
    return ExtInterval.everything() if c0 >= 0 else ExtInterval.empty()


def g_descriptor(triplet: BivariateTriplet) -> GDescriptor:
    return GDescriptor(triplet.drift_eta, triplet.drift_xi - 0.5 * triplet.gaussian.var_xi)


def g_eval(triplet: BivariateTriplet, u: float) -> float:
    return g_descriptor(triplet)(u)


def g_truncated(triplet: BivariateTriplet, u: float) -> float:
    """``g`` from the unit-disc truncated location vector.

    Agrees with :func:`g_eval` for finite-variation models; it exists so the
    two parameterisations can be checked against each other.
    """
    gx, gy = bivariate_gamma(triplet)
    small = sum((u * a.x + a.y) * a.rate for a in triplet.atoms if a.x**2 + a.y**2 < 1)
    return gy + u * gx - 0.5 * u * triplet.gaussian.var_xi - small


def covariance_condition(gaussian: GaussianCovariance, u: float, tol: float = STRUCT_TOL) -> bool:
    """``Sigma == var_xi * [[1, -u], [-u, u^2]]``, i.e. ``eta - u W`` has no Gaussian part."""
    scale = 1.0 + u * u
    return (
        abs(gaussian.cov + u * gaussian.var_xi) <= tol * scale
        and abs(gaussian.var_eta - u * u * gaussian.var_xi) <= tol * scale
    )


def _dispatch_star(triplet: BivariateTriplet, prof: ThetaProfile, lower: bool) -> ExtInterval:
    # (a) one quadrant charged and its partner empty, (b) the reverse, (c) both empty.
    if lower:
        charged, partner = prof.mass(2), prof.mass(3)
        case_a, case_b, case_c = (prof.t(2), prof.t(4)), (prof.t(1), prof.t(3)), (prof.t(1), prof.t(4))
        zero_ok = has_no_negative_eta_jumps(triplet)
    else:
        charged, partner = prof.mass(4), prof.mass(1)
        case_a, case_b, case_c = (prof.tp(4), prof.tp(2)), (prof.tp(3), prof.tp(1)), (prof.tp(3), prof.tp(2))
        zero_ok = has_no_positive_eta_jumps(triplet)
    if charged != 0 and partner == 0:
        iv = ExtInterval.between(*case_a)
    elif charged == 0 and partner != 0:
        iv = ExtInterval.between(*case_b)
    elif charged == 0 and partner == 0:
        iv = ExtInterval.between(*case_c)
    else:
        iv = ExtInterval.empty()
    if not iv.is_empty and not (iv.kind is Kind.SINGLETON and iv.a == 0):
        return iv
    return ExtInterval.point(0.0) if zero_ok else ExtInterval.empty(iv.a, iv.b)


def compute_Lstar(triplet: BivariateTriplet, prof: ThetaProfile | None = None) -> ExtInterval:
    """Levels at which ``V`` cannot jump down."""
    return _dispatch_star(triplet, prof or theta_profile(triplet), lower=True)


def compute_Ustar(triplet: BivariateTriplet, prof: ThetaProfile | None = None) -> ExtInterval:
    """Levels at which ``V`` cannot jump up."""
    return _dispatch_star(triplet, prof or theta_profile(triplet), lower=False)


def _contains(iv: ExtInterval, u: float) -> bool:
    if iv.is_empty:
        return False
    slack = STRUCT_TOL * max(1.0, abs(u))
    return iv.a - slack <= u <= iv.b + slack


def _bound_set(triplet: BivariateTriplet, star: ExtInterval, lower: bool) -> ExtInterval:
    g = g_descriptor(triplet)
    gauss = triplet.gaussian
    if gauss.var_xi > STRUCT_TOL:
        u0 = -gauss.cov / gauss.var_xi
        sign_ok = g(u0) >= -STRUCT_TOL if lower else g(u0) <= STRUCT_TOL
        if _contains(star, u0) and sign_ok and covariance_condition(gauss, u0):
            return ExtInterval.point(u0)
        return ExtInterval.empty()
    if not gauss.is_zero:
        return ExtInterval.empty()
    return star.intersect(g.nonneg_set() if lower else g.nonpos_set())


def compute_L(triplet: BivariateTriplet, Lstar: ExtInterval | None = None) -> ExtInterval:
    return _bound_set(triplet, Lstar if Lstar is not None else compute_Lstar(triplet), True)


def compute_U(triplet: BivariateTriplet, Ustar: ExtInterval | None = None) -> ExtInterval:
    return _bound_set(triplet, Ustar if Ustar is not None else compute_Ustar(triplet), False)


@dataclass(frozen=True)
class DegenerateInfo:
    c: float
    source: str  # "covariance-ratio" | "curve-fit" | "no-jumps-no-gaussian"

    def to_json(self) -> dict:
        return {"c": self.c, "source": self.source}


def detect_degenerate(triplet: BivariateTriplet) -> DegenerateInfo | None:
    """The ``c != 0`` for which ``V_t = e^{xi_t}(z - c) + c``, if any."""
    gauss = triplet.gaussian
    off_axis = [a for a in triplet.atoms if abs(a.x) > STRUCT_TOL]
    if gauss.var_xi > STRUCT_TOL:
        c, source = -gauss.cov / gauss.var_xi, "covariance-ratio"
    elif off_axis:
        c, source = ratio(off_axis[0].x, off_axis[0].y), "curve-fit"
    elif not triplet.atoms:
        slope = g_descriptor(triplet).c1
        if slope == 0:
            return None
        c, source = -triplet.drift_eta / slope, "no-jumps-no-gaussian"
    else:
        return None
    if abs(c) <= STRUCT_TOL:
        return None
    on_curve = all(abs(a.y - c * math.expm1(-a.x)) <= DEGENERATE_TOL for a in triplet.atoms)
    if on_curve and covariance_condition(gauss, c) and abs(g_eval(triplet, c)) <= DEGENERATE_TOL:
        return DegenerateInfo(c, source)
    return None


def _form(iv: ExtInterval) -> str:
    return iv.kind.value


def classify_combination(
    L: ExtInterval,
    U: ExtInterval,
    gaussian: GaussianCovariance,
    degenerate: DegenerateInfo | None,
) -> str:
    """Tag naming which of the admissible ``(L, U)`` combinations occurred."""
    if L.kind is Kind.ALL and U.kind is Kind.ALL:
        return "trivial:L=U=R"
    if L.kind is Kind.ALL:
        return "trivial:L=R" if U.is_empty else "inconsistent"
    if U.kind is Kind.ALL:
        return "trivial:U=R" if L.is_empty else "inconsistent"
    meet = L.intersect(U)
    if degenerate is not None:
        c = degenerate.c
        if L.kind is Kind.SINGLETON and U.kind is Kind.SINGLETON and meet.kind is Kind.SINGLETON:
            return "degenerate:point"
        if U.kind is Kind.LEFT_RAY and L.kind is Kind.RIGHT_RAY and _close(U.b, c) and _close(L.a, c):
            return "degenerate:U-left,L-right"
        if L.kind is Kind.LEFT_RAY and U.kind is Kind.RIGHT_RAY and _close(L.b, c) and _close(U.a, c):
            return "degenerate:L-left,U-right"
        return "inconsistent"
    if not meet.is_empty:
        return "inconsistent"
    if not gaussian.is_zero:
        if L.is_empty and U.is_empty:
            return "brownian:both-empty"
        if L.kind is Kind.SINGLETON and U.is_empty:
            return "brownian:L-singleton"
        if U.kind is Kind.SINGLETON and L.is_empty:
            return "brownian:U-singleton"
        return "inconsistent"
    if L.is_empty:
        return f"a:U={_form(U)}"
    if U.is_empty:
        return f"b:L={_form(L)}"
    if L.kind is Kind.LEFT_RAY and U.kind is Kind.RIGHT_RAY and L.b < U.a:
        return "c:L-left,U-right"
    if U.kind is Kind.LEFT_RAY and L.kind is Kind.RIGHT_RAY and U.b < L.a:
        return "c:U-left,L-right"
    return "inconsistent"


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= DEGENERATE_TOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class BoundsReport:
    Lstar: ExtInterval
    Ustar: ExtInterval
    L: ExtInterval
    U: ExtInterval
    g: GDescriptor
    degenerate: DegenerateInfo | None
    taxonomy: str
    profile: ThetaProfile
    gaussian: GaussianCovariance = field(repr=False, default_factory=GaussianCovariance)

    @property
    def m1(self) -> float:
        return self.g.nonneg_set().inf

    @property
    def m2(self) -> float:
        return self.g.nonneg_set().sup

    def to_json(self) -> dict:
        return {
            "Lstar": self.Lstar.to_json(),
            "Ustar": self.Ustar.to_json(),
            "L": self.L.to_json(),
            "U": self.U.to_json(),
            "g": self.g.to_json(),
            "m1": ext_to_json(self.m1),
            "m2": ext_to_json(self.m2),
            "degenerate": self.degenerate.to_json() if self.degenerate else None,
            "taxonomy": self.taxonomy,
            "absorbing_sets": [[s.to_json() for s in parts] for parts in absorbing_sets(self)],
        }


def compute_bounds(triplet: BivariateTriplet) -> BoundsReport:
    prof = theta_profile(triplet)
    Ls = compute_Lstar(triplet, prof)
    Us = compute_Ustar(triplet, prof)
    L = compute_L(triplet, Ls)
    U = compute_U(triplet, Us)
    deg = detect_degenerate(triplet)
    return BoundsReport(
        Lstar=Ls,
        Ustar=Us,
        L=L,
        U=U,
        g=g_descriptor(triplet),
        degenerate=deg,
        taxonomy=classify_combination(L, U, triplet.gaussian, deg),
        profile=prof,
        gaussian=triplet.gaussian,
    )


def delta(report: BoundsReport | ExtInterval, z: float) -> float:
    """Lowest level reachable with positive probability from ``z``."""
    L = report.L if isinstance(report, BoundsReport) else report
    if L.is_empty:
        return -INF
    if z >= L.sup:
        return L.sup
    if z < L.inf:
        return -INF
    return z


def upsilon(report: BoundsReport | ExtInterval, z: float) -> float:
    """Highest level reachable with positive probability from ``z``."""
    U = report.U if isinstance(report, BoundsReport) else report
    if U.is_empty:
        return INF
    if z <= U.inf:
        return U.inf
    if z > U.sup:
        return INF
    return z


def absorbing_sets(report: BoundsReport) -> list[tuple[Span, ...]]:
    """Maximal absorbing sets; each entry is a union of spans."""
    L, U = report.L, report.U
    if report.degenerate is not None:
        c = report.degenerate.c
        return [(Span(c, c),)]
    if U.kind is Kind.LEFT_RAY and L.kind is Kind.RIGHT_RAY:
        return [(Span.of(U), Span.of(L))]
    if U.kind is Kind.LEFT_RAY and L.is_empty:
        return [(Span.of(U),)]
    if L.kind is Kind.RIGHT_RAY and U.is_empty:
        return [(Span.of(L),)]
    if L.kind is Kind.LEFT_RAY and U.kind is Kind.RIGHT_RAY:
        return [(Span(L.b, U.a, False, False),)]
    return []


@dataclass(frozen=True)
class StructureCheck:
    divergent_bundle: bool
    stationary_bundle: bool
    divergent_shape: bool
    stationary_shape: bool
    xi_subordinator: bool
    negxi_subordinator: bool
    v_inf_support: Span | None
    consistent: bool
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "divergent_bundle": self.divergent_bundle,
            "stationary_bundle": self.stationary_bundle,
            "divergent_shape": self.divergent_shape,
            "stationary_shape": self.stationary_shape,
            "xi_subordinator": self.xi_subordinator,
            "negxi_subordinator": self.negxi_subordinator,
            "v_inf_support": self.v_inf_support.to_json() if self.v_inf_support else None,
            "consistent": self.consistent,
            "notes": list(self.notes),
        }


def structure_conditions_check(
    triplet: BivariateTriplet, report: BoundsReport | None = None
) -> StructureCheck:
    """Triplet-level conditions for the two opposite-ray structures, checked
    against the computed ``(L, U)``."""
    report = report or compute_bounds(triplet)
    prof = report.profile
    no_gauss = triplet.gaussian.is_zero
    divergent = (
        no_gauss
        and triplet.drift_xi >= 0
        and prof.mass(3) == 0
        and prof.mass(4) == 0
        and prof.tp(1) > -INF
        and prof.t(2) < INF
    )
    stationary = (
        no_gauss
        and triplet.drift_xi <= 0
        and prof.mass(1) == 0
        and prof.mass(2) == 0
        and prof.tp(4) < INF
        and prof.t(3) > -INF
    )
    # With d_xi = 0 the drift g(u) is the constant d_eta, which empties L or U
    # unless d_eta = 0; the listed conditions alone miss this.
    drift_ok = triplet.drift_xi != 0 or triplet.drift_eta == 0
    notes = []
    if (divergent or stationary) and not drift_ok:
        notes.append("d_xi = 0 with d_eta != 0: jump conditions hold but g has constant sign")
    divergent = divergent and drift_ok
    stationary = stationary and drift_ok
    L, U = report.L, report.U
    div_shape = (
        U.kind is Kind.LEFT_RAY and L.kind is Kind.RIGHT_RAY and U.b < L.a
    ) and report.degenerate is None
    stat_shape = (
        L.kind is Kind.LEFT_RAY and U.kind is Kind.RIGHT_RAY and L.b < U.a
    ) and report.degenerate is None
    xi = marginal(triplet, "xi")
    xi_sub = is_subordinator(xi, "+")
    negxi_sub = is_subordinator(xi, "-")
    consistent = True
    if report.degenerate is None:
        if divergent != div_shape:
            consistent = False
            notes.append("divergent condition bundle disagrees with computed (L, U) shape")
        if stationary != stat_shape:
            consistent = False
            notes.append("stationary condition bundle disagrees with computed (L, U) shape")
    if divergent and not xi_sub:
        consistent = False
        notes.append("divergent bundle holds but xi is not a subordinator")
    if stationary and not negxi_sub:
        consistent = False
        notes.append("stationary bundle holds but -xi is not a subordinator")
    support = Span(L.b, U.a, False, False) if stat_shape else None
    return StructureCheck(
        divergent_bundle=divergent,
        stationary_bundle=stationary,
        divergent_shape=div_shape,
        stationary_shape=stat_shape,
        xi_subordinator=xi_sub,
        negxi_subordinator=negxi_sub,
        v_inf_support=support,
        consistent=consistent,
        notes=tuple(notes),
    )
