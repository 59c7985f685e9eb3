"""Ruin-probability regimes as a function of the initial value ``z >= 0``.

The verdict is piecewise: ``One`` (certain ruin), ``StrictlyBetween``
(``0 < psi < 1``), ``Zero`` and ``Unknown``. Which statement applies depends
on the long-run behaviour of ``xi`` and on the structure of ``L`` and ``U``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .asymptotics import Asymptotic, AsymptoticClass, classify, limit_conditions
from .bounds import BoundsReport, compute_bounds, covariance_condition
from .intervals import INF, ExtInterval, Kind, Span, ext_to_json
from .levy import STRUCT_TOL, BivariateTriplet, is_subordinator, marginal


class Regime(enum.Enum):
    ZERO = "Zero"
    STRICTLY_BETWEEN = "StrictlyBetween"
    ONE = "One"
    UNKNOWN = "Unknown"


# Larger means more severe; Unknown sits outside the order.
SEVERITY = {Regime.ZERO: 0, Regime.STRICTLY_BETWEEN: 1, Regime.ONE: 2}


@dataclass(frozen=True)
class Hypothesis:
    name: str
    status: str  # "verified" | "asserted" | "failed" | "not-needed"
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class RuinRegime:
    """Piecewise verdict on ``[0, inf)``.

    ``segments`` partition ``[0, inf)`` in increasing order. ``m`` is the
    smallest ``z >= 0`` with ``psi(z) = 0`` (``inf`` if there is none) and
    ``certain_ruin_m`` the level up to which ruin is certain, when known.
    """

    segments: tuple[tuple[Span, Regime], ...]
    m: float
    theorem: str
    asymptotic: Asymptotic
    hypotheses: tuple[Hypothesis, ...] = ()
    certain_ruin_m: float | None = None
    degenerate_c: float | None = None

    def regime_at(self, z: float) -> Regime:
        if z < 0:
            raise ValueError(f"ruin regimes are defined for z >= 0, got {z!r}")
        for span, regime in self.segments:
            if z in span:
                return regime
        raise RuntimeError(f"no segment covers z={z!r}")

    @property
    def breakpoints(self) -> list[float]:
        return [span.hi for span, _ in self.segments[:-1]]

    def to_json(self) -> dict:
        return {
            "segments": [
                {"span": span.to_json(), "regime": regime.value} for span, regime in self.segments
            ],
            "breakpoints": [ext_to_json(b) for b in self.breakpoints],
            "m": ext_to_json(self.m),
            "certain_ruin_m": ext_to_json(self.certain_ruin_m),
            "degenerate_c": self.degenerate_c,
            "theorem": self.theorem,
            "asymptotic": self.asymptotic.value,
            "hypotheses": [h.to_json() for h in self.hypotheses],
        }

    def __str__(self) -> str:
        return ", ".join(f"{regime.value} on {span}" for span, regime in self.segments)


def _segments(cuts: list[tuple[float, bool, Regime]]) -> tuple[tuple[Span, Regime], ...]:
    """Build segments from ``(right end, right end closed, regime)`` triples.

    Each piece starts where the previous one stopped; empty pieces are
    dropped and neighbours with the same regime merged.
    """
    out: list[tuple[Span, Regime]] = []
    lo, lo_closed = 0.0, True
    for hi, hi_closed, regime in cuts:
        span = Span(lo, hi, lo_closed, hi_closed)
        if span.is_empty:
            continue
        if out and out[-1][1] is regime:
            prev = out[-1][0]
            span = Span(prev.lo, hi, prev.lo_closed, hi_closed)
            out[-1] = (span, regime)
        else:
            out.append((span, regime))
        lo, lo_closed = hi, not hi_closed
    if not out or out[-1][0].hi != INF:
        raise RuntimeError("segments do not cover [0, inf)")
    return tuple(out)


def _zero_from(bounds: BoundsReport) -> float:
    """Smallest ``z >= 0`` with ``delta(z) >= 0``, i.e. ``psi(z) = 0``."""
    L = bounds.L
    if L.is_empty or L.sup < 0:
        return INF
    return max(L.inf, 0.0)


def _with_zero_tail(
    head: list[tuple[float, bool, Regime]], zero_from: float
) -> tuple[tuple[Span, Regime], ...]:
    """Append the ``Zero`` region ``[zero_from, inf)`` after ``head``."""
    cuts = [(min(hi, zero_from), closed if hi < zero_from else False, r) for hi, closed, r in head]
    if zero_from < INF:
        cuts.append((INF, False, Regime.ZERO))
    elif not cuts or cuts[-1][0] != INF:
        raise RuntimeError("regime head must reach infinity when there is no Zero region")
    return _segments(cuts)


def _atomic_hypotheses(triplet: BivariateTriplet, asym: AsymptoticClass) -> list[Hypothesis]:
    lim = limit_conditions(triplet)
    hyps = [
        Hypothesis(
            "xi-asymptotics",
            "verified",
            f"sign of E(xi_1) = {asym.mean!r} gives {asym.tag.value}",
        )
    ]
    if asym.tag is Asymptotic.DRIFTS_TO_MINUS_INFINITY:
        hyps.append(
            Hypothesis("stationarity integral I(-xi, K) < inf", "verified", f"value {lim.I_negxi_K!r}")
        )
    elif asym.tag is Asymptotic.DRIFTS_TO_PLUS_INFINITY:
        hyps.append(
            Hypothesis("convergence integral I(xi, eta) < inf", "verified", f"value {lim.I_xi_eta!r}")
        )
    else:
        hyps.append(
            Hypothesis(
                "moment conditions (E e^|xi_1| < inf, Holder pair for e^-xi and eta)",
                "asserted",
                "bounded jumps of a finite-activity measure give every exponential moment",
            )
        )
    return hyps


def _xi_is_zero(triplet: BivariateTriplet) -> bool:
    return marginal(triplet, "xi").is_zero


def classify_ruin(
    triplet: BivariateTriplet,
    bounds: BoundsReport | None = None,
    asym: AsymptoticClass | None = None,
) -> RuinRegime:
    bounds = bounds or compute_bounds(triplet)
    asym = asym or classify(marginal(triplet, "xi"))
    tag = asym.tag
    zero_from = _zero_from(bounds)
    deg = bounds.degenerate

    if _xi_is_zero(triplet):
        # V = z + eta; the long-run statements need a non-trivial xi.
        hyps = (Hypothesis("xi not identically zero", "failed"),)
        if bounds.L.kind is Kind.ALL:
            segs, theorem = _segments([(INF, False, Regime.ZERO)]), "trivial"
        elif bounds.U.kind is Kind.ALL:
            segs, theorem = _segments([(INF, False, Regime.ONE)]), "trivial"
        else:
            segs, theorem = _with_zero_tail([(INF, False, Regime.UNKNOWN)], zero_from), "trivial"
        return RuinRegime(segs, zero_from, theorem, tag, hyps)

    hyps = _atomic_hypotheses(triplet, asym)

    if deg is not None:
        c = deg.c
        hyps.append(Hypothesis("degenerate path V = e^xi (z - c) + c", "verified", f"c = {c!r}"))
        if c > 0:
            below = Regime.STRICTLY_BETWEEN if tag is Asymptotic.DRIFTS_TO_MINUS_INFINITY else Regime.ONE
            segs = _segments([(c, False, below), (INF, False, Regime.ZERO)])
            m = c
        elif tag is Asymptotic.DRIFTS_TO_PLUS_INFINITY:
            # V -> inf, so psi < 1; psi = 0 exactly where delta(z) >= 0.
            segs = _with_zero_tail([(INF, False, Regime.STRICTLY_BETWEEN)], zero_from)
            m = zero_from
        else:
            segs = _segments([(INF, False, Regime.ONE)])
            m = INF
        certain = None
        if tag is Asymptotic.DRIFTS_TO_PLUS_INFINITY:
            certain = certain_ruin_threshold(triplet, bounds, asym)
        return RuinRegime(segs, m, "degenerate", tag, tuple(hyps), certain, c)

    if bounds.L.intersect(bounds.U).is_empty is False:
        hyps.append(Hypothesis("L and U disjoint", "failed"))
        segs = _with_zero_tail([(INF, False, Regime.UNKNOWN)], zero_from)
        return RuinRegime(segs, zero_from, "inconsistent", tag, tuple(hyps))

    if tag is Asymptotic.DRIFTS_TO_PLUS_INFINITY:
        U = bounds.U
        head = []
        if not U.is_empty and U.sup >= 0:
            head.append((U.sup, True, Regime.ONE))
        head.append((INF, False, Regime.STRICTLY_BETWEEN))
        segs = _with_zero_tail(head, zero_from)
        certain = certain_ruin_threshold(triplet, bounds, asym)
        return RuinRegime(segs, zero_from, "convergent-branch", tag, tuple(hyps), certain)

    theorem = "stationary-branch" if tag is Asymptotic.DRIFTS_TO_MINUS_INFINITY else "oscillating-branch"
    if zero_from < INF:
        segs = _with_zero_tail([(INF, False, Regime.STRICTLY_BETWEEN)], zero_from)
    else:
        segs = _segments([(INF, False, Regime.ONE)])
    return RuinRegime(segs, zero_from, theorem, tag, tuple(hyps))


def _nonpositive_part(g, lo: float, hi: float) -> ExtInterval:
    return ExtInterval.between(lo, hi).intersect(g.nonpos_set())


def certain_ruin_threshold(
    triplet: BivariateTriplet,
    bounds: BoundsReport | None = None,
    asym: AsymptoticClass | None = None,
) -> float | None:
    """Level ``m`` such that ruin is certain for ``z <= m`` (``z < m`` if degenerate).

    Only meaningful when ``xi`` drifts to ``+inf``. ``None`` means there is no
    ``z >= 0`` with certain ruin.
    """
    bounds = bounds or compute_bounds(triplet)
    asym = asym or classify(marginal(triplet, "xi"))
    if asym.tag is not Asymptotic.DRIFTS_TO_PLUS_INFINITY:
        raise ValueError("the certain-ruin threshold is defined only when xi drifts to +inf")
    if bounds.degenerate is not None:
        # The critical levels collapse onto c; for c < 0 the path escapes to +inf.
        c = bounds.degenerate.c
        return c if c > 0 else None
    prof = bounds.profile
    lo, hi = prof.tp(4), prof.tp(2)
    gauss = triplet.gaussian
    m = None
    if prof.mass(1) == 0 and lo <= hi:
        if gauss.var_xi > STRUCT_TOL:
            u0 = -gauss.cov / gauss.var_xi
            slack = STRUCT_TOL * max(1.0, abs(u0))
            if (
                lo - slack <= u0 <= hi + slack
                and covariance_condition(gauss, u0)
                and bounds.g(u0) <= STRUCT_TOL
            ):
                m = u0
        elif gauss.is_zero:
            part = _nonpositive_part(bounds.g, lo, hi)
            if not part.is_empty:
                m = part.sup
    if m is None and is_subordinator(marginal(triplet, "eta"), "-"):
        m = 0.0
    return m


@dataclass(frozen=True)
class ZInfSupport:
    """Bounds of the support of ``Z_inf`` (or its single atom when degenerate)."""

    lower: float
    upper: float
    degenerate_point: float | None = None

    def to_json(self) -> dict:
        return {
            "lower": ext_to_json(self.lower),
            "upper": ext_to_json(self.upper),
            "degenerate_point": self.degenerate_point,
        }


def z_infinity_support(triplet: BivariateTriplet, bounds: BoundsReport | None = None) -> ZInfSupport:
    lim = limit_conditions(triplet)
    if not lim.convergent:
        raise ValueError(
            f"Z_t converges only when xi drifts to +inf with a finite integral; got {lim.asymptotic.tag.value}"
        )
    bounds = bounds or compute_bounds(triplet)
    if bounds.degenerate is not None:
        c = bounds.degenerate.c
        return ZInfSupport(-c, -c, -c)
    return ZInfSupport(-bounds.L.inf, -bounds.U.sup)


def regime_is_monotone(regime: RuinRegime) -> bool:
    """Severity never increases along ``z`` (``Unknown`` pieces are skipped)."""
    levels = [SEVERITY[r] for _, r in regime.segments if r is not Regime.UNKNOWN]
    return all(a >= b for a, b in zip(levels, levels[1:]))


def zero_region_start(regime: RuinRegime) -> float:
    for span, r in regime.segments:
        if r is Regime.ZERO:
            return span.lo
    return math.inf
