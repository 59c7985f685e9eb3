"""Quadrant masses and the eight critical levels of an atomic jump measure.

For a jump ``(x, y)`` and a level ``u`` the jump of ``eta - u W`` is
``f_u(x, y) = y - u (e^{-x} - 1)``. The quadrants are closed::

    A1 = {x >= 0, y >= 0}   A2 = {x >= 0, y <= 0}
    A3 = {x <= 0, y <= 0}   A4 = {x <= 0, y >= 0}

``theta[i]`` is the extreme ``u`` on the sign-constrained half line for which
some atom of ``A_i`` has ``f_u < 0``; ``theta_prime[i]`` does the same for
``f_u > 0``. For a single atom with ``x != 0`` the boundary is the critical
level ``ratio(x, y)``; atoms on ``x = 0`` have ``f_u = y`` for every ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .levy import STRUCT_TOL, BivariateTriplet

INF = math.inf

# (sup or inf, half line, fallback, (quadrant, excluded neighbour)) for each threshold.
_THETA = {
    1: ("sup", "neg", -INF, (1, 4)),
    2: ("sup", "pos", 0.0, (2, 1)),
    3: ("inf", "neg", 0.0, (3, 4)),
    4: ("inf", "pos", INF, (4, 1)),
}
_THETA_PRIME = {
    1: ("inf", "neg", 0.0, (1, 2)),
    2: ("inf", "pos", INF, (2, 3)),
    3: ("sup", "neg", -INF, (3, 2)),
    4: ("sup", "pos", 0.0, (4, 3)),
}


def _snap(v: float) -> float:
    return 0.0 if abs(v) <= STRUCT_TOL else v


def in_quadrant(i: int, x: float, y: float) -> bool:
    x, y = _snap(x), _snap(y)
    if i == 1:
        return x >= 0 and y >= 0
    if i == 2:
        return x >= 0 and y <= 0
    if i == 3:
        return x <= 0 and y <= 0
    if i == 4:
        return x <= 0 and y >= 0
    raise ValueError(f"quadrant index must be 1..4, got {i!r}")


def ratio(x: float, y: float) -> float:
    """The level ``u`` at which ``y - u (e^{-x} - 1)`` changes sign."""
    if x == 0:
        raise ZeroDivisionError("ratio is undefined for an atom on the vertical axis x = 0")
    return y / math.expm1(-x)


def quadrant_mass(triplet: BivariateTriplet, i: int, minus: int | None = None) -> float:
    """``Pi(A_i)``, or ``Pi(A_i minus A_minus)`` when ``minus`` is given."""
    return sum(
        a.rate
        for a in triplet.atoms
        if in_quadrant(i, a.x, a.y) and not (minus is not None and in_quadrant(minus, a.x, a.y))
    )


def _f(u: float, x: float, y: float) -> float:
    return _snap(y) - u * math.expm1(-_snap(x))


def mass_of_Aiu(triplet: BivariateTriplet, i: int, u: float) -> float:
    """Mass of atoms in ``A_i`` with ``y - u (e^{-x} - 1) < 0``."""
    return sum(a.rate for a in triplet.atoms if in_quadrant(i, a.x, a.y) and _f(u, a.x, a.y) < 0)


def mass_of_Biu(triplet: BivariateTriplet, i: int, u: float) -> float:
    """Mass of atoms in ``A_i`` with ``y - u (e^{-x} - 1) > 0``."""
    return sum(a.rate for a in triplet.atoms if in_quadrant(i, a.x, a.y) and _f(u, a.x, a.y) > 0)


def _level_set(x: float, y: float, negative: bool, half: str) -> tuple[float, float] | None:
    """Closure of ``{u in half line: f_u(x,y) < 0}`` (or ``> 0``) as ``(lo, hi)``.

    ``None`` when the set is empty. Only the closure is needed because the
    thresholds are sups and infs.
    """
    x, y = _snap(x), _snap(y)
    lo_h, hi_h = (-INF, 0.0) if half == "neg" else (0.0, INF)
    h = math.expm1(-x)
    if x == 0:
        hit = y < 0 if negative else y > 0
        return (lo_h, hi_h) if hit else None
    r = y / h
    # f_u < 0  <=>  u*h > y: for h > 0 that is u > r, for h < 0 it is u < r.
    above = (h > 0) == negative
    if above:
        lo, hi = max(r, lo_h), hi_h
        open_lo = lo == r
        if lo > hi or (lo == hi and open_lo):
            return None
    else:
        lo, hi = lo_h, min(r, hi_h)
        open_hi = hi == r
        if lo > hi or (lo == hi and open_hi):
            return None
    return lo, hi


def _threshold(triplet: BivariateTriplet, i: int, table: dict, negative: bool) -> float:
    kind, half, fallback, (quad, excluded) = table[i]
    if quadrant_mass(triplet, quad, excluded) == 0:
        return fallback
    sets = [
        s
        for a in triplet.atoms
        if in_quadrant(quad, a.x, a.y)
        for s in [_level_set(a.x, a.y, negative, half)]
        if s is not None
    ]
    if not sets:
        raise RuntimeError(f"empty level set for threshold {i} with nonzero open-quadrant mass")
    return max(s[1] for s in sets) if kind == "sup" else min(s[0] for s in sets)


def theta(triplet: BivariateTriplet, i: int) -> float:
    return _threshold(triplet, i, _THETA, negative=True)


def theta_prime(triplet: BivariateTriplet, i: int) -> float:
    return _threshold(triplet, i, _THETA_PRIME, negative=False)


OPEN_PAIRS = ((1, 4), (2, 1), (2, 3), (3, 4), (3, 2), (4, 1), (4, 3), (1, 2))


@dataclass(frozen=True)
class ThetaProfile:
    theta: tuple[float, float, float, float]
    theta_prime: tuple[float, float, float, float]
    quadrant_mass: tuple[float, float, float, float]
    open_mass: dict[str, float]

    def t(self, i: int) -> float:
        return self.theta[i - 1]

    def tp(self, i: int) -> float:
        return self.theta_prime[i - 1]

    def mass(self, i: int) -> float:
        return self.quadrant_mass[i - 1]

    def to_json(self) -> dict:
        from .intervals import ext_to_json

        return {
            "theta": {str(i + 1): ext_to_json(v) for i, v in enumerate(self.theta)},
            "theta_prime": {str(i + 1): ext_to_json(v) for i, v in enumerate(self.theta_prime)},
            "quadrant_mass": {str(i + 1): v for i, v in enumerate(self.quadrant_mass)},
            "open_mass": dict(self.open_mass),
        }


def theta_profile(triplet: BivariateTriplet) -> ThetaProfile:
    return ThetaProfile(
        theta=tuple(theta(triplet, i) for i in range(1, 5)),
        theta_prime=tuple(theta_prime(triplet, i) for i in range(1, 5)),
        quadrant_mass=tuple(quadrant_mass(triplet, i) for i in range(1, 5)),
        open_mass={f"A{i}\\A{j}": quadrant_mass(triplet, i, j) for i, j in OPEN_PAIRS},
    )
