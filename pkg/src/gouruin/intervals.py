"""Connected subsets of the real line with possibly infinite endpoints."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

INF = math.inf
SNAP_RTOL = 1e-12


def ext_to_json(v: float | None):
    if v is None:
        return None
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return float(v)


def ext_from_json(v) -> float:
    if isinstance(v, str):
        if v in ("inf", "+inf"):
            return INF
        if v == "-inf":
            return -INF
        raise ValueError(f"not an extended real: {v!r}")
    return float(v)


class Kind(enum.Enum):
    EMPTY = "empty"
    SINGLETON = "singleton"
    CLOSED = "closed"
    LEFT_RAY = "left-ray"  # (-inf, b]
    RIGHT_RAY = "right-ray"  # [a, inf)
    ALL = "all"


@dataclass(frozen=True)
class ExtInterval:
    """``kind`` plus endpoints; ``a``/``b`` are ``-inf``/``inf`` on open sides.

    For ``EMPTY`` the endpoints keep whatever crossed bounds produced it.
    """

    kind: Kind
    a: float = INF
    b: float = -INF

    @classmethod
    def empty(cls, a: float = INF, b: float = -INF) -> ExtInterval:
        return cls(Kind.EMPTY, a, b)

    @classmethod
    def everything(cls) -> ExtInterval:
        return cls(Kind.ALL, -INF, INF)

    @classmethod
    def point(cls, a: float) -> ExtInterval:
        return cls(Kind.SINGLETON, a, a)

    @classmethod
    def between(cls, lo: float, hi: float, snap: bool = True) -> ExtInterval:
        """Normalise ``[lo, hi]`` (infinite ends meaning rays).

        With ``snap``, bounds within a relative 1e-12 of each other (in either
        order, i.e. rounding noise) collapse to a single point.
        """
        if snap and lo != hi and math.isfinite(lo) and math.isfinite(hi):
            if abs(lo - hi) <= SNAP_RTOL * max(1.0, abs(lo), abs(hi)):
                hi = lo = max(lo, hi) if lo > hi else lo
        if lo > hi or lo == INF or hi == -INF:
            return cls.empty(lo, hi)
        if lo == -INF and hi == INF:
            return cls.everything()
        if lo == -INF:
            return cls(Kind.LEFT_RAY, -INF, hi)
        if hi == INF:
            return cls(Kind.RIGHT_RAY, lo, INF)
        if lo == hi:
            return cls.point(lo)
        return cls(Kind.CLOSED, lo, hi)

    @property
    def is_empty(self) -> bool:
        return self.kind is Kind.EMPTY

    @property
    def inf(self) -> float:
        """Infimum, with ``inf(empty) = +inf``."""
        return INF if self.is_empty else self.a

    @property
    def sup(self) -> float:
        """Supremum, with ``sup(empty) = -inf``."""
        return -INF if self.is_empty else self.b

    def __contains__(self, u: float) -> bool:
        return not self.is_empty and self.a <= u <= self.b

    def intersect(self, other: ExtInterval) -> ExtInterval:
        if self.is_empty or other.is_empty:
            return ExtInterval.empty()
        return ExtInterval.between(max(self.a, other.a), min(self.b, other.b))

    def meets_nonnegative(self) -> bool:
        return not self.is_empty and self.b >= 0

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "a": ext_to_json(self.a), "b": ext_to_json(self.b)}
        if self.is_empty:
            out["a"] = out["b"] = None
            if math.isfinite(self.a) or math.isfinite(self.b):
                out["raw"] = [ext_to_json(self.a), ext_to_json(self.b)]
        return out

    @classmethod
    def from_json(cls, d: dict) -> ExtInterval:
        kind = Kind(d["kind"])
        if kind is Kind.EMPTY:
            return cls.empty()
        if kind is Kind.ALL:
            return cls.everything()
        return cls.between(ext_from_json(d["a"]), ext_from_json(d["b"]), snap=False)

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        if self.kind is Kind.SINGLETON:
            return f"{{{self.a:.6g}}}"
        left = "(-inf" if self.a == -INF else f"[{self.a:.6g}"
        right = "inf)" if self.b == INF else f"{self.b:.6g}]"
        return f"{left}, {right}"


@dataclass(frozen=True)
class Span:
    """An interval with explicit open/closed ends, e.g. ``(a, b)`` or ``[0, m]``."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __contains__(self, u: float) -> bool:
        above = u >= self.lo if self.lo_closed else u > self.lo
        below = u <= self.hi if self.hi_closed else u < self.hi
        return above and below

    @property
    def is_empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    @classmethod
    def of(cls, iv: ExtInterval) -> Span:
        return cls(iv.a, iv.b, math.isfinite(iv.a), math.isfinite(iv.b))

    def to_json(self) -> dict:
        return {
            "lo": ext_to_json(self.lo),
            "hi": ext_to_json(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:.6g}, {self.hi:.6g}{right}"
