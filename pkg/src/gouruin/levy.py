"""Bivariate Levy processes with finite-activity atomic jump measures.

A model is stored by its pathwise drift vector ``d``, a 2x2 Gaussian
covariance and a finite list of jump atoms weighted by rate (Levy-measure
mass, not probability). Finite activity means every model here is of finite
variation in its jump part, so ``d`` is always well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

STRUCT_TOL = 1e-12

Component = Literal["xi", "eta"]


class ModelError(ValueError):
    """Raised for an invalid model (bad atom, non-PSD covariance, ...)."""


@dataclass(frozen=True)
class JumpAtom:
    rate: float
    x: float
    y: float

    def __post_init__(self) -> None:
        for name in ("rate", "x", "y"):
            if not math.isfinite(getattr(self, name)):
                raise ModelError(f"jump atom {name} must be finite, got {getattr(self, name)!r}")
        if self.rate <= 0:
            raise ModelError(f"jump atom rate must be > 0, got {self.rate!r}")
        if self.x == 0 and self.y == 0:
            raise ModelError("jump atom at (0, 0) carries no jump")


@dataclass(frozen=True)
class AtomicJumpMeasure:
    """Finite sum of point masses. Atoms sharing a location are merged."""

    atoms: tuple[JumpAtom, ...] = ()

    def __post_init__(self) -> None:
        merged: dict[tuple[float, float], float] = {}
        for atom in self.atoms:
            key = (float(atom.x), float(atom.y))
            merged[key] = merged.get(key, 0.0) + float(atom.rate)
        atoms = tuple(JumpAtom(rate, x, y) for (x, y), rate in merged.items())
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_rates(cls, triples: Iterable[tuple[float, float, float]]) -> AtomicJumpMeasure:
        return cls(tuple(JumpAtom(float(r), float(x), float(y)) for r, x, y in triples))

    @classmethod
    def from_compound_poisson(
        cls, lam: float, atoms: Iterable[tuple[float, float, float]], tol: float = 1e-9
    ) -> AtomicJumpMeasure:
        """Convert ``lam`` and a jump-size law ``[(p, x, y), ...]`` to rates."""
        atoms = list(atoms)
        if not lam > 0:
            raise ModelError(f"compound Poisson intensity must be > 0, got {lam!r}")
        total = sum(p for p, _, _ in atoms)
        if abs(total - 1.0) > tol:
            raise ModelError(f"jump probabilities sum to {total!r}, expected 1")
        return cls.from_rates((lam * p, x, y) for p, x, y in atoms if p > 0)

    @property
    def total_rate(self) -> float:
        return sum(a.rate for a in self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)


@dataclass(frozen=True)
class GaussianCovariance:
    var_xi: float = 0.0
    cov: float = 0.0
    var_eta: float = 0.0

    def __post_init__(self) -> None:
        if self.var_xi < 0 or self.var_eta < 0:
            raise ModelError("Gaussian variances must be nonnegative")
        if self.cov * self.cov > self.var_xi * self.var_eta + STRUCT_TOL:
            raise ModelError(
                f"covariance matrix is not positive semidefinite: "
                f"cov^2={self.cov * self.cov!r} > var_xi*var_eta={self.var_xi * self.var_eta!r}"
            )

    @property
    def is_zero(self) -> bool:
        return (
            abs(self.var_xi) <= STRUCT_TOL
            and abs(self.cov) <= STRUCT_TOL
            and abs(self.var_eta) <= STRUCT_TOL
        )

    def matrix(self) -> list[list[float]]:
        return [[self.var_xi, self.cov], [self.cov, self.var_eta]]


@dataclass(frozen=True)
class MarginalTriplet:
    """One-dimensional finite-activity triplet ``(d, sigma^2, atoms)``.

    ``atoms`` is a tuple of ``(rate, size)`` pairs with distinct nonzero sizes.
    """

    drift: float
    variance: float = 0.0
    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ModelError("variance must be nonnegative")
        merged: dict[float, float] = {}
        for rate, size in self.atoms:
            if rate <= 0:
                raise ModelError(f"marginal atom rate must be > 0, got {rate!r}")
            if size == 0:
                raise ModelError("marginal atom of size 0")
            merged[float(size)] = merged.get(float(size), 0.0) + float(rate)
        object.__setattr__(
            self, "atoms", tuple((rate, size) for size, rate in sorted(merged.items()))
        )

    @property
    def total_rate(self) -> float:
        return sum(r for r, _ in self.atoms)

    def negated(self) -> MarginalTriplet:
        return MarginalTriplet(-self.drift, self.variance, tuple((r, -s) for r, s in self.atoms))

    @property
    def is_zero(self) -> bool:
        return self.drift == 0 and self.variance <= STRUCT_TOL and not self.atoms


@dataclass(frozen=True)
class BivariateTriplet:
    """Characteristic data of ``(xi, eta)`` in drift-vector form."""

    drift_xi: float = 0.0
    drift_eta: float = 0.0
    gaussian: GaussianCovariance = field(default_factory=GaussianCovariance)
    jumps: AtomicJumpMeasure = field(default_factory=AtomicJumpMeasure)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.drift_xi) and math.isfinite(self.drift_eta)):
            raise ModelError("drift must be finite")
        if marginal(self, "eta").is_zero:
            # V_t = z e^{xi_t}: nothing to classify, and L and U would meet at 0.
            raise ModelError("eta is identically zero; the ruin problem is trivial")

    @classmethod
    def build(
        cls,
        drift: tuple[float, float] = (0.0, 0.0),
        gaussian: tuple[float, float, float] = (0.0, 0.0, 0.0),
        jumps: Sequence[tuple[float, float, float]] = (),
    ) -> BivariateTriplet:
        """Convenience constructor; ``jumps`` holds ``(rate, x, y)`` triples."""
        return cls(
            float(drift[0]),
            float(drift[1]),
            GaussianCovariance(*map(float, gaussian)),
            AtomicJumpMeasure.from_rates(jumps),
        )

    @property
    def atoms(self) -> tuple[JumpAtom, ...]:
        return self.jumps.atoms

    @property
    def has_gaussian(self) -> bool:
        return not self.gaussian.is_zero


def marginal(triplet: BivariateTriplet, which: Component) -> MarginalTriplet:
    """Project onto ``xi`` or ``eta``; zero-size projections are dropped."""
    if which == "xi":
        return MarginalTriplet(
            triplet.drift_xi,
            triplet.gaussian.var_xi,
            tuple((a.rate, a.x) for a in triplet.atoms if a.x != 0),
        )
    if which == "eta":
        return MarginalTriplet(
            triplet.drift_eta,
            triplet.gaussian.var_eta,
            tuple((a.rate, a.y) for a in triplet.atoms if a.y != 0),
        )
    raise ValueError(f"unknown component {which!r}")


def gamma_from_drift(m: MarginalTriplet) -> float:
    """Truncated location ``gamma = d + sum_{|s|<1} rate*s``."""
    return m.drift + sum(r * s for r, s in m.atoms if abs(s) < 1)


def drift_from_gamma(gamma: float, m: MarginalTriplet) -> float:
    return gamma - sum(r * s for r, s in m.atoms if abs(s) < 1)


def bivariate_gamma(triplet: BivariateTriplet) -> tuple[float, float]:
    """Location vector truncated on the unit disc of R^2."""
    gx = triplet.drift_xi + sum(a.rate * a.x for a in triplet.atoms if a.x**2 + a.y**2 < 1)
    gy = triplet.drift_eta + sum(a.rate * a.y for a in triplet.atoms if a.x**2 + a.y**2 < 1)
    return gx, gy


def marginal_gamma_from_bivariate(triplet: BivariateTriplet, which: Component) -> float:
    """Marginal location from the bivariate one (unit disc -> unit interval)."""
    gx, gy = bivariate_gamma(triplet)
    if which == "xi":
        return gx + sum(
            a.rate * a.x for a in triplet.atoms if abs(a.x) < 1 and a.x**2 + a.y**2 >= 1
        )
    return gy + sum(a.rate * a.y for a in triplet.atoms if abs(a.y) < 1 and a.x**2 + a.y**2 >= 1)


def is_subordinator(m: MarginalTriplet, sign: Literal["+", "-"] = "+") -> bool:
    """True iff ``m`` (or ``-m`` for sign '-') has nondecreasing paths."""
    s = 1.0 if sign == "+" else -1.0
    if m.variance > STRUCT_TOL:
        return False
    if s * m.drift < 0:
        return False
    return all(s * size >= 0 for _, size in m.atoms)


def jump_of_eta_minus_uW(u: float, x: float, y: float) -> float:
    """Jump of ``eta - u W`` where ``exp(-xi)`` is the stochastic exponential of W."""
    return y - u * math.expm1(-x)


def has_no_negative_eta_jumps(triplet: BivariateTriplet) -> bool:
    return all(a.y >= 0 for a in triplet.atoms)


def has_no_positive_eta_jumps(triplet: BivariateTriplet) -> bool:
    return all(a.y <= 0 for a in triplet.atoms)
