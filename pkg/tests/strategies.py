"""Hypothesis strategies for random finite-activity atomic models."""

from __future__ import annotations

import math

from hypothesis import strategies as st

from gouruin.levy import BivariateTriplet, ModelError

GRID_COORDS = [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0]

coords = st.one_of(
    st.sampled_from(GRID_COORDS),
    st.floats(-4, 4, allow_nan=False).map(lambda v: round(v, 3)),
)
rates = st.sampled_from([0.25, 0.5, 1.0, 2.0])
drifts = st.one_of(st.sampled_from([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]), st.floats(-3, 3).map(lambda v: round(v, 3)))


@st.composite
def atoms(draw, min_size=1, max_size=5):
    out = []
    for _ in range(draw(st.integers(min_size, max_size))):
        x, y = draw(coords), draw(coords)
        if x == 0 and y == 0:
            continue
        out.append((draw(rates), x, y))
    return out


@st.composite
def gaussians(draw):
    kind = draw(st.sampled_from(["zero", "zero", "independent", "linked", "general"]))
    if kind == "zero":
        return (0.0, 0.0, 0.0)
    vx = draw(st.sampled_from([0.0, 0.5, 1.0, 2.0]))
    if kind == "independent":
        return (vx, 0.0, draw(st.sampled_from([0.0, 0.5, 1.0])))
    if kind == "linked":
        # eta - u W has no Gaussian part at u = -cov/var_xi.
        u = draw(st.sampled_from([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]))
        return (vx, -u * vx, u * u * vx)
    ve = draw(st.sampled_from([0.5, 1.0, 2.0]))
    rho = draw(st.floats(-0.99, 0.99))
    return (vx, rho * math.sqrt(vx * ve), ve)


@st.composite
def degenerate_models(draw):
    """Atoms on the curve y = c (e^{-x} - 1) with g(c) = 0."""
    c = draw(st.sampled_from([-2.0, -1.0, 0.5, 1.0, 2.0]))
    d_xi = draw(drifts)
    xs = draw(st.lists(st.sampled_from([-2.0, -1.0, -0.5, 0.5, 1.0, 3.0]), min_size=1, max_size=3, unique=True))
    jumps = [(draw(rates), x, c * math.expm1(-x)) for x in xs]
    return BivariateTriplet.build((d_xi, -c * d_xi), (0.0, 0.0, 0.0), jumps)


@st.composite
def models(draw, gaussian: bool = True, degenerate: bool = True):
    """Random valid model; occasionally degenerate or Gaussian."""
    if degenerate and draw(st.integers(0, 9)) == 0:
        return draw(degenerate_models())
    gauss = draw(gaussians()) if gaussian else (0.0, 0.0, 0.0)
    jumps = draw(atoms())
    drift = (draw(drifts), draw(drifts))
    try:
        return BivariateTriplet.build(drift, gauss, jumps)
    except ModelError:
        return BivariateTriplet.build(drift, gauss, jumps + [(1.0, 0.0, 1.0)])


atomic_models = models(gaussian=False)
