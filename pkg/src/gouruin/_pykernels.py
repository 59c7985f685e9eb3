"""Pure-Python exact path kernel (fallback for the compiled one).

Without a Gaussian part ``V`` follows ``V' = d_xi V + d_eta`` between jumps
and is therefore monotone there, so events and the horizon carry all of its
running extremes. ``xi`` and ``Z = int e^{-xi_-} d eta`` are tracked
separately so that ``V = e^xi (z + Z)`` can be checked at every jump.
"""

from __future__ import annotations

import math

import numpy as np

STATUS_OK = 0
STATUS_NONFINITE = 1

SIDE_LOWER = 0
SIDE_UPPER = 1


def phi(a: float) -> float:
    """``expm1(a) / a`` with the removable singularity filled in."""
    if a == 0.0:
        return 1.0
    return math.expm1(a) / a


def flow(v0: float, d_xi: float, d_eta: float, tau: float) -> float:
    """Value after time ``tau`` of the linear flow started at ``v0``."""
    a = d_xi * tau
    return v0 * math.exp(a) + d_eta * tau * phi(a)


def crossing_time(v0: float, d_xi: float, d_eta: float) -> float:
    """Time at which the flow from ``v0 >= 0`` reaches zero (caller checks it does)."""
    if d_xi == 0.0:
        return -v0 / d_eta
    w = v0 * d_xi / (v0 * d_xi + d_eta)
    return math.log1p(-w) / d_xi


def exact_path(z, d_xi, d_eta, horizon, times, xs, ys, level=math.nan, side=SIDE_LOWER, record=None):
    """Run one path over its sorted jump ``times`` with jump sizes ``xs``/``ys``.

    Returns ``(ruin_time, vmin, vmax, v_term, z_term, xi_term, crossings,
    identity_err, status)``. ``ruin_time`` is NaN if ``V`` never goes below 0
    before ``horizon``. ``identity_err`` is the largest ``|V - e^xi (z + Z)|``
    after a jump, relative to ``e^xi (|z| + int e^{-xi} |d eta|)``. When
    ``record`` is a dict it receives per-event lists.
    """
    v = z
    xi = 0.0
    zz = 0.0
    zabs = 0.0  # integral of e^{-xi} |d eta|: the rounding scale of Z
    t = 0.0
    ruin = 0.0 if z < 0 else math.nan
    vmin = vmax = z
    crossings = 0
    err = 0.0
    if record is not None:
        for key in ("t", "v_minus", "v_plus", "xi_minus", "xi_plus", "z_minus", "z_plus", "x", "y"):
            record[key] = []
    n = len(times)
    for k in range(n + 1):
        t_next = times[k] if k < n else horizon
        tau = t_next - t
        if tau > 0.0:
            v_end = flow(v, d_xi, d_eta, tau)
            if math.isnan(ruin) and v >= 0.0 and v_end < 0.0:
                s = crossing_time(v, d_xi, d_eta)
                ruin = t + min(max(s, 0.0), tau)
            dz = d_eta * math.exp(-xi) * tau * phi(-d_xi * tau)
            zz += dz
            zabs += abs(dz)
            xi += d_xi * tau
            v = v_end
            t = t_next
        vmin = min(vmin, v)
        vmax = max(vmax, v)
        if k == n:
            break
        x, y = xs[k], ys[k]
        v_minus, xi_minus, z_minus = v, xi, zz
        dz = math.exp(-xi) * y
        zz += dz
        zabs += abs(dz)
        xi += x
        v = math.exp(x) * (v_minus + y)
        if level == level:
            if side == SIDE_LOWER and v_minus > level >= v:
                crossings += 1
            elif side == SIDE_UPPER and v_minus < level <= v:
                crossings += 1
        if math.isnan(ruin) and v < 0.0:
            ruin = t
        ez = math.exp(xi)
        scale = max(abs(v), ez * (abs(z) + zabs), 1e-300)
        err = max(err, abs(v - ez * (z + zz)) / scale)
        vmin = min(vmin, v)
        vmax = max(vmax, v)
        if not (math.isfinite(v) and math.isfinite(zz)):
            return ruin, vmin, vmax, v, zz, xi, crossings, err, STATUS_NONFINITE
        if record is not None:
            record["t"].append(t)
            record["v_minus"].append(v_minus)
            record["v_plus"].append(v)
            record["xi_minus"].append(xi_minus)
            record["xi_plus"].append(xi)
            record["z_minus"].append(z_minus)
            record["z_plus"].append(zz)
            record["x"].append(x)
            record["y"].append(y)
    if not (math.isfinite(v) and math.isfinite(zz)):
        return ruin, vmin, vmax, v, zz, xi, crossings, err, STATUS_NONFINITE
    return ruin, vmin, vmax, v, zz, xi, crossings, err, STATUS_OK


def simulate_exact_batch(z, d_xi, d_eta, horizon, offsets, times, xs, ys, level=math.nan, side=SIDE_LOWER):
    """Run every path of a flattened batch; path ``i`` owns ``offsets[i]:offsets[i+1]``."""
    n_paths = len(offsets) - 1
    out = {
        "ruin_time": np.empty(n_paths),
        "vmin": np.empty(n_paths),
        "vmax": np.empty(n_paths),
        "v_term": np.empty(n_paths),
        "z_term": np.empty(n_paths),
        "xi_term": np.empty(n_paths),
        "crossings": np.empty(n_paths, dtype=np.int64),
        "identity_err": np.empty(n_paths),
        "status": np.empty(n_paths, dtype=np.int8),
    }
    times_l = times.tolist()
    xs_l = xs.tolist()
    ys_l = ys.tolist()
    names = list(out)
    for i in range(n_paths):
        a, b = int(offsets[i]), int(offsets[i + 1])
        res = exact_path(z, d_xi, d_eta, horizon, times_l[a:b], xs_l[a:b], ys_l[a:b], level, side)
        for name, value in zip(names, res):
            out[name][i] = value
    return out
