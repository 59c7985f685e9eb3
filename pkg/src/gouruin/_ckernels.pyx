# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled exact path kernel; same arithmetic, in the same order, as ``_pykernels``."""

import numpy as np

from libc.math cimport exp, expm1, log1p, fabs, isnan, isfinite, NAN

cdef int STATUS_OK = 0
cdef int STATUS_NONFINITE = 1
cdef int SIDE_LOWER = 0
cdef int SIDE_UPPER = 1


cdef inline double _phi(double a) noexcept nogil:
    if a == 0.0:
        return 1.0
    return expm1(a) / a


cdef inline double _flow(double v0, double d_xi, double d_eta, double tau) noexcept nogil:
    cdef double a = d_xi * tau
    return v0 * exp(a) + d_eta * tau * _phi(a)


cdef inline double _crossing_time(double v0, double d_xi, double d_eta) noexcept nogil:
    cdef double w
    if d_xi == 0.0:
        return -v0 / d_eta
    w = v0 * d_xi / (v0 * d_xi + d_eta)
    return log1p(-w) / d_xi


cdef void _run_batch(
    double z, double d_xi, double d_eta, double horizon,
    const long long[::1] offsets, const double[::1] times,
    const double[::1] xs, const double[::1] ys,
    double level, int side,
    double[::1] ruin_time, double[::1] vmin_out, double[::1] vmax_out,
    double[::1] v_term, double[::1] z_term, double[::1] xi_term,
    long long[::1] crossings_out, double[::1] err_out, signed char[::1] status_out,
) noexcept nogil:
    cdef Py_ssize_t n_paths = offsets.shape[0] - 1
    cdef Py_ssize_t i, k, a, b
    cdef double v, xi, zz, t, ruin, vmin, vmax, err, t_next, tau, v_end, s
    cdef double x, y, v_minus, ez, scale, diff, dz, zabs
    cdef long long crossings
    cdef int status
    cdef bint check_level = not isnan(level)
    for i in range(n_paths):
        a = offsets[i]
        b = offsets[i + 1]
        v = z
        xi = 0.0
        zz = 0.0
        zabs = 0.0
        t = 0.0
        ruin = 0.0 if z < 0 else NAN
        vmin = z
        vmax = z
        crossings = 0
        err = 0.0
        status = STATUS_OK
        for k in range(a, b + 1):
            t_next = times[k] if k < b else horizon
            tau = t_next - t
            if tau > 0.0:
                v_end = _flow(v, d_xi, d_eta, tau)
                if isnan(ruin) and v >= 0.0 and v_end < 0.0:
                    s = _crossing_time(v, d_xi, d_eta)
                    if s < 0.0:
                        s = 0.0
                    if s > tau:
                        s = tau
                    ruin = t + s
                dz = d_eta * exp(-xi) * tau * _phi(-d_xi * tau)
                zz += dz
                zabs += fabs(dz)
                xi += d_xi * tau
                v = v_end
                t = t_next
            if v < vmin:
                vmin = v
            if v > vmax:
                vmax = v
            if k == b:
                break
            x = xs[k]
            y = ys[k]
            v_minus = v
            dz = exp(-xi) * y
            zz += dz
            zabs += fabs(dz)
            xi += x
            v = exp(x) * (v_minus + y)
            if check_level:
                if side == SIDE_LOWER and v_minus > level and level >= v:
                    crossings += 1
                elif side == SIDE_UPPER and v_minus < level and level <= v:
                    crossings += 1
            if isnan(ruin) and v < 0.0:
                ruin = t
            ez = exp(xi)
            scale = fabs(v)
            if ez * (fabs(z) + zabs) > scale:
                scale = ez * (fabs(z) + zabs)
            if scale < 1e-300:
                scale = 1e-300
            diff = fabs(v - ez * (z + zz)) / scale
            if diff > err:
                err = diff
            if v < vmin:
                vmin = v
            if v > vmax:
                vmax = v
            if not (isfinite(v) and isfinite(zz)):
                status = STATUS_NONFINITE
                break
        if not (isfinite(v) and isfinite(zz)):
            status = STATUS_NONFINITE
        ruin_time[i] = ruin
        vmin_out[i] = vmin
        vmax_out[i] = vmax
        v_term[i] = v
        z_term[i] = zz
        xi_term[i] = xi
        crossings_out[i] = crossings
        err_out[i] = err
        status_out[i] = status


def simulate_exact_batch(double z, double d_xi, double d_eta, double horizon,
                         offsets, times, xs, ys, double level=NAN, int side=0):
    """Compiled counterpart of ``_pykernels.simulate_exact_batch``; releases the GIL."""
    cdef Py_ssize_t n_paths = len(offsets) - 1
    off = np.ascontiguousarray(offsets, dtype=np.int64)
    tt = np.ascontiguousarray(times, dtype=np.float64)
    xx = np.ascontiguousarray(xs, dtype=np.float64)
    yy = np.ascontiguousarray(ys, dtype=np.float64)
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
    cdef const long long[::1] off_v = off
    cdef const double[::1] t_v = tt
    cdef const double[::1] x_v = xx
    cdef const double[::1] y_v = yy
    cdef double[::1] r_v = out["ruin_time"]
    cdef double[::1] mn_v = out["vmin"]
    cdef double[::1] mx_v = out["vmax"]
    cdef double[::1] vt_v = out["v_term"]
    cdef double[::1] zt_v = out["z_term"]
    cdef double[::1] xt_v = out["xi_term"]
    cdef long long[::1] c_v = out["crossings"]
    cdef double[::1] e_v = out["identity_err"]
    cdef signed char[::1] s_v = out["status"]
    with nogil:
        _run_batch(z, d_xi, d_eta, horizon, off_v, t_v, x_v, y_v, level, side,
                   r_v, mn_v, mx_v, vt_v, zt_v, xt_v, c_v, e_v, s_v)
    return out
