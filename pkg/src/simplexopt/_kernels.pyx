# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot per-step kernels; mirror of ``_kernels_py``.

Single fused passes over the weight vector, no temporaries.  Semantics
must match the numpy fallback exactly (the test suite cross-checks them).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, exp

cnp.import_array()

COMPILED = True


def step_stats(const double[::1] w, const double[::1] g, double eps):
    """(wg, max centered, max centered over support, weighted var, max centered^2)."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double wg = 0.0
    for i in range(n):
        wg += w[i] * g[i]
    cdef double c, sq
    cdef double maxc = -INFINITY
    cdef double maxs = -INFINITY
    cdef double var = 0.0
    cdef double maxsq = 0.0
    for i in range(n):
        c = g[i] - wg
        sq = c * c
        if c > maxc:
            maxc = c
        if w[i] > eps and c > maxs:
            maxs = c
        if sq > maxsq:
            maxsq = sq
        var += w[i] * sq
    return wg, maxc, maxs, var, maxsq


def cs_linear_apply(const double[::1] w, const double[::1] g, double wg,
                    double eta, double eps):
    """w_i (1 - eta (g_i - wg)) with the zero set pinned, renormalized."""
    cdef Py_ssize_t i, n = w.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double v, total = 0.0
    for i in range(n):
        if w[i] <= eps:
            out[i] = 0.0
        else:
            v = w[i] * (1.0 - eta * (g[i] - wg))
            if v < 0.0:
                v = 0.0
            out[i] = v
            total += v
    if total <= 0.0:
        raise ValueError("step annihilated all mass")
    for i in range(n):
        out[i] /= total
    return out_arr


def cs_exp_apply(const double[::1] w, const double[::1] g, double wg,
                 double eta, double eps):
    """w_i exp(-eta (g_i - wg)) on the support, renormalized."""
    cdef Py_ssize_t i, n = w.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double e, total = 0.0
    cdef double shift = -INFINITY
    cdef bint any_support = False
    for i in range(n):
        if w[i] > eps:
            any_support = True
            e = -eta * (g[i] - wg)
            if e > shift:
                shift = e
    if not any_support:
        raise ValueError("empty support")
    for i in range(n):
        if w[i] > eps:
            out[i] = w[i] * exp(-eta * (g[i] - wg) - shift)
            total += out[i]
        else:
            out[i] = 0.0
    if total <= 0.0:
        raise ValueError("step annihilated all mass")
    for i in range(n):
        out[i] /= total
    return out_arr


def egd_apply(const double[::1] w, const double[::1] g, double eta, double eps):
    """w_i exp(-eta g_i) on the support, renormalized (max-exponent guard)."""
    cdef Py_ssize_t i, n = w.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double e, total = 0.0
    cdef double shift = -INFINITY
    cdef bint any_support = False
    for i in range(n):
        if w[i] > eps:
            any_support = True
            e = -eta * g[i]
            if e > shift:
                shift = e
    if not any_support:
        raise ValueError("empty support")
    for i in range(n):
        if w[i] > eps:
            out[i] = w[i] * exp(-eta * g[i] - shift)
            total += out[i]
        else:
            out[i] = 0.0
    if total <= 0.0:
        raise ValueError("step annihilated all mass")
    for i in range(n):
        out[i] /= total
    return out_arr


def project_simplex(const double[::1] v):
    """Euclidean projection onto the unit simplex by sort-and-threshold."""
    cdef Py_ssize_t i, n = v.shape[0]
    u_arr = np.sort(np.asarray(v))[::-1].copy()
    cdef double[::1] u = u_arr
    cdef double css = 0.0
    cdef double theta = 0.0
    cdef Py_ssize_t rho = -1
    cdef double css_at_rho = 0.0
    for i in range(n):
        css += u[i]
        if u[i] - (css - 1.0) / (i + 1) > 0.0:
            rho = i
            css_at_rho = css
    theta = (css_at_rho - 1.0) / (rho + 1)
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double x
    for i in range(n):
        x = v[i] - theta
        out[i] = x if x > 0.0 else 0.0
    return out_arr
