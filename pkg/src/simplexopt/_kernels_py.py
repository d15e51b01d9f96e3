"""Numpy implementations of the hot per-step kernels.

This is the fallback for the compiled extension ``simplexopt._kernels``;
both expose the same functions with identical semantics, and the test
suite checks them against each other. All inputs are contiguous float64
arrays; ``eps`` is the zero-set tolerance (weights <= eps are treated as
pinned to zero and stay zero).
"""

import numpy as np

COMPILED = False


def step_stats(w, g, eps):
    """One-pass statistics of the recentred gradient g - (w.g).

    Returns (wg, max_centered, max_centered_support, weighted_var,
    max_centered_sq): the mixture mean of g, the largest recentred
    component over all indices and over the support {w > eps}, the
    w-weighted second moment of the recentred gradient, and the largest
    squared recentred component.
    """
    wg = float(np.dot(w, g))
    centered = g - wg
    var = float(np.dot(w, centered * centered))
    support = w > eps
    if support.any():
        max_support = float(centered[support].max())
    else:
        max_support = float("-inf")
    return (
        wg,
        float(centered.max()),
        max_support,
        var,
        float((centered * centered).max()),
    )


def cs_linear_apply(w, g, wg, eta, eps):
    """Multiplicative recentred step w_i (1 - eta (g_i - wg)), renormalized.

    Indices with w_i <= eps are pinned to zero; factors are floored at 0 to
    absorb roundoff when eta sits exactly on the feasibility boundary.
    """
    out = w * (1.0 - eta * (g - wg))
    out[w <= eps] = 0.0
    np.maximum(out, 0.0, out=out)
    total = out.sum()
    if total <= 0.0:
        raise ValueError("step annihilated all mass")
    out /= total
    return out


def cs_exp_apply(w, g, wg, eta, eps):
    """Exponential variant: w_i exp(-eta (g_i - wg)), renormalized."""
    expo = -eta * (g - wg)
    support = w > eps
    if not support.any():
        raise ValueError("empty support")
    expo -= expo[support].max()
    out = np.where(support, w * np.exp(expo), 0.0)
    total = out.sum()
    if total <= 0.0:
        raise ValueError("step annihilated all mass")
    out /= total
    return out


def egd_apply(w, g, eta, eps):
    """Exponentiated-gradient step w_i exp(-eta g_i), renormalized.

    The largest exponent over the support is subtracted before
    exponentiating; the normalization cancels the shift.
    """
    expo = -eta * g
    support = w > eps
    if not support.any():
        raise ValueError("empty support")
    expo -= expo[support].max()
    out = np.where(support, w * np.exp(expo), 0.0)
    total = out.sum()
    if total <= 0.0:
        raise ValueError("step annihilated all mass")
    out /= total
    return out


def project_simplex(v):
    """Euclidean projection onto the unit simplex by sort-and-threshold."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, n + 1)
    cond = u - css / idx > 0.0
    rho = int(np.nonzero(cond)[0][-1])
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)
