"""Simplex geometry: the iterate type and the basic operations on it.

Everything here is a pure function of its inputs; ``SimplexPoint`` arrays
are frozen after construction, so values can be shared freely between
threads or tasks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import project_simplex, step_stats
from .exceptions import DimensionError, InfiniteDivergenceError

DEFAULT_ZERO_TOL = 1e-10
_SUM_TOL = 1e-12


class SimplexPoint:
    """A probability vector: nonnegative weights that sum to one.

    Construction renormalizes by the total mass and clamps small negative
    entries (within ``zero_tolerance`` of zero) up to zero. Entries at or
    below ``zero_tolerance`` form the active set Q; the rest are the
    support S.
    """

    __slots__ = ("weights", "zero_tolerance")

    def __init__(self, weights, zero_tolerance: float = DEFAULT_ZERO_TOL):
        w = np.array(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise DimensionError("weights must be a non-empty 1-d vector")
        if not np.isfinite(w).all():
            raise ValueError("weights must be finite")
        if zero_tolerance < 0:
            raise ValueError("zero_tolerance must be >= 0")
        neg = w < 0
        if neg.any():
            if (w < -zero_tolerance).any():
                raise ValueError(
                    f"weights must be >= -zero_tolerance, worst {w.min():.3e}"
                )
            w[neg] = 0.0
        total = w.sum()
        if total <= 0.0:
            raise ValueError("weights must have positive total mass")
        w /= total
        w.setflags(write=False)
        self.weights = w
        self.zero_tolerance = float(zero_tolerance)

    @classmethod
    def uniform(cls, n: int, zero_tolerance: float = DEFAULT_ZERO_TOL) -> "SimplexPoint":
        if n < 1:
            raise DimensionError("n must be >= 1")
        return cls(np.full(n, 1.0 / n), zero_tolerance)

    @classmethod
    def _wrap(cls, w: np.ndarray, zero_tolerance: float) -> "SimplexPoint":
        # fast path for arrays that already satisfy the invariants
        p = object.__new__(cls)
        w.setflags(write=False)
        p.weights = w
        p.zero_tolerance = zero_tolerance
        return p

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def support_mask(self) -> np.ndarray:
        return self.weights > self.zero_tolerance

    @property
    def support(self) -> np.ndarray:
        """Indices with weight above the zero tolerance (S)."""
        return np.nonzero(self.support_mask)[0]

    @property
    def active_set(self) -> np.ndarray:
        """Indices with weight at or below the zero tolerance (Q)."""
        return np.nonzero(~self.support_mask)[0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"SimplexPoint({np.array2string(self.weights, precision=6)})"


@dataclass(frozen=True)
class KktReport:
    """First-order optimality residuals at (w, g).

    At an exact constrained minimum the gradient is constant on the
    support (value ``support_multiplier``) and no smaller than that
    constant off it.  ``stationarity_residual`` is the largest deviation
    from constancy over the support; ``active_multipliers`` holds
    g_i - support_multiplier for the active set in index order, and
    ``dual_feasibility_violation`` is the magnitude of the most negative
    one (0 when all are nonnegative or the active set is empty).
    """

    support_multiplier: float
    active_multipliers: np.ndarray
    stationarity_residual: float
    dual_feasibility_violation: float


def as_gradient(values, n: int | None = None) -> np.ndarray:
    """Validate a gradient vector: 1-d, finite, optionally of length n."""
    g = np.asarray(values, dtype=np.float64)
    if g.ndim != 1 or g.size == 0:
        raise DimensionError("gradient must be a non-empty 1-d vector")
    if n is not None and g.shape[0] != n:
        raise DimensionError(f"gradient length {g.shape[0]} != simplex dimension {n}")
    if not np.isfinite(g).all():
        raise ValueError("gradient has non-finite entries")
    return g


def centered_gradient(w: SimplexPoint, g) -> np.ndarray:
    """Recentre g against the mixture mean: g - (w.g).

    This is the rank-one projector I - 1(x)w applied to g; since the
    weights sum to one it annihilates constant vectors and is idempotent.
    """
    g = as_gradient(g, w.n)
    return g - float(np.dot(w.weights, g))


def project_to_simplex(v, zero_tolerance: float = DEFAULT_ZERO_TOL) -> SimplexPoint:
    """Euclidean projection of v onto the simplex (sort-and-threshold)."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError("input must be a non-empty 1-d vector")
    if not np.isfinite(v).all():
        raise ValueError("input has non-finite entries")
    return SimplexPoint(project_simplex(v), zero_tolerance)


def relative_entropy(u: SimplexPoint, w: SimplexPoint) -> float:
    """KL divergence D(u|w) = sum_{u_i>0} u_i log(u_i / w_i).

    Zero entries of u contribute nothing (0 log 0 = 0). If u puts mass on
    an index where w is exactly zero the divergence is infinite and an
    InfiniteDivergenceError is raised.
    """
    if u.n != w.n:
        raise DimensionError("points live on different simplices")
    uu = u.weights
    ww = w.weights
    pos = uu > 0.0
    if (ww[pos] == 0.0).any():
        raise InfiniteDivergenceError("u has mass where w vanishes")
    return float(np.dot(uu[pos], np.log(uu[pos] / ww[pos])))


def weighted_variance(w: SimplexPoint, g) -> float:
    """Variance of g under the weights: w . (g - w.g)^2."""
    g = as_gradient(g, w.n)
    _, _, _, var, _ = step_stats(w.weights, g, w.zero_tolerance)
    return var


def kkt_residual(w: SimplexPoint, g) -> KktReport:
    """Measure how far (w, g) sits from first-order optimality.

    The support multiplier is taken as the arithmetic mean of the gradient
    over the support; with finite-precision gradients no single component
    is a better estimate of the common value.
    """
    g = as_gradient(g, w.n)
    mask = w.support_mask
    beta = float(g[mask].mean())
    stationarity = float(np.abs(g[mask] - beta).max())
    alphas = g[~mask] - beta
    if alphas.size:
        violation = float(max(0.0, -alphas.min()))
    else:
        violation = 0.0
    return KktReport(
        support_multiplier=beta,
        active_multipliers=alphas,
        stationarity_residual=stationarity,
        dual_feasibility_violation=violation,
    )
