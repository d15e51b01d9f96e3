"""Concrete objectives: convex-hull projection and exam-score reweighting.

Objectives evaluate on raw weight arrays (not just simplex points) so that
finite differences can probe them coordinate-wise; they are immutable
after construction and safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .exceptions import DimensionError, DomainError, NumericalError

_SQRT2PI = math.sqrt(2.0 * math.pi)
_DENSITY_FLOOR = 1e-300


def _phi(u):
    return np.exp(-0.5 * u * u) / _SQRT2PI


class HullProjectionProblem:
    """Squared distance from a target to a weighted combination of points.

    f(w) = ||w X - y||^2 with X holding one point per row; minimizing over
    the simplex projects y onto the convex hull of the rows.
    """

    is_quadratic = True

    def __init__(self, points, target):
        X = np.ascontiguousarray(points, dtype=np.float64)
        y = np.ascontiguousarray(target, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1:
            raise DimensionError("points must be a non-empty n x d matrix")
        if y.ndim != 1 or y.shape[0] != X.shape[1]:
            raise DimensionError("target length must match the point dimension")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ValueError("points and target must be finite")
        self.points = X
        self.target = y
        self._lipschitz = None

    @property
    def n_weights(self) -> int:
        return self.points.shape[0]

    def predict(self, w) -> np.ndarray:
        """The combined point w X."""
        return np.asarray(w, dtype=np.float64) @ self.points

    def value(self, w) -> float:
        r = self.predict(w) - self.target
        return float(r @ r)

    def value_grad(self, w):
        r = self.predict(w) - self.target
        return float(r @ r), 2.0 * (self.points @ r)

    def line_minimizer(self, w, d) -> float:
        """Unconstrained argmin of f along w - eta d (0 if d maps to 0)."""
        dX = np.asarray(d, dtype=np.float64) @ self.points
        den = float(dX @ dX)
        if den == 0.0:
            return 0.0
        r = self.predict(w) - self.target
        return float(dX @ r) / den

    def lipschitz(self) -> float:
        """Gradient Lipschitz constant 2 sigma_max(X)^2."""
        if self._lipschitz is None:
            s = np.linalg.svd(self.points, compute_uv=False)
            self._lipschitz = 2.0 * float(s[0] ** 2)
        return self._lipschitz


def hull_value_grad(problem: HullProjectionProblem, w):
    """Value and gradient of the hull objective at w (array or SimplexPoint)."""
    w = getattr(w, "weights", w)
    return problem.value_grad(w)


@dataclass(frozen=True)
class TruncatedNormal:
    """Normal density truncated to [0, 1] and renormalized to unit mass."""

    mean: float
    std: float

    def __post_init__(self):
        if self.std <= 0.0:
            raise DomainError("std must be positive")

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        mass = ndtr((1.0 - self.mean) / self.std) - ndtr(-self.mean / self.std)
        out = _phi((x - self.mean) / self.std) / (self.std * mass)
        return np.where((x < 0.0) | (x > 1.0), 0.0, out)


class ExamWeightingProblem:
    """Reweight exam questions so the score distribution matches a target.

    Each student's weighted score is w . scores[:, j]; a kernel density
    estimate with per-bump truncated-normal kernels (renormalized to unit
    mass on [0, 1]) smooths the scores, and the objective is the Riemann
    sum of the relative entropy between that density and the target on the
    given partition.  Not convex in w.
    """

    is_quadratic = False

    def __init__(self, scores, bandwidth: float = 0.05,
                 target: TruncatedNormal | None = None,
                 partition=None, kernel: str = "truncated-normal"):
        S = np.ascontiguousarray(scores, dtype=np.float64)
        if S.ndim != 2 or S.shape[0] < 1 or S.shape[1] < 1:
            raise DimensionError("scores must be a non-empty n x d matrix")
        if not np.isin(S, (0.0, 1.0)).all():
            raise ValueError("scores entries must be 0 or 1")
        if bandwidth <= 0.0:
            raise DomainError("bandwidth must be positive")
        if kernel != "truncated-normal":
            raise DomainError(f"unsupported kernel {kernel!r}")
        if partition is None:
            partition = np.linspace(0.0, 1.0, 401)
        partition = np.ascontiguousarray(partition, dtype=np.float64)
        if partition.ndim != 1 or partition.size < 2 or (np.diff(partition) <= 0).any():
            raise DomainError("partition must be strictly increasing")
        self.scores = S
        self.bandwidth = float(bandwidth)
        self.target = target or TruncatedNormal(0.5, 0.1)
        self.partition = partition
        self._eval_points = partition[1:]
        self._deltas = np.diff(partition)
        self._target_at_points = np.maximum(
            self.target.pdf(self._eval_points), _DENSITY_FLOOR
        )
        if (self.target.pdf(self._eval_points) <= 0.0).any():
            raise DomainError("target density must be positive on the partition")

    @property
    def n_weights(self) -> int:
        return self.scores.shape[0]

    @property
    def n_students(self) -> int:
        return self.scores.shape[1]

    def weighted_scores(self, w) -> np.ndarray:
        return np.asarray(w, dtype=np.float64) @ self.scores

    def _bumps(self, z, centers):
        """Kernel matrix B[k, j] = density of bump j at z[k], and d B / d center."""
        eps = self.bandwidth
        u = z[:, None] - centers[None, :]
        mass = np.maximum(ndtr((1.0 - centers) / eps) - ndtr(-centers / eps),
                          _DENSITY_FLOOR)
        dmass = (_phi(centers / eps) - _phi((1.0 - centers) / eps)) / eps
        bumps = _phi(u / eps) / (eps * mass[None, :])
        dbumps = bumps * (u / (eps * eps) - (dmass / mass)[None, :])
        return bumps, dbumps

    def density(self, w, z) -> np.ndarray:
        """Kernel density estimate of the weighted scores at points z."""
        z = np.atleast_1d(np.asarray(z, dtype=np.float64))
        inside = (z >= 0.0) & (z <= 1.0)
        bumps, _ = self._bumps(z, self.weighted_scores(w))
        rho = bumps.mean(axis=1)
        rho[~inside] = 0.0
        return rho

    def value(self, w) -> float:
        rho = self.density(w, self._eval_points)
        pos = rho > 0.0
        terms = np.zeros_like(rho)
        terms[pos] = rho[pos] * np.log(rho[pos] / self._target_at_points[pos])
        return float(self._deltas @ terms)

    def value_grad(self, w):
        centers = self.weighted_scores(w)
        bumps, dbumps = self._bumps(self._eval_points, centers)
        d = self.n_students
        rho = bumps.mean(axis=1)
        pos = rho > 0.0
        logratio = np.zeros_like(rho)
        logratio[pos] = np.log(rho[pos] / self._target_at_points[pos])
        value = float(self._deltas @ (rho * logratio))
        coeff = np.where(pos, self._deltas * (logratio + 1.0), 0.0)
        grad = self.scores @ (dbumps.T @ coeff) / d
        return value, grad

    def quadrature_mass(self, w) -> float:
        """Riemann mass of the density over the partition (should be near 1)."""
        return float(self._deltas @ self.density(w, self._eval_points))

    def zero_density_points(self, w) -> np.ndarray:
        """Partition points where the density underflowed to zero."""
        rho = self.density(w, self._eval_points)
        return self._eval_points[rho == 0.0]


def kde_density(problem: ExamWeightingProblem, w, z):
    """Kernel density estimate at z (array or scalar)."""
    w = getattr(w, "weights", w)
    return problem.density(w, z)


def exam_value_grad(problem: ExamWeightingProblem, w):
    """Value and gradient of the exam objective at w."""
    w = getattr(w, "weights", w)
    return problem.value_grad(w)


@dataclass(frozen=True)
class GradientCheckReport:
    """Central-difference errors of an analytic gradient."""

    max_relative_error: float
    per_coordinate: np.ndarray


def finite_difference_check(objective, w, h: float = 1e-6) -> GradientCheckReport:
    """Compare the analytic gradient with central differences at w.

    Errors are relative with denominator max(1, |grad_i|).  Requires an
    interior point (all weights > h) so the probes stay near the domain.
    """
    w = np.asarray(getattr(w, "weights", w), dtype=np.float64)
    if h <= 0.0:
        raise DomainError("h must be positive")
    if (w <= h).any():
        raise DomainError("finite differences need all weights > h")
    _, grad = objective.value_grad(w)
    fd = np.empty_like(grad)
    for i in range(w.shape[0]):
        probe = w.copy()
        probe[i] = w[i] + h
        up = objective.value(probe)
        probe[i] = w[i] - h
        down = objective.value(probe)
        if not (math.isfinite(up) and math.isfinite(down)):
            raise NumericalError("objective evaluated to a non-finite value")
        fd[i] = (up - down) / (2.0 * h)
    errors = np.abs(fd - grad) / np.maximum(1.0, np.abs(grad))
    return GradientCheckReport(float(errors.max()), errors)
