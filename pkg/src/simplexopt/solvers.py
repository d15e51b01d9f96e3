"""Iteration schemes on the probability simplex and the driver that runs them.

Methods
-------
cs        multiplicative recentred-gradient step, stays on the simplex
cs-exp    exponential variant of the same flow (positivity for any step)
egd       exponentiated gradient descent (normalized multiplicative weights)
pgd       mean-centred gradient step followed by Euclidean projection
fw        Frank-Wolfe (convex combination with the best vertex)
pfw       pairwise Frank-Wolfe (mass transfer from the worst support vertex)

The ``cs`` step w' = w (1 - eta (g - w.g)) admits a largest feasible rate
1 / max_i (g_i - w.g); restricted to the support it is never smaller,
since zeroed indices stay zero and can be ignored.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._accel import cs_exp_apply, cs_linear_apply, egd_apply, step_stats
from .core import SimplexPoint, as_gradient, kkt_residual, project_to_simplex
from .exceptions import (
    ConfigError,
    DomainError,
    LineSearchError,
    NumericalError,
    StepSizeError,
)

METHODS = ("cs", "cs-exp", "egd", "pgd", "fw", "pfw")

_MAX_SHRINKS = 60
_REL_SLACK = 1e-9  # float allowance when validating eta against its cap


# ---------------------------------------------------------------------------
# single steps
# ---------------------------------------------------------------------------

def cs_max_step(w: SimplexPoint, g, restrict_to_support: bool = False) -> float:
    """Largest feasible rate for the linear cs step; math.inf when unbounded.

    The bound is 1 / max(g_i - w.g), with the max over all indices or, with
    ``restrict_to_support``, only over the support (zeroed weights stay zero
    under the multiplicative update, so they cannot go negative).
    """
    g = as_gradient(g, w.n)
    _, max_full, max_sup, _, _ = step_stats(w.weights, g, w.zero_tolerance)
    m = max_sup if restrict_to_support else max_full
    if m <= 0.0:
        return math.inf
    return 1.0 / m


def cs_step_linear(w: SimplexPoint, g, eta: float) -> SimplexPoint:
    """One linear cs step: w_i (1 - eta (g_i - w.g)), renormalized.

    Entries of the active set are pinned to zero.  ``eta`` must not exceed
    the support-restricted maximum rate, or some weight would go negative.
    """
    g = as_gradient(g, w.n)
    if eta <= 0.0:
        raise DomainError("step size must be positive")
    wg, _, max_sup, _, _ = step_stats(w.weights, g, w.zero_tolerance)
    if max_sup > 0.0 and eta > (1.0 + _REL_SLACK) / max_sup:
        raise StepSizeError(
            f"eta={eta:.6g} exceeds the maximum feasible rate {1.0 / max_sup:.6g}"
        )
    out = cs_linear_apply(w.weights, g, wg, eta, w.zero_tolerance)
    return SimplexPoint._wrap(out, w.zero_tolerance)


def cs_step_exponential(w: SimplexPoint, g, eta: float) -> SimplexPoint:
    """Exponential variant: w_i exp(-eta (g_i - w.g)), renormalized.

    Positivity holds for every eta > 0; the scheme matches the linear step
    to second order in eta.
    """
    g = as_gradient(g, w.n)
    if eta <= 0.0:
        raise DomainError("step size must be positive")
    wg = float(np.dot(w.weights, g))
    out = cs_exp_apply(w.weights, g, wg, eta, w.zero_tolerance)
    return SimplexPoint._wrap(out, w.zero_tolerance)


def egd_step(w: SimplexPoint, g, eta: float) -> SimplexPoint:
    """Exponentiated gradient step: w_i exp(-eta g_i), renormalized."""
    g = as_gradient(g, w.n)
    if eta <= 0.0:
        raise DomainError("step size must be positive")
    out = egd_apply(w.weights, g, eta, w.zero_tolerance)
    return SimplexPoint._wrap(out, w.zero_tolerance)


def pgd_step(w: SimplexPoint, g, eta: float) -> SimplexPoint:
    """Gradient step centred to the zero-sum subspace, then projected.

    The raw step w - eta (g - mean g) keeps the unit sum; the Euclidean
    projection only acts when some entry would turn negative.
    """
    g = as_gradient(g, w.n)
    if eta <= 0.0:
        raise DomainError("step size must be positive")
    v = w.weights - eta * (g - g.mean())
    return project_to_simplex(v, w.zero_tolerance)


def fw_step(w: SimplexPoint, g, gamma: float) -> SimplexPoint:
    """Frank-Wolfe step toward the vertex minimizing the gradient.

    Ties break toward the lowest index.
    """
    g = as_gradient(g, w.n)
    if not 0.0 <= gamma <= 1.0:
        raise StepSizeError("fw step requires 0 <= gamma <= 1")
    s = int(np.argmin(g))
    out = (1.0 - gamma) * w.weights
    out[s] += gamma
    return SimplexPoint(out, w.zero_tolerance)


def pfw_step(w: SimplexPoint, g, gamma: float) -> SimplexPoint:
    """Pairwise Frank-Wolfe: move gamma of mass from the worst support
    vertex (largest gradient) to the best vertex (smallest gradient).

    A step consuming the whole away weight zeroes that coordinate exactly.
    """
    g = as_gradient(g, w.n)
    if gamma < 0.0:
        raise StepSizeError("pfw step requires gamma >= 0")
    s = int(np.argmin(g))
    support = w.support
    v = int(support[np.argmax(g[support])])
    if s == v:
        return SimplexPoint(w.weights.copy(), w.zero_tolerance)
    wv = float(w.weights[v])
    if gamma > wv * (1.0 + _REL_SLACK):
        raise StepSizeError(f"gamma={gamma:.6g} exceeds away weight {wv:.6g}")
    out = w.weights.copy()
    if gamma >= wv * (1.0 - 1e-12):
        out[v] = 0.0
        out[s] += wv
    else:
        out[v] = wv - gamma
        out[s] += gamma
    return SimplexPoint(out, w.zero_tolerance)


# ---------------------------------------------------------------------------
# step-size rules and line searches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepSizeRule:
    """How the driver picks eta each iteration.

    kinds: ``fixed`` (error if infeasible), ``clipped-fixed`` (clip to the
    scheme's cap), ``exact-quadratic`` (closed-form minimizer, quadratic
    objectives only), ``backtracking`` (Armijo with geometric shrinking,
    starting from the scheme's natural cap unless ``eta0`` says otherwise).
    """

    kind: str
    eta0: float | None = None
    shrink: float = 0.5
    armijo_c: float = 1e-4

    def __post_init__(self):
        if self.kind not in ("fixed", "clipped-fixed", "exact-quadratic", "backtracking"):
            raise ConfigError(f"unknown step rule kind {self.kind!r}")
        if self.kind in ("fixed", "clipped-fixed") and (
            self.eta0 is None or self.eta0 <= 0.0
        ):
            raise DomainError("fixed rules need a positive eta")
        if self.eta0 is not None and self.eta0 <= 0.0:
            raise DomainError("eta0 must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise DomainError("shrink factor must lie in (0, 1)")
        if not 0.0 < self.armijo_c < 1.0:
            raise DomainError("Armijo constant must lie in (0, 1)")

    @classmethod
    def fixed(cls, eta: float) -> "StepSizeRule":
        return cls("fixed", eta0=eta)

    @classmethod
    def clipped_fixed(cls, eta: float) -> "StepSizeRule":
        return cls("clipped-fixed", eta0=eta)

    @classmethod
    def exact_quadratic(cls) -> "StepSizeRule":
        return cls("exact-quadratic")

    @classmethod
    def backtracking(cls, eta0: float | None = None, shrink: float = 0.5,
                     armijo_c: float = 1e-4) -> "StepSizeRule":
        return cls("backtracking", eta0=eta0, shrink=shrink, armijo_c=armijo_c)


def default_rule(objective, method: str) -> StepSizeRule:
    """Exact line search when a closed form exists, Armijo backtracking else."""
    quadratic = getattr(objective, "is_quadratic", False)
    if quadratic and method in ("cs", "fw", "pfw", "pgd"):
        return StepSizeRule.exact_quadratic()
    return StepSizeRule.backtracking()


def exact_quadratic_line_search(problem, w: SimplexPoint, direction, eta_cap: float) -> float:
    """Closed-form minimizer of a quadratic objective along w - eta d.

    ``problem`` must expose ``line_minimizer(x, d)`` returning the
    unconstrained argmin along x - eta d (0 for a flat direction).  The
    result is clipped to [0, eta_cap].
    """
    if eta_cap <= 0.0:
        raise DomainError("eta_cap must be positive")
    d = np.asarray(direction, dtype=np.float64)
    if not d.any():
        raise DomainError("direction must be nonzero")
    eta = float(problem.line_minimizer(w.weights, d))
    return float(min(max(eta, 0.0), eta_cap))


def backtracking_line_search(objective, w: SimplexPoint, direction,
                             rule: StepSizeRule) -> float:
    """Armijo backtracking along the straight path w - eta d.

    Returns the first eta in {eta0, rho eta0, rho^2 eta0, ...} with
    f(w - eta d) <= f(w) - c eta (g . d).  Raises if d is not a descent
    direction for that path or if 60 shrinks are not enough.
    """
    if rule.kind != "backtracking":
        raise ConfigError("backtracking_line_search needs a backtracking rule")
    if rule.eta0 is None:
        raise ConfigError("explicit line search needs eta0")
    d = np.asarray(direction, dtype=np.float64)
    f0, g = objective.value_grad(w.weights)
    slope = float(np.dot(g, d))
    if slope <= 0.0:
        raise LineSearchError("not a descent direction (g . d <= 0)")
    return _armijo(lambda eta: w.weights - eta * d, objective.value, f0, slope,
                   rule.eta0, rule.shrink, rule.armijo_c)


def _armijo(candidate, value, f0, slope, eta0, shrink, c):
    eta = eta0
    for _ in range(_MAX_SHRINKS + 1):
        if value(candidate(eta)) <= f0 - c * eta * slope:
            return eta
        eta *= shrink
    raise LineSearchError(
        "Armijo condition unmet after 60 shrinks; gradient and value disagree"
    )


# ---------------------------------------------------------------------------
# termination and traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TerminationRule:
    """When to stop: iteration budget, stationarity floor, or target ball.

    ``gradient_variance_tolerance`` is compared against the weighted
    gradient variance for the multiplicative schemes (their fixed-point
    measure) and against the squared vertex duality gap (w.g - min g)^2
    for fw/pfw/pgd, whose iterates can park on a vertex with zero variance
    without being optimal.  ``target`` is an optional (point, radius)
    pair; the run stops once the objective's ``predict`` image lands
    within ``radius`` of the point.
    """

    max_iterations: int = 10_000
    gradient_variance_tolerance: float = 1e-24
    target: tuple[np.ndarray, float] | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if self.gradient_variance_tolerance < 0.0:
            raise DomainError("variance tolerance must be >= 0")
        if self.target is not None:
            point, radius = self.target
            if radius <= 0.0:
                raise DomainError("target radius must be positive")
            object.__setattr__(self, "target",
                               (np.asarray(point, dtype=np.float64), float(radius)))


@dataclass
class SolverTrace:
    """Per-iterate records of a run.

    Row t describes the iterate w^t: objective value, recentred-gradient
    statistics, and the step taken from it (nan in the final row, where no
    step was taken).  ``objective[-1]`` is the value at the returned point.
    """

    method: str
    objective: np.ndarray = field(default_factory=lambda: np.empty(0))
    step_size: np.ndarray = field(default_factory=lambda: np.empty(0))
    max_step: np.ndarray = field(default_factory=lambda: np.empty(0))
    support_max_step: np.ndarray = field(default_factory=lambda: np.empty(0))
    variance: np.ndarray = field(default_factory=lambda: np.empty(0))
    max_centered_sq: np.ndarray = field(default_factory=lambda: np.empty(0))
    kkt_stationarity: np.ndarray = field(default_factory=lambda: np.empty(0))
    target_distance: np.ndarray = field(default_factory=lambda: np.empty(0))
    elapsed: np.ndarray = field(default_factory=lambda: np.empty(0))
    iterates: list | None = None
    termination_reason: str = ""
    final_point: SimplexPoint | None = None

    @property
    def records(self) -> int:
        return int(self.objective.shape[0])

    @property
    def steps(self) -> int:
        """Number of steps actually taken."""
        return int(np.isfinite(self.step_size).sum())

    @property
    def final_objective(self) -> float:
        return float(self.objective[-1])

    @property
    def wall_time(self) -> float:
        return float(self.elapsed[-1]) if self.records else 0.0


class _Recorder:
    _COLS = ("objective", "step_size", "max_step", "support_max_step", "variance",
             "max_centered_sq", "kkt_stationarity", "target_distance", "elapsed")

    def __init__(self, method, keep_iterates):
        self.rows = {c: [] for c in self._COLS}
        self.method = method
        self.iterates = [] if keep_iterates else None

    def add(self, **vals):
        for c in self._COLS:
            self.rows[c].append(vals.get(c, math.nan))

    def set_step(self, eta):
        self.rows["step_size"][-1] = eta

    def build(self, reason, final_point):
        return SolverTrace(
            method=self.method,
            termination_reason=reason,
            final_point=final_point,
            iterates=self.iterates,
            **{c: np.asarray(self.rows[c], dtype=np.float64) for c in self._COLS},
        )


# ---------------------------------------------------------------------------
# the driver
# ---------------------------------------------------------------------------

def run_solver(objective, method: str, rule: StepSizeRule | None = None,
               stop: TerminationRule | None = None,
               w0: SimplexPoint | None = None,
               record_iterates: bool = False) -> SolverTrace:
    """Iterate ``method`` on ``objective`` until a termination rule fires.

    The objective must expose ``value(x)`` and ``value_grad(x)`` on raw
    arrays; ``line_minimizer`` enables exact quadratic line search and
    ``predict`` enables target-ball stopping.  Every recorded iterate
    satisfies the simplex invariants; zero-set maintenance (pinning and
    renormalization) happens inside each step.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; valid: {', '.join(METHODS)}")
    stop = stop or TerminationRule()
    if w0 is None:
        n = getattr(objective, "n_weights", None)
        if n is None:
            raise ConfigError("w0 is required when the objective has no n_weights")
        w0 = SimplexPoint.uniform(n)
    if rule is None:
        rule = default_rule(objective, method)
    if stop.target is not None and not hasattr(objective, "predict"):
        raise ConfigError("target stopping needs an objective with predict()")

    w = w0
    rec = _Recorder(method, record_iterates)
    steps = 0
    warm_eta = 1.0  # warm start for curved-path backtracking (egd / cs-exp)
    t0 = time.perf_counter()
    reason = None

    while True:
        f, g = objective.value_grad(w.weights)
        if not (math.isfinite(f) and np.isfinite(g).all()):
            trace = rec.build("nonfinite-objective", w)
            raise NumericalError("objective or gradient is not finite", trace)
        wg, max_full, max_sup, var, maxsq = step_stats(w.weights, g, w.zero_tolerance)
        kkt = kkt_residual(w, g)
        row = dict(
            objective=f,
            max_step=(1.0 / max_full) if max_full > 0.0 else math.inf,
            support_max_step=(1.0 / max_sup) if max_sup > 0.0 else math.inf,
            variance=var,
            max_centered_sq=maxsq,
            kkt_stationarity=kkt.stationarity_residual,
            elapsed=time.perf_counter() - t0,
        )
        dist = None
        if stop.target is not None:
            point, radius = stop.target
            dist = float(np.linalg.norm(objective.predict(w.weights) - point))
            row["target_distance"] = dist
        rec.add(**row)
        if rec.iterates is not None:
            rec.iterates.append(w.weights)
        if dist is not None and dist <= stop.target[1]:
            reason = "target-radius"
            break
        if method in ("cs", "cs-exp", "egd"):
            stationary = var <= stop.gradient_variance_tolerance or max_sup <= 0.0
        else:
            gap = wg - float(g.min())
            stationary = gap <= 0.0 or gap * gap <= stop.gradient_variance_tolerance
        if stationary:
            reason = "variance-tolerance"
            break
        if steps >= stop.max_iterations:
            reason = "max-iterations"
            break

        eta, w_next, warm_eta = _advance(objective, method, rule, w, g, wg,
                                         max_sup, var, f, warm_eta)
        if eta <= 0.0:
            reason = "variance-tolerance"  # no measurable descent left
            break
        rec.set_step(eta)
        w = w_next
        steps += 1

    return rec.build(reason, w)


def _advance(objective, method, rule, w, g, wg, max_sup, var, f0, warm_eta):
    """Pick a step size under ``rule`` and apply one ``method`` step."""
    ww = w.weights
    centered = g - wg
    support_mask = w.support_mask
    cap = math.inf if max_sup <= 0.0 else 1.0 / max_sup

    # direction (for straight-path methods) and the Armijo slope g.d
    if method in ("cs", "cs-exp", "egd"):
        direction = ww * np.where(support_mask, centered, 0.0)
        slope = var
    elif method == "pgd":
        direction = g - g.mean()
        slope = float(np.dot(g, direction))
        cap = math.inf
    elif method == "fw":
        s = int(np.argmin(g))
        direction = ww.copy()
        direction[s] -= 1.0
        slope = float(np.dot(g, direction))
        cap = 1.0
    else:  # pfw
        s = int(np.argmin(g))
        support = np.nonzero(support_mask)[0]
        v = int(support[np.argmax(g[support])])
        direction = np.zeros_like(ww)
        direction[v] = 1.0
        direction[s] -= 1.0
        slope = float(g[v] - g[s])
        cap = float(ww[v])

    if slope <= 1e-15 * max(1.0, abs(f0)) and rule.kind == "backtracking":
        return 0.0, w, warm_eta
    if slope <= 0.0:
        return 0.0, w, warm_eta

    if rule.kind == "fixed":
        if rule.eta0 > cap * (1.0 + _REL_SLACK):
            raise StepSizeError(
                f"fixed eta {rule.eta0:.6g} exceeds feasible cap {cap:.6g}"
            )
        eta = rule.eta0
    elif rule.kind == "clipped-fixed":
        eta = min(rule.eta0, cap)
    elif rule.kind == "exact-quadratic":
        if not hasattr(objective, "line_minimizer"):
            raise ConfigError("exact-quadratic rule needs a quadratic objective")
        if method in ("egd", "cs-exp"):
            raise ConfigError(
                "exact line search is unavailable for multiplicative schemes"
            )
        eta = float(objective.line_minimizer(ww, direction))
        eta = min(max(eta, 0.0), cap)
    else:  # backtracking
        eta0 = rule.eta0
        if eta0 is None:
            if method in ("egd", "cs-exp") and not math.isfinite(cap):
                eta0 = warm_eta
            elif method == "pgd":
                if hasattr(objective, "line_minimizer"):
                    eta0 = max(float(objective.line_minimizer(ww, direction)), 1e-12)
                else:
                    eta0 = warm_eta
            else:
                eta0 = cap
        eta0 = min(eta0, cap)
        if method == "egd":
            curve = lambda e: egd_apply(ww, g, e, w.zero_tolerance)
        elif method == "cs-exp":
            curve = lambda e: cs_exp_apply(ww, g, wg, e, w.zero_tolerance)
        elif method == "pgd":
            curve = lambda e: pgd_step(w, g, e).weights
        else:
            curve = lambda e: ww - e * direction
        eta = _armijo(curve, objective.value, f0, slope, eta0,
                      rule.shrink, rule.armijo_c)
        if method in ("egd", "cs-exp", "pgd"):
            warm_eta = min(2.0 * eta, 1e6)

    if eta <= 0.0:
        return 0.0, w, warm_eta

    if method == "cs":
        w_next = SimplexPoint._wrap(
            cs_linear_apply(ww, g, wg, eta, w.zero_tolerance), w.zero_tolerance
        )
    elif method == "cs-exp":
        w_next = SimplexPoint._wrap(
            cs_exp_apply(ww, g, wg, eta, w.zero_tolerance), w.zero_tolerance
        )
    elif method == "egd":
        w_next = SimplexPoint._wrap(
            egd_apply(ww, g, eta, w.zero_tolerance), w.zero_tolerance
        )
    elif method == "pgd":
        w_next = pgd_step(w, g, eta)
    elif method == "fw":
        w_next = fw_step(w, g, eta)
    else:
        w_next = pfw_step(w, g, eta)
    return eta, w_next, warm_eta


# ---------------------------------------------------------------------------
# step-schedule condition for the 1/T rate
# ---------------------------------------------------------------------------

def cgamma(gamma: float) -> float:
    """The schedule constant gamma^-2 log(e^-gamma / (1 - gamma)).

    Increasing on [0, 1); continuously extended to 1/2 at 0 and +inf at 1.
    """
    if gamma < 0.0:
        raise DomainError("gamma must be >= 0")
    if gamma >= 1.0:
        return math.inf
    if gamma < 1e-8:
        return 0.5
    return (-gamma - math.log1p(-gamma)) / (gamma * gamma)


@dataclass(frozen=True)
class RateCheck:
    """Horizons of a trace where the decreasing-step schedule condition held,
    with the matching log(n)/(T eta_T) bounds on the optimality gap."""

    per_step_ok: np.ndarray
    horizons: np.ndarray
    bounds: np.ndarray
    gaps: np.ndarray | None = None
    violations: np.ndarray | None = None


def check_rate_bound(trace: SolverTrace, lipschitz: float,
                     f_star: float | None = None,
                     slack: float = 1e-9) -> RateCheck:
    """Post-hoc check of the step-schedule condition over a trace.

    A step t qualifies when eta_t <= min(1/L, full max rate), the schedule
    is non-increasing so far, and C_gamma(eta_t / max rate) is at most
    (t+1) Var_t / (2 max_i centered_i^2).  A horizon T qualifies when every
    step before it qualifies and eta_T exists and keeps the schedule
    non-increasing; there the gap f(w^T) - f* must obey log(n)/(T eta_T).
    """
    n = trace.final_point.n
    eta = trace.step_size
    nsteps = trace.steps
    ok = np.zeros(nsteps, dtype=bool)
    for t in range(nsteps):
        if not math.isfinite(eta[t]):
            break
        gamma = 0.0 if math.isinf(trace.max_step[t]) else eta[t] / trace.max_step[t]
        if gamma >= 1.0:
            continue
        feasible = eta[t] <= min(1.0 / lipschitz, trace.max_step[t]) * (1 + _REL_SLACK)
        decreasing = t == 0 or eta[t] <= eta[t - 1] * (1 + _REL_SLACK)
        if trace.max_centered_sq[t] <= 0.0:
            continue
        rhs = (t + 1) * trace.variance[t] / (2.0 * trace.max_centered_sq[t])
        ok[t] = feasible and decreasing and cgamma(gamma) <= rhs * (1 + _REL_SLACK)

    horizons, bounds = [], []
    prefix = True
    for T in range(1, nsteps):
        prefix = prefix and ok[T - 1]
        if not prefix:
            break
        if math.isfinite(eta[T]) and eta[T] <= eta[:T].min() * (1 + _REL_SLACK):
            horizons.append(T)
            bounds.append(math.log(n) / (T * eta[T]))
    horizons = np.asarray(horizons, dtype=int)
    bounds = np.asarray(bounds, dtype=np.float64)

    gaps = violations = None
    if f_star is not None and horizons.size:
        gaps = trace.objective[horizons] - f_star
        violations = gaps > bounds + slack
    return RateCheck(per_step_ok=ok, horizons=horizons, bounds=bounds,
                     gaps=gaps, violations=violations)
