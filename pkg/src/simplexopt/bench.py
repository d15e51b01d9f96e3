"""Experiment harness: data synthesis, dataset loading, seeded runs, reports.

All randomness flows through PCG64 generators keyed by explicit integer
seed tuples, so a config with a fixed seed reproduces its result tables
byte for byte (timing columns excepted).
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .core import (
    SimplexPoint,
    centered_gradient,
    project_to_simplex,
    relative_entropy,
    weighted_variance,
)
from .exceptions import ConfigError, DataValidationError, DimensionError, DomainError
from .objectives import (
    ExamWeightingProblem,
    HullProjectionProblem,
    TruncatedNormal,
    finite_difference_check,
)
from .online import (
    PriceRelativeSeries,
    expert_learning_rate,
    hedge_cs_update,
    portfolio_learning_rate,
    run_expert_game,
    run_portfolio_backtest,
)
from .solvers import (
    METHODS,
    TerminationRule,
    cgamma,
    cs_max_step,
    cs_step_exponential,
    cs_step_linear,
    egd_step,
    fw_step,
    pfw_step,
    pgd_step,
    run_solver,
)


def make_rng(*key: int) -> np.random.Generator:
    """A portable 64-bit generator keyed by an integer tuple."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(key))))


# ---------------------------------------------------------------------------
# data synthesis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HullInstance:
    """A hull-projection test case with a known nearest point.

    ``query`` sits exactly unit distance outside the hypercube face that
    ``y_true`` (a convex combination of the sampled face points) lies on,
    so the nearest hull point to ``query`` is ``y_true``.
    """

    points: np.ndarray
    query: np.ndarray
    y_true: np.ndarray
    surface: int


def sample_hypercube_hull(dim: int, per_surface: int, seed: int) -> np.ndarray:
    """Sample ``per_surface`` uniform points on each of the 2*dim faces.

    Surface 2*axis + side occupies the contiguous row block of that index;
    each point has coordinate ``axis`` pinned to ``side``.
    """
    if dim < 2:
        raise DomainError("dim must be >= 2")
    if per_surface < 1:
        raise DomainError("per_surface must be >= 1")
    rng = make_rng(seed)
    blocks = []
    for surface in range(2 * dim):
        axis, side = divmod(surface, 2)
        pts = rng.random((per_surface, dim))
        pts[:, axis] = float(side)
        blocks.append(pts)
    return np.vstack(blocks)


def make_query_point(points: np.ndarray, surface: int, seed: int) -> HullInstance:
    """Build a query at unit distance from the hull, off the given face.

    The true nearest point is a random convex combination (exponential
    spacings, i.e. flat Dirichlet) of the face's sampled points; the query
    adds the outward unit normal.
    """
    n, dim = points.shape
    if n % (2 * dim) != 0:
        raise DimensionError(
            f"{n} rows are not a whole number of blocks for {2 * dim} surfaces"
        )
    per_surface = n // (2 * dim)
    if not 0 <= surface < 2 * dim:
        raise DomainError(f"surface must be in [0, {2 * dim})")
    axis, side = divmod(surface, 2)
    block = points[surface * per_surface:(surface + 1) * per_surface]
    rng = make_rng(seed)
    lam = rng.exponential(size=per_surface)
    lam /= lam.sum()
    y_true = lam @ block
    normal = np.zeros(dim)
    normal[axis] = 1.0 if side == 1 else -1.0
    return HullInstance(points=points, query=y_true + normal,
                        y_true=y_true, surface=surface)


def synthesize_exam_scores(n_questions: int, n_students: int, difficulty,
                           smartness, seed: int) -> np.ndarray:
    """Bernoulli 0/1 score matrix with P(correct) = difficulty_i * smartness_j."""
    q = np.asarray(difficulty, dtype=np.float64)
    s = np.asarray(smartness, dtype=np.float64)
    if q.shape != (n_questions,) or s.shape != (n_students,):
        raise DimensionError(
            f"difficulty shape {q.shape} / smartness shape {s.shape} "
            f"do not match ({n_questions},)/({n_students},)"
        )
    if (q <= 0.0).any() or (q > 1.0).any() or (s <= 0.0).any() or (s > 1.0).any():
        raise DomainError("difficulty and smartness must lie in (0, 1]")
    p = q[:, None] * s[None, :]
    if (p >= 1.0).any():
        warnings.warn("degenerate synthesis: some success probabilities equal 1")
    rng = make_rng(seed)
    return (rng.random((n_questions, n_students)) < p).astype(np.float64)


def default_exam_parameters(n_questions: int = 75, n_students: int = 200):
    """The two-level difficulty/smartness mix behind the bimodal score setup.

    80% easy questions (7/8) vs hard (1/5); 60% strong students (4/5) vs
    weak (1/2).  Under uniform weights these give expected score mean
    ~0.503 and std ~0.121.
    """
    easy = round(0.8 * n_questions)
    strong = round(0.6 * n_students)
    q = np.full(n_questions, 1.0 / 5.0)
    q[:easy] = 7.0 / 8.0
    s = np.full(n_students, 1.0 / 2.0)
    s[:strong] = 4.0 / 5.0
    return q, s


def synthetic_market(n_assets: int, days: int, variability: float,
                     seed: int) -> PriceRelativeSeries:
    """Bounded relatives in [a, 1] with each day's maximum rescaled to 1."""
    if not 0.0 < variability < 1.0:
        raise DomainError("variability must lie in (0, 1)")
    rng = make_rng(seed)
    x = rng.uniform(variability, 1.0, size=(days, n_assets))
    x /= x.max(axis=1, keepdims=True)
    return PriceRelativeSeries(x)


def adversarial_losses(n_experts: int, horizon: int, eta: float) -> np.ndarray:
    """Worst-case-flavored losses: charge 1 to the currently heaviest expert.

    The update is deterministic, so simulating it here reproduces exactly
    the losses an adaptive adversary would pick against the real run.
    """
    w = SimplexPoint.uniform(n_experts)
    losses = np.zeros((horizon, n_experts))
    for t in range(horizon):
        losses[t, int(np.argmax(w.weights))] = 1.0
        w = hedge_cs_update(w, losses[t], eta)
    return losses


# ---------------------------------------------------------------------------
# dataset loading
# ---------------------------------------------------------------------------

def load_price_relatives(path) -> PriceRelativeSeries:
    """Read a price-relative CSV.

    Preferred layout: header ``date,<asset names...>`` then one row per
    trading day (ISO date first).  A plain numeric CSV without header or
    date column is also accepted (mirrors of the classic datasets ship
    that way); assets are then named by column index.
    """
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(f.strip() for f in row)]
    if not rows:
        raise DataValidationError(f"{path} is empty")

    def parse_row(row, ncols, start, rownum):
        if len(row) != ncols:
            raise DataValidationError(
                f"{path}: row {rownum} has {len(row)} fields, expected {ncols}"
            )
        vals = []
        for j, cell in enumerate(row[start:], start=start):
            try:
                v = float(cell)
            except ValueError:
                raise DataValidationError(
                    f"{path}: row {rownum}, column {j}: {cell!r} is not a number"
                ) from None
            vals.append(v)
        return vals

    first = rows[0]
    dated = first[0].strip().lower() == "date"
    if dated:
        names = [c.strip() for c in first[1:]]
        if not names:
            raise DataValidationError(f"{path}: header names no assets")
        data = [parse_row(r, len(first), 1, i + 2) for i, r in enumerate(rows[1:])]
    else:
        try:
            [float(c) for c in first]
        except ValueError:
            raise DataValidationError(
                f"{path}: header must start with 'date' or be numeric"
            ) from None
        names = [f"asset{i}" for i in range(len(first))]
        data = [parse_row(r, len(first), 0, i + 1) for i, r in enumerate(rows)]
    if not data:
        raise DataValidationError(f"{path} has a header but no data rows")
    x = np.asarray(data, dtype=np.float64)
    bad = np.argwhere(x <= 0.0)
    if bad.size:
        t, i = bad[0]
        raise DataValidationError(
            f"{path}: nonpositive relative at data row {t + 1}, asset "
            f"{names[i]!r} (no-junk-bond violation)"
        )
    return PriceRelativeSeries(x, names)


# ---------------------------------------------------------------------------
# experiment configuration
# ---------------------------------------------------------------------------

KINDS = ("hull", "exam", "experts", "portfolio", "check")


@dataclass
class ExperimentConfig:
    """A seeded, JSON-serializable description of one benchmark run."""

    kind: str
    seed: int = 0
    solvers: tuple = ("cs", "egd", "pfw")
    max_iter: int = 10_000
    tol: float = 1e-5
    out_dir: str = "results"
    # hull
    dim: int = 10
    queries: int = 50
    per_surface: int = 50
    # exam
    students: int = 200
    questions: int = 75
    iters: int = 150
    bandwidth: float = 0.05
    partition: int = 400
    trials: int = 25
    # experts
    experts: int = 10
    rounds: int = 1000
    loss_kind: str = "iid"
    # portfolio
    data_path: str | None = None
    strategy: str = "cs"
    market_variability: float | None = None
    risk_free: float = 0.04
    grid_resolution: int = 2000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; valid: {', '.join(KINDS)}")
        self.solvers = tuple(self.solvers)
        bad = [s for s in self.solvers if s not in METHODS]
        if bad:
            raise ConfigError(
                f"unknown solver(s) {', '.join(bad)}; valid: {', '.join(METHODS)}"
            )
        if self.loss_kind not in ("iid", "adversarial"):
            raise ConfigError("loss_kind must be 'iid' or 'adversarial'")
        if self.strategy not in ("cs", "egd", "bh"):
            raise ConfigError("strategy must be one of cs, egd, bh")
        for name in ("max_iter", "queries", "per_surface", "students", "questions",
                     "iters", "trials", "experts", "rounds", "grid_resolution"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.tol <= 0.0:
            raise ConfigError("tol must be positive")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "kind" not in raw:
            raise ConfigError("config needs a 'kind'")
        return cls(**raw)


# ---------------------------------------------------------------------------
# report writing
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.12g}"
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------

def run_experiment(config: ExperimentConfig) -> dict:
    """Execute one configured experiment; returns {table name: file path}."""
    out = Path(config.out_dir)
    runner = {
        "hull": _run_hull,
        "exam": _run_exam,
        "experts": _run_experts,
        "portfolio": _run_portfolio,
        "check": _run_check,
    }[config.kind]
    return runner(config, out)


def _run_hull(cfg: ExperimentConfig, out: Path) -> dict:
    X = sample_hypercube_hull(cfg.dim, cfg.per_surface, cfg.seed)
    rows = []
    per_solver = {s: {"steps": [], "time": [], "converged": 0, "dist": []}
                  for s in cfg.solvers}
    for trial in range(cfg.queries):
        surface = int(make_rng(cfg.seed, 1, trial).integers(0, 2 * cfg.dim))
        inst = make_query_point(X, surface, seed_tuple(cfg.seed, 2, trial))
        problem = HullProjectionProblem(X, inst.query)
        stop = TerminationRule(max_iterations=cfg.max_iter,
                               target=(inst.y_true, cfg.tol))
        for solver in cfg.solvers:
            trace = run_solver(problem, solver, stop=stop)
            converged = trace.termination_reason == "target-radius"
            dist = float(trace.target_distance[-1])
            rows.append((trial, surface, solver, trace.steps, converged, dist,
                         trace.final_objective, float(trace.kkt_stationarity[-1]),
                         trace.wall_time))
            agg = per_solver[solver]
            agg["steps"].append(trace.steps)
            agg["time"].append(trace.wall_time)
            agg["dist"].append(dist)
            agg["converged"] += converged
    results = _write_csv(
        out / "hull_results.csv",
        ("trial", "surface", "solver", "iterations", "converged",
         "final_distance", "final_objective", "kkt_residual", "wall_time_s"),
        rows,
    )
    summary = _write_csv(
        out / "hull_summary.csv",
        ("solver", "dim", "queries", "converged", "iters_mean", "iters_min",
         "iters_max", "time_mean_s", "time_min_s", "time_max_s", "dist_mean"),
        [
            (s, cfg.dim, cfg.queries, agg["converged"],
             float(np.mean(agg["steps"])), int(np.min(agg["steps"])),
             int(np.max(agg["steps"])), float(np.mean(agg["time"])),
             float(np.min(agg["time"])), float(np.max(agg["time"])),
             float(np.mean(agg["dist"])))
            for s, agg in per_solver.items()
        ],
    )
    return {"results": results, "summary": summary}


def _run_exam(cfg: ExperimentConfig, out: Path) -> dict:
    q, s = default_exam_parameters(cfg.questions, cfg.students)
    grid = np.linspace(0.0, 1.0, cfg.partition + 1)
    rows = []
    per_solver = {name: {"dist": [], "time": []} for name in cfg.solvers}
    for trial in range(cfg.trials):
        scores = synthesize_exam_scores(cfg.questions, cfg.students, q, s,
                                        seed_tuple(cfg.seed, 3, trial))
        problem = ExamWeightingProblem(scores, bandwidth=cfg.bandwidth,
                                       target=TruncatedNormal(0.5, 0.1),
                                       partition=grid)
        stop = TerminationRule(max_iterations=cfg.iters,
                               gradient_variance_tolerance=0.0)
        for solver in cfg.solvers:
            trace = run_solver(problem, solver, stop=stop)
            final = trace.final_point.weights
            marks = problem.weighted_scores(final)
            rows.append((trial, solver, trace.final_objective, trace.steps,
                         float(marks.mean()), float(marks.std()),
                         trace.wall_time))
            per_solver[solver]["dist"].append(trace.final_objective)
            per_solver[solver]["time"].append(trace.wall_time)
    results = _write_csv(
        out / "exam_results.csv",
        ("trial", "solver", "distance", "iterations", "weighted_mean",
         "weighted_std", "wall_time_s"),
        rows,
    )
    summary = _write_csv(
        out / "exam_summary.csv",
        ("solver", "trials", "distance_mean", "distance_min", "distance_max",
         "time_mean_s"),
        [
            (name, cfg.trials, float(np.mean(agg["dist"])),
             float(np.min(agg["dist"])), float(np.max(agg["dist"])),
             float(np.mean(agg["time"])))
            for name, agg in per_solver.items()
        ],
    )
    return {"results": results, "summary": summary}


def _run_experts(cfg: ExperimentConfig, out: Path) -> dict:
    rows = []
    eta = expert_learning_rate(cfg.experts, cfg.rounds)
    for trial in range(cfg.trials):
        if cfg.loss_kind == "iid":
            losses = make_rng(cfg.seed, 4, trial).random((cfg.rounds, cfg.experts))
        else:
            losses = adversarial_losses(cfg.experts, cfg.rounds, eta)
        _, report = run_expert_game(losses, eta)
        rows.append((trial, cfg.loss_kind, cfg.experts, cfg.rounds, eta,
                     report.regret, report.theoretical_bound,
                     report.regret <= report.theoretical_bound,
                     report.comparator))
    results = _write_csv(
        out / "experts_results.csv",
        ("trial", "loss_kind", "experts", "rounds", "eta", "regret", "bound",
         "within_bound", "comparator"),
        rows,
    )
    return {"results": results}


def _run_portfolio(cfg: ExperimentConfig, out: Path) -> dict:
    if not cfg.data_path:
        raise ConfigError("portfolio experiments need data_path")
    series = load_price_relatives(cfg.data_path)
    weights, metrics, regret = run_portfolio_backtest(
        series, cfg.strategy, risk_free=cfg.risk_free,
        variability=cfg.market_variability,
        grid_resolution=cfg.grid_resolution if series.n_assets <= 3 else None,
    )
    rows = [(cfg.strategy, series.days, series.n_assets,
             series.market_variability if cfg.market_variability is None
             else cfg.market_variability,
             metrics.total_return, metrics.apy, metrics.sharpe,
             metrics.daily_return_std, regret.regret,
             regret.theoretical_bound, regret.comparator)]
    results = _write_csv(
        out / "portfolio_results.csv",
        ("strategy", "days", "assets", "variability", "total_return", "apy",
         "sharpe", "daily_std", "log_regret", "regret_bound", "comparator"),
        rows,
    )
    final = _write_csv(
        out / "portfolio_weights.csv",
        ("asset", "final_weight"),
        list(zip(series.asset_names, weights[-1])),
    )
    return {"results": results, "weights": final}


def seed_tuple(*key: int) -> int:
    """Fold an integer tuple into a single stable 63-bit seed."""
    h = 0
    for part in key:
        h = (h * 1_000_003 + int(part) + 1) % (1 << 63)
    return h


# ---------------------------------------------------------------------------
# diagnostic battery (the `check` experiment)
# ---------------------------------------------------------------------------

def run_checks(seed: int = 0) -> list[dict]:
    """Quick invariant/diagnostic suite; one pass/fail record per check."""
    checks = []

    def record(name, passed, detail=""):
        checks.append({"check": name, "passed": bool(passed), "detail": detail})

    rng = make_rng(seed, 90)

    # every scheme's step stays on the simplex
    worst = 0.0
    for _ in range(60):
        n = int(rng.integers(2, 9))
        w = SimplexPoint(rng.dirichlet(np.ones(n)))
        g = rng.normal(size=n)
        cap = cs_max_step(w, g, restrict_to_support=True)
        eta = 0.9 * min(cap, 2.0) if math.isfinite(cap) else 1.0
        support = w.support
        away = int(support[np.argmax(g[support])])
        outs = [cs_step_linear(w, g, eta) if math.isfinite(cap) else w,
                cs_step_exponential(w, g, 0.7),
                egd_step(w, g, 0.7), pgd_step(w, g, 0.7),
                fw_step(w, g, float(rng.random())),
                pfw_step(w, g, 0.5 * float(w.weights[away]))]
        for p in outs:
            worst = max(worst, abs(p.weights.sum() - 1.0), -p.weights.min(initial=0.0))
    record("step-feasibility", worst <= 1e-12, f"worst deviation {worst:.2e}")

    # projection beats random candidates
    ok = True
    for _ in range(20):
        v = rng.normal(size=6) * 2.0
        p = project_to_simplex(v)
        base = np.linalg.norm(p.weights - v)
        cands = rng.dirichlet(np.ones(6), size=200)
        ok &= bool(base <= np.linalg.norm(cands - v, axis=1).min() + 1e-12)
    record("projection-optimality", ok)

    # exponential and linear steps agree to second order
    slopes = []
    for _ in range(20):
        w = SimplexPoint(rng.dirichlet(np.ones(5)))
        g = rng.normal(size=5)
        g = g / max(1e-12, (g - w.weights @ g).max()) * 2.0
        etas = np.array([1e-1, 1e-2, 1e-3])
        diffs = [np.linalg.norm(cs_step_linear(w, g, e).weights
                                - cs_step_exponential(w, g, e).weights)
                 for e in etas]
        slopes.append(np.polyfit(np.log(etas), np.log(diffs), 1)[0])
    slopes = np.asarray(slopes)
    record("scheme-agreement", bool(((slopes > 1.9) & (slopes < 2.1)).all()),
           f"slopes in [{slopes.min():.3f}, {slopes.max():.3f}]")

    # single-step descent on quadratics under the safe rate
    bad = 0
    for _ in range(100):
        n, d = int(rng.integers(2, 8)), int(rng.integers(2, 5))
        prob = HullProjectionProblem(rng.normal(size=(n, d)), rng.normal(size=d))
        w = SimplexPoint(rng.dirichlet(np.ones(n)))
        f0, g = prob.value_grad(w.weights)
        cap = cs_max_step(w, g)
        eta = float(rng.random()) * min(1.0 / prob.lipschitz(), cap)
        if eta <= 0.0 or not math.isfinite(eta):
            continue
        w1 = cs_step_linear(w, g, eta)
        drop = f0 - prob.value(w1.weights)
        if drop + 1e-9 < 0.5 * eta * weighted_variance(w, g):
            bad += 1
    record("monotone-descent", bad == 0, f"{bad} violations")

    # per-step divergence inequality
    bad = 0
    for _ in range(100):
        n = int(rng.integers(2, 8))
        w = SimplexPoint(rng.dirichlet(np.ones(n)))
        u = SimplexPoint(rng.dirichlet(np.ones(n)))
        g = rng.normal(size=n)
        cap = cs_max_step(w, g)
        if not math.isfinite(cap):
            continue
        gamma = float(rng.uniform(0.05, 0.95))
        eta = gamma * cap
        w1 = cs_step_linear(w, g, eta)
        lhs = relative_entropy(u, w1) - relative_entropy(u, w)
        pig = centered_gradient(w, g)
        rhs = eta * float(u.weights @ pig) \
            + cgamma(gamma) * eta * eta * float(u.weights @ (pig * pig))
        if lhs > rhs + 1e-9:
            bad += 1
    record("divergence-step-inequality", bad == 0, f"{bad} violations")

    # expert regret within its bound
    losses = make_rng(seed, 91).random((300, 5))
    _, rep = run_expert_game(losses)
    record("expert-regret", rep.regret <= rep.theoretical_bound,
           f"regret {rep.regret:.3f} vs bound {rep.theoretical_bound:.3f}")

    # portfolio trajectory invariant under per-day rescaling
    market = synthetic_market(3, 60, 0.5, seed_tuple(seed, 92))
    w1, _, r1 = run_portfolio_backtest(market, "cs", grid_resolution=200)
    scaled = PriceRelativeSeries(market.relatives * make_rng(seed, 93)
                                 .uniform(0.5, 2.0, size=(60, 1)))
    w2, _, r2 = run_portfolio_backtest(scaled, "cs",
                                       eta=portfolio_learning_rate_like(market),
                                       grid_resolution=200)
    record("portfolio-scale-invariance",
           np.abs(w1 - w2).max() <= 1e-10 and abs(r1.regret - r2.regret) <= 1e-10,
           f"max weight diff {np.abs(w1 - w2).max():.2e}")

    # analytic gradients agree with central differences
    worst = 0.0
    for _ in range(5):
        n, d = 6, 4
        prob = HullProjectionProblem(rng.normal(size=(n, d)), rng.normal(size=d))
        w = SimplexPoint(rng.dirichlet(np.ones(n) * 5.0))
        worst = max(worst, finite_difference_check(prob, w, 1e-6).max_relative_error)
    record("hull-gradient", worst <= 1e-8, f"max rel err {worst:.2e}")

    worst = 0.0
    for trial in range(2):
        scores = synthesize_exam_scores(
            6, 12, np.full(6, 0.6), np.full(12, 0.7), seed_tuple(seed, 94, trial))
        prob = ExamWeightingProblem(scores, bandwidth=0.08,
                                    partition=np.linspace(0, 1, 41))
        w = SimplexPoint(make_rng(seed, 95, trial).dirichlet(np.ones(6) * 5.0))
        worst = max(worst, finite_difference_check(prob, w, 1e-6).max_relative_error)
    record("exam-gradient", worst <= 1e-5, f"max rel err {worst:.2e}")

    return checks


def portfolio_learning_rate_like(series: PriceRelativeSeries) -> float:
    """The default learned rate a backtest on this series would use."""
    return portfolio_learning_rate(series.n_assets, series.days,
                                   min(series.market_variability, 1.0))


def _run_check(cfg: ExperimentConfig, out: Path) -> dict:
    checks = run_checks(cfg.seed)
    results = _write_csv(
        out / "check_results.csv",
        ("check", "passed", "detail"),
        [(c["check"], c["passed"], c["detail"]) for c in checks],
    )
    return {"results": results, "checks": checks}
