"""Online learning on the simplex: expert advice and universal portfolios.

Both drivers replay the multiplicative recentred update with the
round-specific gradient (the loss vector for the expert game, the
negative normalized price relative for portfolios) and account regret
against the guaranteed worst-case ceilings for the matching learning
rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SimplexPoint
from .exceptions import (
    ConfigError,
    DataValidationError,
    DimensionError,
    DomainError,
)


@dataclass(frozen=True)
class RegretReport:
    """Realized regret, the a-priori bound it must respect, and the comparator.

    ``kind`` is "expert" (cumulative regret, R_T) or "portfolio"
    (log-regret, LR_T).
    """

    kind: str
    regret: float
    theoretical_bound: float
    comparator: str

    @property
    def cumulative_regret(self) -> float:
        return self.regret

    @property
    def log_regret(self) -> float:
        return self.regret


@dataclass(frozen=True)
class PortfolioMetrics:
    """Headline numbers of a backtest."""

    total_return: float
    apy: float
    sharpe: float
    daily_return_std: float
    risk_free_rate: float


class PriceRelativeSeries:
    """T x N matrix of daily price relatives (today's close / yesterday's).

    Every entry must be strictly positive (the no-junk-bond assumption);
    the market variability parameter is the smallest entry.
    """

    def __init__(self, relatives, asset_names=None):
        x = np.ascontiguousarray(relatives, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise DimensionError("relatives must be a non-empty T x N matrix")
        if not np.isfinite(x).all():
            raise DataValidationError("price relatives must be finite")
        if (x <= 0.0).any():
            t, i = np.argwhere(x <= 0.0)[0]
            raise DataValidationError(
                f"nonpositive price relative at day {t}, asset {i} (no-junk-bond)"
            )
        if asset_names is None:
            asset_names = [f"asset{i}" for i in range(x.shape[1])]
        if len(asset_names) != x.shape[1]:
            raise DimensionError("asset_names length must match the asset count")
        x.setflags(write=False)
        self.relatives = x
        self.asset_names = list(asset_names)

    @property
    def days(self) -> int:
        return self.relatives.shape[0]

    @property
    def n_assets(self) -> int:
        return self.relatives.shape[1]

    @property
    def market_variability(self) -> float:
        return float(self.relatives.min())


def _validate_losses(losses) -> np.ndarray:
    l = np.asarray(losses, dtype=np.float64)
    if l.ndim != 2 or l.shape[0] < 1 or l.shape[1] < 1:
        raise DimensionError("losses must be a non-empty T x N matrix")
    if not np.isfinite(l).all() or (l < 0.0).any() or (l > 1.0).any():
        raise DataValidationError("losses must lie in [0, 1]")
    return l


def hedge_cs_update(w: SimplexPoint, loss, eta: float) -> SimplexPoint:
    """One expert-advice round: w_i (1 - eta (l_i - w.l)), renormalized.

    Feasible for any eta < 1 since losses lie in [0, 1]; weights stay
    strictly positive (no zero-set pinning in the online setting).
    """
    l = np.asarray(loss, dtype=np.float64)
    if l.shape != (w.n,):
        raise DimensionError("loss length must match the weight count")
    if (l < 0.0).any() or (l > 1.0).any() or not np.isfinite(l).all():
        raise DataValidationError("losses must lie in [0, 1]")
    if not 0.0 < eta < 1.0:
        raise DomainError("eta must lie in (0, 1)")
    out = w.weights * (1.0 - eta * (l - float(w.weights @ l)))
    return SimplexPoint(out, w.zero_tolerance)


def expert_learning_rate(n_experts: int, horizon: int) -> float:
    """Rate sqrt(2 log N) / (sqrt(2 log N) + sqrt(T)); always in (0, 1)."""
    if n_experts < 2:
        raise DomainError("need at least 2 experts")
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    r = math.sqrt(2.0 * math.log(n_experts))
    return r / (r + math.sqrt(horizon))


def expert_regret_bound(n_experts: int, horizon: int) -> float:
    """Guaranteed ceiling sqrt(2 T log N) + log N at the rate above."""
    return math.sqrt(2.0 * horizon * math.log(n_experts)) + math.log(n_experts)


def run_expert_game(losses, eta: float | None = None):
    """Play the recentred multiplicative update through a loss matrix.

    Returns the T x N weight trajectory and a RegretReport against the
    best single expert in hindsight.
    """
    l = _validate_losses(losses)
    horizon, n = l.shape
    if eta is None:
        eta = expert_learning_rate(n, horizon)
    if not 0.0 < eta < 1.0:
        raise DomainError("eta must lie in (0, 1)")
    w = SimplexPoint.uniform(n)
    weights = np.empty_like(l)
    incurred = 0.0
    for t in range(horizon):
        weights[t] = w.weights
        incurred += float(w.weights @ l[t])
        w = hedge_cs_update(w, l[t], eta)
    totals = l.sum(axis=0)
    best = int(np.argmin(totals))
    regret = incurred - float(totals[best])
    report = RegretReport(
        kind="expert",
        regret=regret,
        theoretical_bound=expert_regret_bound(n, horizon),
        comparator=f"best-expert:{best}",
    )
    return weights, report


def portfolio_cs_update(w: SimplexPoint, x, eta: float) -> SimplexPoint:
    """One trading day: recentred update with gradient -x / (w.x).

    The maximum feasible rate always exceeds 1 for positive relatives, so
    any eta in (0, 1] keeps the weights strictly positive.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (w.n,):
        raise DimensionError("price relative length must match the weights")
    if (x <= 0.0).any() or not np.isfinite(x).all():
        raise DataValidationError("price relatives must be positive (no-junk-bond)")
    if not 0.0 < eta <= 1.0:
        raise DomainError("eta must lie in (0, 1]")
    g = -x / float(w.weights @ x)
    out = w.weights * (1.0 - eta * (g - float(w.weights @ g)))
    return SimplexPoint(out, w.zero_tolerance)


def portfolio_learning_rate(n_assets: int, horizon: int, variability: float) -> float:
    """Rate a sqrt(2 log N) / (a sqrt(2 log N) + sqrt(T)) for a in (0, 1]."""
    if n_assets < 2:
        raise DomainError("need at least 2 assets")
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    if not 0.0 < variability <= 1.0:
        raise DomainError("market variability must lie in (0, 1]")
    r = variability * math.sqrt(2.0 * math.log(n_assets))
    return r / (r + math.sqrt(horizon))


def portfolio_regret_bound(n_assets: int, horizon: int, variability: float) -> float:
    """Guaranteed log-regret ceiling sqrt(2 T log N)/a + log N."""
    if variability <= 0.0:
        raise DomainError("market variability must be positive")
    return (math.sqrt(2.0 * horizon * math.log(n_assets)) / variability
            + math.log(n_assets))


def helmbold_egd_update(w: SimplexPoint, x, eta: float) -> SimplexPoint:
    """Multiplicative-weights trading update w_i exp(eta x_i / (w.x))."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (w.n,):
        raise DimensionError("price relative length must match the weights")
    if (x <= 0.0).any() or not np.isfinite(x).all():
        raise DataValidationError("price relatives must be positive (no-junk-bond)")
    if eta <= 0.0:
        raise DomainError("eta must be positive")
    expo = eta * x / float(w.weights @ x)
    out = w.weights * np.exp(expo - expo.max())
    return SimplexPoint(out, w.zero_tolerance)


def helmbold_learning_rate(n_assets: int, horizon: int, variability: float) -> float:
    """The 2 a sqrt(2 log(N) / T) rate for the multiplicative-weights trader."""
    if n_assets < 2:
        raise DomainError("need at least 2 assets")
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    if variability <= 0.0:
        raise DomainError("market variability must be positive")
    return 2.0 * variability * math.sqrt(2.0 * math.log(n_assets) / horizon)


def buy_and_hold(series: PriceRelativeSeries) -> np.ndarray:
    """Wealth path of an initially equal-weighted, never-rebalanced portfolio.

    wealth[t] = mean_i prod_{s<=t} x_i^s, with wealth[0] = 1.
    """
    growth = np.cumprod(series.relatives, axis=0)
    wealth = np.empty(series.days + 1)
    wealth[0] = 1.0
    wealth[1:] = growth.mean(axis=1)
    return wealth


def best_crp_oracle(series: PriceRelativeSeries, grid_resolution: int = 1000):
    """Best constant-rebalanced portfolio by exhaustive grid search.

    Only for N <= 3 (the grid is dense); the log-return surface is concave
    so the grid error is bounded by the spacing times 1/a.  Returns (u,
    total log-return of u).
    """
    n = series.n_assets
    if n > 3:
        raise DomainError("grid oracle only scales to 3 assets")
    if grid_resolution < 100:
        raise DomainError("grid_resolution must be >= 100")
    x = series.relatives
    if n == 1:
        return SimplexPoint(np.ones(1)), float(np.log(x[:, 0]).sum())
    m = grid_resolution
    if n == 2:
        k = np.arange(m + 1)
        grid = np.column_stack([k / m, 1.0 - k / m])
    else:
        i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
        keep = (i + j) <= m
        i, j = i[keep], j[keep]
        grid = np.column_stack([i / m, j / m, (m - i - j) / m])
        if grid.shape[0] > 2e7:
            raise DomainError("grid too large; reduce grid_resolution")
    returns = np.log(grid @ x.T).sum(axis=1)
    best = int(np.argmax(returns))
    return SimplexPoint(grid[best]), float(returns[best])


def annualized_percentage_yield(total_return: float, days: int) -> float:
    """APY = R^(1/y) - 1 with y = days / 252 trading days per year."""
    if total_return <= 0.0:
        raise DomainError("total return must be positive")
    if days < 1:
        raise DomainError("days must be >= 1")
    return total_return ** (252.0 / days) - 1.0


def sharpe_ratio(apy: float, daily_returns, risk_free: float = 0.04) -> float:
    """(APY - R_f) / sigma with sigma the std of the daily returns."""
    r = np.asarray(daily_returns, dtype=np.float64)
    if r.ndim != 1 or r.shape[0] < 2:
        raise DimensionError("need at least 2 daily returns")
    sigma = float(r.std())
    if sigma == 0.0:
        raise DomainError("Sharpe ratio undefined for zero volatility")
    return (apy - risk_free) / sigma


STRATEGIES = ("cs", "egd", "bh")


def run_portfolio_backtest(series: PriceRelativeSeries, strategy: str,
                           eta: float | None = None, risk_free: float = 0.04,
                           variability: float | None = None,
                           comparator: SimplexPoint | None = None,
                           grid_resolution: int | None = None):
    """Replay a strategy through a price-relative series.

    Returns (T x N weight trajectory, PortfolioMetrics, RegretReport).
    The log-regret comparator is the grid-oracle best constant-rebalanced
    portfolio when N <= 3, a caller-supplied portfolio otherwise.
    """
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}; valid: {', '.join(STRATEGIES)}")
    x = series.relatives
    horizon, n = x.shape
    a = series.market_variability if variability is None else float(variability)
    if not 0.0 < a:
        raise DomainError("market variability must be positive")

    weights = np.empty_like(x)
    if strategy == "bh":
        holdings = np.ones(n) / n
        for t in range(horizon):
            weights[t] = holdings / holdings.sum()
            holdings = holdings * x[t]
    else:
        if eta is None:
            if n < 2:
                raise DomainError("need at least 2 assets for a learned strategy")
            eta = (portfolio_learning_rate(n, horizon, min(a, 1.0))
                   if strategy == "cs"
                   else helmbold_learning_rate(n, horizon, a))
        w = SimplexPoint.uniform(n)
        for t in range(horizon):
            weights[t] = w.weights
            w = (portfolio_cs_update(w, x[t], eta) if strategy == "cs"
                 else helmbold_egd_update(w, x[t], eta))

    day_factors = np.einsum("ti,ti->t", weights, x)
    log_wealth = float(np.log(day_factors).sum())
    total_return = float(np.exp(log_wealth))
    daily_returns = day_factors - 1.0
    apy = annualized_percentage_yield(total_return, horizon)
    sigma = float(daily_returns.std())
    sharpe = (apy - risk_free) / sigma if sigma > 0.0 else math.nan
    metrics = PortfolioMetrics(
        total_return=total_return,
        apy=apy,
        sharpe=sharpe,
        daily_return_std=sigma,
        risk_free_rate=risk_free,
    )

    if comparator is not None:
        u_log = float(np.log(weights_dot(comparator.weights, x)).sum())
        who = "user-comparator"
    elif n <= 3:
        res = grid_resolution or (2000 if n <= 2 else 150)
        u, u_log = best_crp_oracle(series, res)
        who = f"grid-crp:{res}"
    else:
        u_log = math.nan
        who = "unavailable (more than 3 assets and no comparator)"
    regret = RegretReport(
        kind="portfolio",
        regret=u_log - log_wealth if math.isfinite(u_log) else math.nan,
        theoretical_bound=portfolio_regret_bound(n, horizon, a) if n >= 2 else 0.0,
        comparator=who,
    )
    return weights, metrics, regret


def weights_dot(u: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Daily wealth factors u . x^t of a constant-rebalanced portfolio."""
    return x @ u
