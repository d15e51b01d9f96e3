"""Optimization and online learning on the probability simplex.

The core iteration is the multiplicative recentred-gradient step
w' = w (1 - eta (g - w.g)) (the Cauchy-Simplex scheme), which keeps both
simplex constraints at every iterate; classic baselines (exponentiated
gradient, projected gradient, Frank-Wolfe and its pairwise variant) ride
the same driver.  A benchmark CLI reproduces hull-projection, exam
reweighting, expert-advice and universal-portfolio experiments.
"""

from ._accel import USING_COMPILED
from .core import (
    DEFAULT_ZERO_TOL,
    KktReport,
    SimplexPoint,
    as_gradient,
    centered_gradient,
    kkt_residual,
    project_to_simplex,
    relative_entropy,
    weighted_variance,
)
from .exceptions import (
    ConfigError,
    DataValidationError,
    DimensionError,
    DomainError,
    InfiniteDivergenceError,
    LineSearchError,
    NumericalError,
    SimplexOptError,
    StepSizeError,
)
from .objectives import (
    ExamWeightingProblem,
    GradientCheckReport,
    HullProjectionProblem,
    TruncatedNormal,
    exam_value_grad,
    finite_difference_check,
    hull_value_grad,
    kde_density,
)
from .online import (
    PortfolioMetrics,
    PriceRelativeSeries,
    RegretReport,
    annualized_percentage_yield,
    best_crp_oracle,
    buy_and_hold,
    expert_learning_rate,
    expert_regret_bound,
    hedge_cs_update,
    helmbold_egd_update,
    helmbold_learning_rate,
    portfolio_cs_update,
    portfolio_learning_rate,
    portfolio_regret_bound,
    run_expert_game,
    run_portfolio_backtest,
    sharpe_ratio,
)
from .solvers import (
    METHODS,
    RateCheck,
    SolverTrace,
    StepSizeRule,
    TerminationRule,
    backtracking_line_search,
    cgamma,
    check_rate_bound,
    cs_max_step,
    cs_step_exponential,
    cs_step_linear,
    egd_step,
    exact_quadratic_line_search,
    fw_step,
    pfw_step,
    pgd_step,
    run_solver,
)

__version__ = "0.1.0"
