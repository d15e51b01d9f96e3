import math

import numpy as np
import pytest

from simplexopt import (
    DataValidationError,
    DimensionError,
    DomainError,
    PriceRelativeSeries,
    SimplexPoint,
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
    run_expert_game,
    run_portfolio_backtest,
    sharpe_ratio,
)
from simplexopt.bench import adversarial_losses, synthetic_market
from oracles import crp_log_return

W55 = SimplexPoint([0.5, 0.5])


class TestHedgeUpdate:
    def test_constant_loss_noop(self):
        out = hedge_cs_update(W55, np.array([0.7, 0.7]), 0.3)
        assert np.allclose(out.weights, W55.weights, atol=1e-12)

    def test_hand_value(self):
        out = hedge_cs_update(W55, np.array([1.0, 0.0]), 0.5)
        assert np.allclose(out.weights, [0.375, 0.625])

    def test_repeated_loss_drives_weight_down(self):
        # independent scalar recursion: w1 <- w1 (1 - eta (1 - w1)), sum stays 1
        w = W55
        scalar = 0.5
        for _ in range(10):
            prev = float(w.weights[0])
            w = hedge_cs_update(w, np.array([1.0, 0.0]), 0.5)
            scalar = scalar * (1.0 - 0.5 * (1.0 - scalar))
            assert float(w.weights[0]) == pytest.approx(scalar, abs=1e-12)
            assert float(w.weights[0]) < prev
        assert w.weights.min() > 0.0

    def test_rejects_bad_inputs(self):
        with pytest.raises(DataValidationError):
            hedge_cs_update(W55, np.array([1.5, 0.0]), 0.3)
        with pytest.raises(DomainError):
            hedge_cs_update(W55, np.array([1.0, 0.0]), 1.0)


class TestExpertRates:
    def test_rate_values(self):
        assert expert_learning_rate(2, 100) == pytest.approx(0.1053384, abs=1e-6)
        assert expert_learning_rate(2, 1) == pytest.approx(0.5407388, abs=1e-6)

    def test_rate_decreases_with_horizon(self):
        assert expert_learning_rate(5, 10_000) < expert_learning_rate(5, 100)
        assert 0.0 < expert_learning_rate(100, 10) < 1.0

    def test_bound_value(self):
        assert expert_regret_bound(2, 100) == pytest.approx(12.4672474, abs=1e-6)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            expert_learning_rate(1, 100)


class TestExpertGame:
    def test_zero_losses_zero_regret(self):
        weights, report = run_expert_game(np.zeros((50, 4)))
        assert report.regret == 0.0
        assert weights.shape == (50, 4)
        assert np.allclose(weights[0], 0.25)

    def test_iid_seeded_within_bound(self):
        losses = np.random.default_rng(0).random((1000, 10))
        _, report = run_expert_game(losses)
        assert report.regret <= report.theoretical_bound
        assert report.comparator.startswith("best-expert:")

    def test_adversarial_within_bound(self):
        eta = expert_learning_rate(5, 400)
        losses = adversarial_losses(5, 400, eta)
        _, report = run_expert_game(losses, eta)
        assert report.regret <= report.theoretical_bound

    def test_weights_strictly_positive(self):
        losses = np.random.default_rng(1).random((500, 3))
        weights, _ = run_expert_game(losses)
        assert weights.min() > 0.0
        assert np.abs(weights.sum(axis=1) - 1.0).max() <= 1e-9

    def test_rejects_out_of_range_losses(self):
        with pytest.raises(DataValidationError):
            run_expert_game(np.full((10, 3), 1.2))


class TestPortfolioUpdate:
    def test_constant_relatives_noop(self):
        out = portfolio_cs_update(W55, np.array([1.3, 1.3]), 0.4)
        assert np.allclose(out.weights, W55.weights, atol=1e-12)

    def test_hand_value(self):
        out = portfolio_cs_update(W55, np.array([1.0, 0.5]), 0.3)
        assert np.allclose(out.weights, [0.55, 0.45])

    def test_wealth_recursion_single_step(self):
        x = np.array([1.0, 0.5])
        assert float(W55.weights @ x) == pytest.approx(0.75)

    def test_junk_bond_rejected(self):
        with pytest.raises(DataValidationError):
            portfolio_cs_update(W55, np.array([1.0, 0.0]), 0.3)

    def test_eta_one_allowed_and_positive(self):
        out = portfolio_cs_update(W55, np.array([1.0, 0.5]), 1.0)
        assert out.weights.min() > 0.0


class TestPortfolioRates:
    def test_coincides_with_expert_rate_at_a_one(self):
        assert portfolio_learning_rate(2, 100, 1.0) == pytest.approx(
            expert_learning_rate(2, 100), abs=1e-15)

    def test_half_variability(self):
        assert portfolio_learning_rate(2, 100, 0.5) == pytest.approx(0.0555975, abs=1e-6)

    def test_small_variability_small_rate(self):
        assert portfolio_learning_rate(2, 100, 1e-6) < 1e-6

    def test_domain(self):
        with pytest.raises(DomainError):
            portfolio_learning_rate(2, 100, 0.0)
        with pytest.raises(DomainError):
            portfolio_learning_rate(2, 100, 1.5)


class TestHelmboldUpdate:
    def test_constant_relatives_noop(self):
        out = helmbold_egd_update(W55, np.array([2.0, 2.0]), 0.4)
        assert np.allclose(out.weights, W55.weights, atol=1e-12)

    def test_hand_value(self):
        out = helmbold_egd_update(W55, np.array([1.0, 0.5]), 0.3)
        assert np.allclose(out.weights, [0.549834, 0.450166], atol=1e-6)

    def test_rate_value(self):
        assert helmbold_learning_rate(2, 100, 0.5) == pytest.approx(0.1177410, abs=1e-6)


class TestBuyAndHold:
    def test_flat_market(self):
        series = PriceRelativeSeries(np.ones((5, 3)))
        assert np.allclose(buy_and_hold(series), 1.0)

    def test_single_asset_cumprod(self):
        x = np.array([[1.1], [0.9], [1.05]])
        series = PriceRelativeSeries(x)
        assert np.allclose(buy_and_hold(series)[1:], np.cumprod(x[:, 0]))

    def test_two_asset_first_day(self):
        series = PriceRelativeSeries(np.array([[2.0, 1.0]]))
        assert buy_and_hold(series)[1] == pytest.approx(1.5)


class TestBestCrpOracle:
    def test_single_asset(self):
        x = np.array([[1.2], [0.8]])
        u, logret = best_crp_oracle(PriceRelativeSeries(x), 100)
        assert np.allclose(u.weights, [1.0])
        assert logret == pytest.approx(math.log(1.2) + math.log(0.8))

    def test_symmetric_two_day_market(self):
        x = np.array([[1.0, 0.5], [0.5, 1.0]])
        u, logret = best_crp_oracle(PriceRelativeSeries(x), 1000)
        assert np.allclose(u.weights, [0.5, 0.5], atol=1e-3)
        assert logret == pytest.approx(2.0 * math.log(0.75), abs=1e-6)
        assert logret == pytest.approx(crp_log_return(u.weights, x), abs=1e-12)

    def test_constant_market_all_optimal(self):
        x = np.ones((4, 2))
        _, logret = best_crp_oracle(PriceRelativeSeries(x), 100)
        assert logret == pytest.approx(0.0, abs=1e-12)

    def test_scale_guard(self):
        x = np.ones((2, 4))
        with pytest.raises(DomainError):
            best_crp_oracle(PriceRelativeSeries(x), 100)


class TestMetrics:
    def test_apy_flat(self):
        assert annualized_percentage_yield(1.0, 300) == 0.0

    def test_apy_doubling_in_two_years(self):
        assert annualized_percentage_yield(2.0, 504) == pytest.approx(
            math.sqrt(2.0) - 1.0, abs=1e-12)

    def test_apy_domain(self):
        with pytest.raises(DomainError):
            annualized_percentage_yield(0.0, 100)

    def test_sharpe_zero_at_risk_free(self):
        r = np.array([0.03, 0.05])
        assert sharpe_ratio(0.04, r, 0.04) == pytest.approx(0.0)

    def test_sharpe_hand_value(self):
        # population std of (0.13, 0.15) is exactly 0.01
        r = np.array([0.13, 0.15])
        assert sharpe_ratio(0.14, r, 0.04) == pytest.approx(10.0)

    def test_sharpe_undefined_for_constant(self):
        with pytest.raises(DomainError):
            sharpe_ratio(0.1, np.full(5, 0.02), 0.04)
        with pytest.raises(DimensionError):
            sharpe_ratio(0.1, np.array([0.02]), 0.04)


class TestBacktest:
    def test_constant_market_zero_everything(self):
        series = PriceRelativeSeries(np.ones((30, 2)))
        for strategy in ("cs", "egd", "bh"):
            _, metrics, regret = run_portfolio_backtest(series, strategy,
                                                        grid_resolution=100)
            assert metrics.apy == pytest.approx(0.0, abs=1e-12)
            assert regret.regret == pytest.approx(0.0, abs=1e-9)
            assert math.isnan(metrics.sharpe)

    def test_log_regret_within_bound_on_synthetic_market(self):
        series = synthetic_market(2, 500, 0.5, seed=5)
        _, _, regret = run_portfolio_backtest(series, "cs", variability=0.5,
                                              grid_resolution=1000)
        assert regret.regret <= regret.theoretical_bound + 1e-3

    def test_wealth_accounting_identity(self):
        series = synthetic_market(3, 200, 0.4, seed=6)
        weights, metrics, _ = run_portfolio_backtest(series, "cs",
                                                     grid_resolution=150)
        log_sum = np.log(np.einsum("ti,ti->t", weights, series.relatives)).sum()
        assert metrics.total_return == pytest.approx(math.exp(log_sum), rel=1e-9)

    def test_scale_invariance_of_weights_and_regret(self):
        series = synthetic_market(2, 120, 0.5, seed=7)
        eta = portfolio_learning_rate(2, 120, 0.5)
        w1, _, r1 = run_portfolio_backtest(series, "cs", eta=eta,
                                           grid_resolution=500)
        scales = np.random.default_rng(8).uniform(0.5, 3.0, size=(120, 1))
        scaled = PriceRelativeSeries(series.relatives * scales)
        w2, _, r2 = run_portfolio_backtest(scaled, "cs", eta=eta,
                                           grid_resolution=500)
        assert np.abs(w1 - w2).max() <= 1e-10
        assert abs(r1.regret - r2.regret) <= 1e-10

    def test_weights_stay_strictly_positive(self):
        series = synthetic_market(4, 300, 0.3, seed=9)
        for strategy in ("cs", "egd"):
            weights, _, _ = run_portfolio_backtest(series, strategy)
            assert weights.min() > 0.0
            assert np.abs(weights.sum(axis=1) - 1.0).max() <= 1e-9

    def test_bh_matches_buy_and_hold_wealth(self):
        series = synthetic_market(3, 100, 0.5, seed=10)
        _, metrics, _ = run_portfolio_backtest(series, "bh", grid_resolution=150)
        assert metrics.total_return == pytest.approx(buy_and_hold(series)[-1],
                                                     rel=1e-12)


class TestPriceRelativeSeries:
    def test_market_variability_is_min_entry(self):
        x = np.array([[1.0, 0.7], [0.9, 1.4]])
        assert PriceRelativeSeries(x).market_variability == pytest.approx(0.7)

    def test_rejects_nonpositive(self):
        with pytest.raises(DataValidationError):
            PriceRelativeSeries(np.array([[1.0, 0.0]]))

    def test_names_must_match(self):
        with pytest.raises(DimensionError):
            PriceRelativeSeries(np.ones((2, 2)), ["only-one"])
