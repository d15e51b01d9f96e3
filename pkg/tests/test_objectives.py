import math

import numpy as np
import pytest

from simplexopt import (
    DimensionError,
    DomainError,
    ExamWeightingProblem,
    HullProjectionProblem,
    SimplexPoint,
    TruncatedNormal,
    exam_value_grad,
    finite_difference_check,
    hull_value_grad,
    kde_density,
    kkt_residual,
    run_solver,
    TerminationRule,
)
from oracles import exact_hull_projection, exam_value_brute, kde_brute, truncnorm_pdf


class LinearObjective:
    is_quadratic = False

    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)
        self.n_weights = self.c.shape[0]

    def value(self, w):
        return float(self.c @ w)

    def value_grad(self, w):
        return self.value(w), self.c.copy()


def small_exam_problem(seed=0, n=5, d=8, bandwidth=0.07, m=30):
    rng = np.random.default_rng(seed)
    scores = (rng.random((n, d)) < 0.6).astype(float)
    return ExamWeightingProblem(scores, bandwidth=bandwidth,
                                partition=np.linspace(0.0, 1.0, m + 1))


class TestHullObjective:
    def test_identity_example(self):
        prob = HullProjectionProblem(np.eye(2), np.array([0.0, 1.0]))
        value, grad = hull_value_grad(prob, SimplexPoint([0.5, 0.5]))
        assert value == pytest.approx(0.5)
        assert np.allclose(grad, [1.0, -1.0])

    def test_exact_fit_vertex(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(5, 3))
        prob = HullProjectionProblem(X, X[0])
        w = SimplexPoint([1.0, 0.0, 0.0, 0.0, 0.0])
        value, grad = hull_value_grad(prob, w)
        assert value <= 1e-28
        rep = kkt_residual(w, grad)
        assert rep.stationarity_residual <= 1e-12

    def test_duplicate_rows_pointlike_hull(self):
        x = np.array([0.3, 0.7, 0.1])
        X = np.tile(x, (4, 1))
        prob = HullProjectionProblem(X, x)
        value, _ = hull_value_grad(prob, SimplexPoint.uniform(4))
        assert value <= 1e-28

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            HullProjectionProblem(np.eye(2), np.array([1.0, 2.0, 3.0]))

    def test_gradient_vs_central_differences(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            n, d = int(rng.integers(2, 8)), int(rng.integers(2, 5))
            prob = HullProjectionProblem(rng.normal(size=(n, d)),
                                         rng.normal(size=d))
            w = SimplexPoint(rng.dirichlet(np.full(n, 5.0)))
            report = finite_difference_check(prob, w, 1e-6)
            assert report.max_relative_error <= 1e-8


class TestKdeDensity:
    def test_single_student_single_question(self):
        prob = ExamWeightingProblem(np.array([[1.0]]), bandwidth=0.05)
        w = SimplexPoint([1.0])
        z = 0.73
        expected = truncnorm_pdf(z, 1.0, 0.05)
        assert kde_density(prob, w, z)[0] == pytest.approx(expected, rel=1e-12)

    def test_duplicate_students_average_to_one_bump(self):
        scores = np.array([[1.0, 1.0], [0.0, 0.0], [1.0, 1.0]])
        prob = ExamWeightingProblem(scores, bandwidth=0.06)
        w = SimplexPoint([0.2, 0.5, 0.3])
        single = ExamWeightingProblem(scores[:, :1], bandwidth=0.06)
        z = np.linspace(0.0, 1.0, 11)
        assert np.allclose(kde_density(prob, w, z), kde_density(single, w, z))

    def test_two_student_mixture_against_scipy(self):
        # weighted scores (0.2, 0.8) from 5 equally weighted questions
        scores = np.zeros((5, 2))
        scores[0, 0] = 1.0
        scores[:4, 1] = 1.0
        prob = ExamWeightingProblem(scores, bandwidth=0.05)
        w = SimplexPoint.uniform(5)
        assert np.allclose(prob.weighted_scores(w.weights), [0.2, 0.8])
        for z in (0.2, 0.5, 0.8, 0.0, 1.0):
            mine = kde_density(prob, w, z)[0]
            ref = kde_brute(scores, w.weights, 0.05, z)
            assert mine == pytest.approx(ref, rel=1e-10, abs=1e-12)

    def test_density_nonnegative_and_normalized(self):
        prob = small_exam_problem(seed=3, bandwidth=0.05, m=400)
        w = SimplexPoint(np.random.default_rng(4).dirichlet(np.ones(5)))
        z = np.linspace(0.0, 1.0, 401)
        rho = kde_density(prob, w, z)
        assert (rho >= 0.0).all()
        assert prob.quadrature_mass(w.weights) == pytest.approx(1.0, abs=0.02)

    def test_zero_outside_unit_interval(self):
        prob = small_exam_problem()
        w = SimplexPoint.uniform(5)
        assert kde_density(prob, w, np.array([-0.1, 1.1])).max() == 0.0


class TestExamObjective:
    def test_matching_density_gives_zero(self):
        # a synthetic case where rho equals the target at every partition
        # point: compare the objective against the brute-force recomputation
        # and check the self-match identity D(rho|rho) = 0 term by term
        prob = small_exam_problem(seed=5)
        w = SimplexPoint(np.random.default_rng(6).dirichlet(np.ones(5)))
        rho = prob.density(w.weights, prob._eval_points)

        class SelfTarget:
            def pdf(self, x):
                return prob.density(w.weights, x)

        clone = ExamWeightingProblem(prob.scores, bandwidth=prob.bandwidth,
                                     partition=prob.partition)
        object.__setattr__(clone, "_target_at_points", np.maximum(rho, 1e-300))
        assert clone.value(w.weights) == pytest.approx(0.0, abs=1e-14)

    def test_value_and_gradient_vs_brute_force(self):
        prob = small_exam_problem(seed=7, n=4, d=6, bandwidth=0.08, m=25)
        w = SimplexPoint(np.random.default_rng(8).dirichlet(np.full(4, 4.0)))
        value, grad = exam_value_grad(prob, w)
        ref = exam_value_brute(prob.scores, w.weights, 0.08, 0.5, 0.1,
                               prob.partition)
        assert value == pytest.approx(ref, rel=1e-10, abs=1e-12)
        report = finite_difference_check(prob, w, 1e-6)
        assert report.max_relative_error <= 1e-5

    def test_value_can_dip_only_within_quadrature_slack(self):
        rng = np.random.default_rng(9)
        for trial in range(10):
            prob = small_exam_problem(seed=100 + trial, n=6, d=10,
                                      bandwidth=0.05, m=200)
            w = SimplexPoint(rng.dirichlet(np.ones(6)))
            value = prob.value(w.weights)
            rho = prob.density(w.weights, prob._eval_points)
            pos = rho > 0
            logs = np.abs(np.log(rho[pos] / prob._target_at_points[pos]))
            slack = abs(1.0 - prob.quadrature_mass(w.weights)) * logs.max()
            assert value >= -slack - 1e-12

    def test_underflowed_density_contributes_zero_and_is_flagged(self):
        # one all-correct question: every bump sits at 1, and with a tiny
        # bandwidth the density underflows to exactly 0 far from it
        prob = ExamWeightingProblem(np.ones((1, 3)), bandwidth=0.005,
                                    partition=np.linspace(0.0, 1.0, 51))
        w = SimplexPoint([1.0])
        flagged = prob.zero_density_points(w.weights)
        assert flagged.size > 0
        assert math.isfinite(prob.value(w.weights))
        _, grad = prob.value_grad(w.weights)
        assert np.isfinite(grad).all()

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            ExamWeightingProblem(np.array([[0.5]]))
        with pytest.raises(DomainError):
            ExamWeightingProblem(np.array([[1.0]]), bandwidth=-0.1)
        with pytest.raises(DomainError):
            ExamWeightingProblem(np.array([[1.0]]), partition=np.array([0.5, 0.2]))
        with pytest.raises(DomainError):
            ExamWeightingProblem(np.array([[1.0]]), kernel="epanechnikov")


class TestTruncatedNormal:
    def test_normalizes_on_unit_interval(self):
        t = TruncatedNormal(0.5, 0.1)
        x = np.linspace(0.0, 1.0, 2001)
        mass = np.trapezoid(t.pdf(x), x)
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_zero_outside(self):
        t = TruncatedNormal(0.5, 0.1)
        assert t.pdf(np.array([-0.2, 1.2])).max() == 0.0

    def test_matches_scipy(self):
        t = TruncatedNormal(0.4, 0.2)
        for z in (0.0, 0.3, 0.9):
            assert t.pdf(z) == pytest.approx(truncnorm_pdf(z, 0.4, 0.2), rel=1e-12)


class TestFiniteDifferenceCheck:
    def test_linear_objective_exact(self):
        obj = LinearObjective([1.0, -2.0, 0.5])
        report = finite_difference_check(obj, SimplexPoint.uniform(3), 1e-6)
        assert report.max_relative_error <= 1e-10

    def test_quadratic_objective_near_exact(self):
        rng = np.random.default_rng(10)
        prob = HullProjectionProblem(rng.normal(size=(6, 3)), rng.normal(size=3))
        report = finite_difference_check(prob, SimplexPoint.uniform(6), 1e-6)
        assert report.max_relative_error <= 1e-8

    def test_requires_interior_point(self):
        obj = LinearObjective([1.0, 2.0])
        with pytest.raises(DomainError):
            finite_difference_check(obj, SimplexPoint([1.0, 0.0]), 1e-6)

    def test_per_coordinate_errors_shape(self):
        obj = LinearObjective([1.0, 2.0, 3.0, 4.0])
        report = finite_difference_check(obj, SimplexPoint.uniform(4), 1e-7)
        assert report.per_coordinate.shape == (4,)
        assert (report.per_coordinate >= 0.0).all()


class TestHullKktAtConvergence:
    def test_converged_solution_matches_enumeration_oracle(self):
        from simplexopt.bench import make_query_point, sample_hypercube_hull

        X = sample_hypercube_hull(3, 8, seed=21)
        inst = make_query_point(X, surface=4, seed=22)
        prob = HullProjectionProblem(X, inst.query)
        trace = run_solver(prob, "cs",
                           stop=TerminationRule(max_iterations=20000,
                                                gradient_variance_tolerance=1e-26))
        w = trace.final_point
        _, grad = prob.value_grad(w.weights)
        rep = kkt_residual(w, grad)
        assert rep.stationarity_residual <= 1e-6
        assert rep.dual_feasibility_violation <= 1e-8
        _, f_star = exact_hull_projection(X, inst.query)
        assert trace.final_objective <= f_star + 1e-9
        assert abs(trace.final_objective - f_star) <= 1e-8
