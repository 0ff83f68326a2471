import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import instance
from oracles import brute_force_sparse_prox
from l0clf.cd import TIGHT, cd_fit, make_solution
from l0clf.data import SyntheticSpec, gen_synthetic, make_dataset
from l0clf.iht import (ConstrainedSpec, IhtOptions, constrained_path,
                       iht_fit, iht_fixed_point, iht_step, penalized_iht_fit,
                       step_size, top_k)
from l0clf.loss import (LOGISTIC, SQUARED_HINGE, PenaltyParams,
                        global_lipschitz, gradient, objective)

TIGHT_IHT = IhtOptions(rel_tol=1e-15, max_iter=200_000)


def constrained_value(kind, d, beta, spec):
    return objective(kind, d, beta, spec.penalty)[1]


class TestStep:
    def test_top_k_ties_to_lower_index(self):
        np.testing.assert_array_equal(top_k(np.array([1, -3, 3, 2.0]), 2),
                                      [1, 2])
        np.testing.assert_array_equal(top_k(np.ones(4), 3), [0, 1, 2])

    def test_keeps_largest_magnitude(self):
        # Zero design: the gradient vanishes, so the step keeps c itself.
        d = make_dataset(np.zeros((4, 3)), [1, -1, 1, -1])
        out = iht_step(np.array([3.0, -5.0, 1.0]), ConstrainedSpec(1), d,
                       LOGISTIC, tau=1.0)
        np.testing.assert_array_equal(out, [0.0, -5.0, 0.0])

    def test_unconstrained_is_gradient_step(self):
        d, _ = instance(n=40, p=5, seed=1)
        spec = ConstrainedSpec(5)
        beta = np.linspace(-1, 1, 5)
        tau = step_size(spec, d, LOGISTIC)
        want = beta - tau * gradient(LOGISTIC, d, beta)
        np.testing.assert_allclose(iht_step(beta, spec, d, LOGISTIC), want,
                                   rtol=1e-14)

    def test_step_size(self):
        d, _ = instance(n=40, p=5, seed=1)
        spec = ConstrainedSpec(2, gamma=2.0)
        assert step_size(spec, d, LOGISTIC) == pytest.approx(
            1 / (2 * global_lipschitz(LOGISTIC, d)))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 8), st.floats(0, 0.5),
           st.floats(0, 0.5))
    def test_matches_brute_force_projection(self, seed, k, l1, l2):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((60, 8))
        d = make_dataset(X, np.where(rng.random(60) < 0.5, -1.0, 1.0))
        beta = rng.standard_normal(8) * (rng.random(8) < 0.5)
        spec = ConstrainedSpec(k, l1, l2)
        tau = step_size(spec, d, LOGISTIC)
        c = beta - tau * gradient(LOGISTIC, d, beta)
        want, best = brute_force_sparse_prox(c, k, tau, l1, l2)
        got = iht_step(beta, spec, d, LOGISTIC, tau)
        val = (0.5 * np.sum((got - c) ** 2)
               + tau * (l1 * np.abs(got).sum() + l2 * got @ got))
        assert np.count_nonzero(got) <= k
        assert val <= best + 1e-12


class TestFit:
    def test_k_zero(self):
        d, _ = instance(n=40, p=5, seed=2)
        sol = iht_fit(d, LOGISTIC, ConstrainedSpec(0))
        assert sol.support_size == 0
        assert sol.objective_G == pytest.approx(np.log(2))

    def test_k_at_least_p_is_ridge(self, frozen):
        ref = frozen["iht_ridge"]
        d, _ = gen_synthetic(SyntheticSpec.from_dict(ref["spec"]),
                             ref["seed"])
        spec = ConstrainedSpec(20, 0.0, ref["lambda2"])
        sol = iht_fit(d, LOGISTIC, spec, opts=TIGHT_IHT)
        np.testing.assert_allclose(sol.beta, ref["beta"], atol=1e-6)
        assert sol.info["degenerate"] is False

    @pytest.mark.parametrize("kind", [LOGISTIC, SQUARED_HINGE])
    def test_monotone_with_sufficient_decrease(self, kind):
        d, _ = instance(n=80, p=20, seed=3, correlation="exponential",
                        rho=0.7)
        spec = ConstrainedSpec(4, 0.001, 0.01)
        L = global_lipschitz(kind, d)
        lhat = spec.gamma * L
        beta = np.zeros(d.p)
        cur = constrained_value(kind, d, beta, spec)
        for _ in range(200):
            new = iht_step(beta, spec, d, kind)
            val = constrained_value(kind, d, new, spec)
            gap = (lhat - L) / 2 * np.sum((new - beta) ** 2)
            assert val <= cur - gap + 1e-12
            beta, cur = new, val

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 5000), st.integers(1, 6))
    def test_output_is_fixed_point(self, seed, k):
        d, _ = instance(n=70, p=15, seed=seed, correlation="exponential",
                        rho=0.5)
        spec = ConstrainedSpec(k, 0.0, 1e-2)
        sol = iht_fit(d, LOGISTIC, spec, opts=TIGHT_IHT)
        assert sol.converged
        assert sol.support_size <= k
        assert iht_fixed_point(sol, spec, d, LOGISTIC).passed
        again = iht_step(sol.beta, spec, d, LOGISTIC)
        np.testing.assert_allclose(again, sol.beta, atol=1e-7)

    def test_non_fixed_point_fails_check(self):
        d, _ = instance(n=70, p=15, seed=4)
        spec = ConstrainedSpec(3, 0.0, 1e-2)
        sol = iht_fit(d, LOGISTIC, spec, opts=TIGHT_IHT)
        beta = sol.beta.copy()
        beta[sol.support[0]] *= 0.5
        assert not iht_fixed_point(beta, spec, d, LOGISTIC).passed
        assert not iht_fixed_point(np.ones(15), spec, d, LOGISTIC).feasible

    def test_fixed_point_start_returns_same_object(self):
        d, _ = instance(n=70, p=15, seed=5)
        spec = ConstrainedSpec(3, 0.0, 1e-2)
        beta = iht_fit(d, LOGISTIC, spec, opts=TIGHT_IHT).beta
        for _ in range(20_000):
            new = iht_step(beta, spec, d, LOGISTIC)
            if np.max(np.abs(new - beta)) <= 1e-13:
                break
            beta = new
        sol = make_solution(d, LOGISTIC, spec.penalty, new)
        assert iht_fit(d, LOGISTIC, spec, sol, TIGHT_IHT) is sol
        moved = make_solution(d, LOGISTIC, spec.penalty, 0.9 * new)
        assert iht_fit(d, LOGISTIC, spec, moved, TIGHT_IHT) is not moved

    def test_infeasible_start_is_reset(self):
        d, _ = instance(n=70, p=15, seed=6)
        spec = ConstrainedSpec(2, 0.0, 1e-2)
        sol = iht_fit(d, LOGISTIC, spec, np.ones(15), TIGHT_IHT)
        assert sol.support_size <= 2

    def test_iht_does_not_lose_to_its_start(self):
        # Starting from a cd fit the constrained objective can only drop.
        d, _ = instance(n=80, p=20, seed=7, correlation="exponential",
                        rho=0.8)
        lam = PenaltyParams(0.01, 0, 1e-2)
        cd = cd_fit(d, LOGISTIC, lam, opts=TIGHT)
        spec = ConstrainedSpec(cd.support_size + 1, 0, 1e-2)
        sol = iht_fit(d, LOGISTIC, spec, cd, TIGHT_IHT)
        assert sol.objective_G <= cd.objective_G + 1e-12

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ConstrainedSpec(-1)
        with pytest.raises(ValueError):
            ConstrainedSpec(2, gamma=1.0)
        with pytest.raises(ValueError):
            ConstrainedSpec(2, lambda2=-1)


class TestConstrainedPath:
    def test_exact_size_short_circuits(self):
        d, _ = instance(n=60, p=10, seed=8)
        lam = PenaltyParams(0.02, 0, 1e-2)
        fit = cd_fit(d, LOGISTIC, lam, opts=TIGHT)
        k = fit.support_size
        out = constrained_path(d, LOGISTIC, 0, 1e-2, [k, k + 1], [fit])
        assert out[0] is fit
        assert out[1].support_size <= k + 1

    def test_degenerate_flag(self):
        # Only one column carries signal; the others are exactly zero.
        rng = np.random.default_rng(0)
        X = np.zeros((30, 4))
        X[:, 0] = rng.standard_normal(30)
        d = make_dataset(X, np.sign(X[:, 0]))
        out = constrained_path(d, LOGISTIC, 0, 1e-2, [3], [])
        assert out[0].support_size == 1
        assert out[0].info["degenerate"] is True


class TestPenalizedIht:
    def test_descends_and_is_a_cd_fixed_point(self):
        d, _ = instance(n=80, p=15, seed=9)
        lam = PenaltyParams(0.01, 0.0, 1e-2)
        sol = penalized_iht_fit(d, LOGISTIC, lam, opts=TIGHT_IHT)
        assert sol.converged
        assert sol.objective_P < np.log(2)
        # Prox-gradient fixed points are also coordinate-wise minima
        # under the larger global constant, so cd cannot move far.
        polished = cd_fit(d, LOGISTIC, lam, sol, TIGHT)
        assert polished.objective_P <= sol.objective_P + 1e-12
        assert set(polished.support) == set(sol.support)
