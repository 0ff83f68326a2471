import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import instance
from oracles import grid_threshold_min, one_d_objective, raw_objective
from l0clf.cd import (TIGHT, FitOptions, cd_fit, check_stationarity,
                      lambda0_max, lhat_vector, threshold)
from l0clf.data import make_dataset
from l0clf.loss import (LOGISTIC, SQUARED_HINGE, PenaltyParams,
                        coordinate_lipschitz, objective, smoothed_hinge)

KINDS = [LOGISTIC, SQUARED_HINGE, smoothed_hinge()]


class TestThreshold:
    def test_no_penalty_is_identity(self):
        assert threshold(3.7, PenaltyParams(0, 0, 0), 1.0) == 3.7

    def test_zero_input(self):
        assert threshold(0.0, PenaltyParams(0.3, 0.1, 0.2), 2.0) == 0.0

    def test_frozen_examples(self, frozen):
        for ex in frozen["threshold"]:
            got = threshold(ex["c"], PenaltyParams(*ex["lambda"]), ex["lhat"])
            assert got == pytest.approx(ex["argmin"], abs=1e-6)
            val = one_d_objective(got, ex["c"], *ex["lambda"], ex["lhat"])
            assert val <= ex["value"] + 1e-12

    def test_tie_keeps_nonzero(self):
        # a = 1 and the cut sqrt(2 * 1 / 2) = 1 coincide exactly.
        assert threshold(1.0, PenaltyParams(1.0, 0, 0), 2.0) == 1.0

    def test_rejects_nonpositive_lhat(self):
        with pytest.raises(ValueError):
            threshold(1.0, PenaltyParams(), 0.0)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(-12, 12), st.floats(0, 3), st.floats(0, 3),
           st.floats(0, 3), st.floats(0.01, 10))
    def test_matches_grid_oracle(self, c, l0, l1, l2, lhat):
        out = threshold(c, PenaltyParams(l0, l1, l2), lhat)
        val = float(one_d_objective(out, c, l0, l1, l2, lhat))
        _, best = grid_threshold_min(c, l0, l1, l2, lhat)
        assert val <= best[0] + 1e-8
        cut = math.sqrt(2 * l0 / (lhat + 2 * l2))
        assert out == 0.0 or abs(out) >= cut - 1e-12


def trace_instance(seed=0, n=100, p=10):
    d, _ = instance(n=n, p=p, seed=seed, correlation="exponential", rho=0.5)
    return d


class TestCdFit:
    def test_zero_above_lambda0_max(self):
        d = trace_instance()
        top = lambda0_max(d, LOGISTIC, 0.0, 1e-3)
        sol = cd_fit(d, LOGISTIC, PenaltyParams(top * 1.0001, 0, 1e-3))
        assert sol.support_size == 0

    def test_trace_monotone_and_audited(self):
        d = trace_instance()
        lam = PenaltyParams(0.01, 0, 1e-4)
        sol = cd_fit(d, LOGISTIC, lam, trace=True)
        tr = sol.info["trace"]
        X, y = d.dense(), d.y
        beta = np.zeros(d.p)
        prev = tr["P0"]
        assert prev == pytest.approx(math.log(2))
        L = coordinate_lipschitz(LOGISTIC, d)
        lhat = lhat_vector(LOGISTIC, d, 1.05)
        for j, P, delta in zip(tr["coord"], tr["P"], tr["delta"]):
            old = beta[j]
            beta[j] += delta
            if beta[j] == 0:
                beta[j] = 0.0
            want = raw_objective("logistic", X, y, beta, *[lam.lambda0,
                                 lam.lambda1, lam.lambda2])[0]
            assert P == pytest.approx(want, rel=1e-10, abs=1e-12)
            drop = prev - P
            assert drop >= (lhat[j] - L[j]) / 2 * delta ** 2 - 1e-9
            if (old == 0) != (beta[j] == 0):
                assert drop >= (lam.lambda0 * (lhat[j] - L[j])
                                / (lhat[j] + 2 * lam.lambda2) - 1e-9)
            prev = P
        np.testing.assert_allclose(beta, sol.beta, atol=1e-12)

    def test_two_feature_toy_against_enumeration(self, frozen):
        ref = frozen["cd_toy2"]
        d = make_dataset(np.array(ref["X"]), ref["y"])
        lam = PenaltyParams(*ref["lambda"])
        sol = cd_fit(d, LOGISTIC, lam, opts=TIGHT)
        np.testing.assert_allclose(sol.beta, ref["beta"], atol=1e-4)
        assert sol.objective_P == pytest.approx(ref["P"], abs=1e-9)

    def test_cycle_cap_flags(self):
        d = trace_instance()
        sol = cd_fit(d, LOGISTIC, PenaltyParams(1e-3, 0, 1e-4),
                     opts=FitOptions(max_full_cycles=1, rel_tol=1e-12))
        assert sol.converged is False
        assert np.all(np.isfinite(sol.beta))

    def test_sparse_storage_matches_dense(self):
        d = trace_instance(seed=2)
        ds = make_dataset(sp.csc_matrix(d.dense()), d.y)
        lam = PenaltyParams(0.005, 0.001, 1e-3)
        a = cd_fit(d, LOGISTIC, lam, opts=TIGHT)
        b = cd_fit(ds, LOGISTIC, lam, opts=TIGHT)
        np.testing.assert_allclose(a.beta, b.beta, atol=1e-10)

    def test_zero_column_stays_zero(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((40, 4))
        X[:, 2] = 0.0
        d = make_dataset(X, np.where(rng.random(40) < 0.5, -1.0, 1.0))
        sol = cd_fit(d, LOGISTIC, PenaltyParams(1e-3, 0, 1e-3))
        assert sol.beta[2] == 0.0

    def test_debug_cache_check(self):
        d = trace_instance(seed=3)
        sol = cd_fit(d, SQUARED_HINGE, PenaltyParams(0.01, 0, 1e-2),
                     opts=FitOptions(debug=True))
        assert sol.converged

    @pytest.mark.parametrize("opts", [
        TIGHT.replace(cycle_order="partially-greedy"),
        TIGHT.replace(screening=True),
        TIGHT.replace(active_set=False),
    ])
    def test_variants_reach_stationary_points(self, opts):
        d = trace_instance(seed=4)
        lam = PenaltyParams(0.01, 0.001, 1e-3)
        sol = cd_fit(d, LOGISTIC, lam, opts=opts)
        assert check_stationarity(sol, d, LOGISTIC, lam, opts).passed

    def test_solution_invariants(self):
        d = trace_instance(seed=5)
        lam = PenaltyParams(0.01, 0.002, 1e-3)
        sol = cd_fit(d, LOGISTIC, lam)
        np.testing.assert_array_equal(sol.support, np.flatnonzero(sol.beta))
        P, G, g = objective(LOGISTIC, d, sol.beta, lam)
        assert (sol.objective_P, sol.objective_G, sol.objective_g) == (P, G,
                                                                       g)
        assert not sol.beta.flags.writeable

    def test_bad_init_length(self):
        d = trace_instance()
        with pytest.raises(ValueError):
            cd_fit(d, LOGISTIC, PenaltyParams(), np.zeros(3))


class TestLambda0Max:
    def test_zero_gradient(self):
        d = make_dataset(np.array([[1.0], [-1.0]]), [1, 1])
        assert lambda0_max(d, LOGISTIC, 0, 0) == 0.0

    def test_large_l1(self):
        d = trace_instance()
        assert lambda0_max(d, LOGISTIC, 10.0, 0) == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_both_sides(self, seed):
        d, _ = instance(n=50, p=8, seed=seed)
        for kind in KINDS:
            top = lambda0_max(d, kind, 0.0, 1e-3)
            hi = cd_fit(d, kind, PenaltyParams(1.01 * top, 0, 1e-3))
            lo = cd_fit(d, kind, PenaltyParams(0.5 * top, 0, 1e-3))
            assert hi.support_size == 0
            assert lo.support_size > 0


class TestStationarity:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 5000), st.sampled_from(KINDS),
           st.floats(0.05, 0.9), st.sampled_from([0.0, 1e-3]))
    def test_converged_fit_passes(self, seed, kind, frac, l1):
        d, _ = instance(n=60, p=15, seed=seed, correlation="exponential",
                        rho=0.6)
        top = lambda0_max(d, kind, l1, 1e-3)
        lam = PenaltyParams(frac * top, l1, 1e-3)
        sol = cd_fit(d, kind, lam, opts=TIGHT)
        assert sol.converged
        rep = check_stationarity(sol, d, kind, lam, TIGHT)
        assert rep.passed, rep

    def test_zero_above_max_passes(self):
        d = trace_instance()
        top = lambda0_max(d, LOGISTIC, 0.0, 0.0)
        lam = PenaltyParams(1.5 * top, 0, 0)
        assert check_stationarity(np.zeros(d.p), d, LOGISTIC, lam).passed

    def test_halved_coefficient_fails(self):
        d = trace_instance()
        lam = PenaltyParams(1e-3, 0, 1e-3)
        sol = cd_fit(d, LOGISTIC, lam, opts=TIGHT)
        beta = sol.beta.copy()
        j = int(np.argmax(np.abs(beta)))
        beta[j] /= 2
        rep = check_stationarity(beta, d, LOGISTIC, lam)
        assert rep.restricted_residual > 1e-6
        assert not rep.passed
