import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import instance
from oracles import raw_loss
from l0clf.cd import (TIGHT, cd_fit, lambda0_max, make_solution,
                      zero_solution)
from l0clf.data import SyntheticSpec, gen_synthetic, make_dataset
from l0clf.loss import LOGISTIC, SQUARED_HINGE, PenaltyParams, objective
from l0clf.path import (GridSpec, PathEntry, PathResult, fit_l1_path,
                        fit_path, path_records, support_monotonicity,
                        tune_on_validation, validation_loss)

ONE_L2 = dict(lambda_q_values=(1e-2,))


def small(seed=0, p=15):
    d, truth = instance(n=80, p=p, seed=seed, correlation="exponential",
                        rho=0.5)
    return d, truth


class TestGrid:
    def test_defaults(self):
        d, _ = small()
        g = GridSpec()
        vals = g.q_values(d, LOGISTIC)
        assert len(vals) == 10 and vals[0] == 100.0
        assert vals[-1] == pytest.approx(1e-4)
        assert g.penalties(0.5) == (0.0, 0.5)
        assert GridSpec(q="l1", other=0.3).penalties(0.5) == (0.5, 0.3)

    def test_validation(self):
        for bad in (dict(n_lambda0=0), dict(lambda0_ratio=0.0),
                    dict(q="l3"), dict(lambda_q_values=(-1.0,)),
                    dict(other=-1.0)):
            with pytest.raises(ValueError):
                GridSpec(**bad)

    def test_unknown_algorithm(self):
        d, _ = small()
        with pytest.raises(ValueError, match="cd"):
            fit_path(d, LOGISTIC, GridSpec(**ONE_L2), algorithm="bnb")


class TestFitPath:
    @pytest.mark.parametrize("kind", [LOGISTIC, SQUARED_HINGE])
    def test_starts_at_zero_and_then_moves(self, kind):
        d, _ = small()
        path = fit_path(d, kind, GridSpec(n_lambda0=50, **ONE_L2))
        first = path.entries[0]
        assert first.solution.support_size == 0
        assert first.lam.lambda0 == pytest.approx(
            lambda0_max(d, kind, 0, 1e-2))
        assert path.entries[1].solution.support_size > 0

    def test_single_grid_value(self):
        d, _ = small()
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=1,
                                              lambda_q_values=(1e-2, 1.0)))
        assert len(path) == 2
        assert all(e.solution.support_size == 0 for e in path.entries)

    @pytest.mark.parametrize("seed", range(4))
    def test_dynamic_grid_skips_repeats(self, seed):
        d, _ = small(seed)
        g = dict(n_lambda0=200, lambda0_ratio=1e-3, **ONE_L2)
        dyn = fit_path(d, LOGISTIC, GridSpec(**g), fit_opts=TIGHT)
        sta = fit_path(d, LOGISTIC, GridSpec(**g, dynamic=False),
                       fit_opts=TIGHT)
        assert len(dyn) < len(sta)
        assert not any(e.skipped for e in dyn.entries)
        # Both walks start with the same first entrant.
        assert (dyn.distinct()[1].solution.support.tolist()
                == sta.distinct()[1].solution.support.tolist())
        assert dyn.entries[-1].lam.lambda0 >= 1e-3 * dyn.entries[0].lam.lambda0

    def test_skipped_marks_repeats(self):
        d, _ = small()
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=60, dynamic=False,
                                              **ONE_L2))
        for e in path.entries:
            if e.parent is not None:
                parent = path.entries[e.parent].solution
                same = e.solution.support.tolist() == parent.support.tolist()
                assert e.skipped == same
        assert len(path.distinct()) < len(path)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 5000), st.sampled_from(["cd", "cd+ls"]))
    def test_each_fit_improves_on_its_warm_start(self, seed, algo):
        d, _ = small(seed, p=12)
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=20, dynamic=False,
                                              **ONE_L2), algorithm=algo)
        for e in path.entries:
            if e.parent is None:
                continue
            parent = path.entries[e.parent]
            assert e.lam.lambda0 < parent.lam.lambda0
            start = objective(LOGISTIC, d, parent.solution.beta, e.lam)[0]
            assert e.solution.objective_P <= start + 1e-12

    def test_local_search_path_is_no_worse(self):
        d, _ = instance(n=80, p=20, seed=3, correlation="exponential",
                        rho=0.9)
        g = GridSpec(n_lambda0=15, dynamic=False, **ONE_L2)
        cd = fit_path(d, LOGISTIC, g, fit_opts=TIGHT)
        ls = fit_path(d, LOGISTIC, g, "cd+ls", fit_opts=TIGHT)
        for a, b in zip(cd.entries, ls.entries):
            assert a.lam == b.lam
            if b.parent is None:
                continue
            # Same warm start, cd alone.
            warm = ls.entries[b.parent].solution
            plain = cd_fit(d, LOGISTIC, b.lam, warm, TIGHT)
            assert b.solution.objective_P <= plain.objective_P + 1e-12
        best_cd = min(e.solution.objective_P for e in cd.entries[1:])
        best_ls = min(e.solution.objective_P for e in ls.entries[1:])
        assert best_ls <= best_cd + 1e-12

    def test_max_support_stops_early(self):
        d, _ = small()
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=100, max_support=3,
                                              **ONE_L2))
        assert path.entries[-1].solution.support_size >= 3
        assert all(e.solution.support_size < 3 for e in path.entries[:-1])

    def test_l1_sweep(self):
        d, _ = small()
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=10, q="l1",
                                              other=1e-3))
        l1s = sorted({e.lam.lambda1 for e in path.entries}, reverse=True)
        assert len(l1s) == 10
        assert all(e.lam.lambda2 == 1e-3 for e in path.entries)

    def test_monotonicity_diagnostic(self):
        d, _ = small()
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=40, **ONE_L2))
        share = support_monotonicity(path)
        assert 0.0 <= share <= 1.0
        assert support_monotonicity(PathResult(LOGISTIC)) == 1.0


class TestL1Path:
    def test_shape(self):
        d, _ = small()
        path = fit_l1_path(d, LOGISTIC, n_lambda1=30, lambda2=1e-3)
        assert path.entries[0].solution.support_size == 0
        assert all(e.lam.lambda0 == 0.0 for e in path.entries)
        sizes = [e.solution.support_size for e in path.entries]
        assert sizes[-1] > sizes[1]

    def test_max_support(self):
        d, _ = small()
        path = fit_l1_path(d, LOGISTIC, n_lambda1=100, max_support=4)
        assert path.entries[-1].solution.support_size >= 4
        assert len(path) < 100


def handmade_path(d, betas, lambda0s):
    path = PathResult(LOGISTIC)
    for b, l0 in zip(betas, lambda0s):
        lam = PenaltyParams(l0, 0, 0)
        path.entries.append(PathEntry(lam, make_solution(
            d, LOGISTIC, lam, np.asarray(b, dtype=float)), None))
    return path


class TestTuning:
    def test_validation_loss_matches_definition(self):
        d, _ = small()
        beta = np.zeros(d.p)
        beta[[0, 3]] = (0.7, -0.4)
        want = np.mean(raw_loss("logistic", d.dense() @ beta, d.y))
        assert validation_loss(LOGISTIC, d, beta) == pytest.approx(
            want, rel=1e-13)

    def test_ties_prefer_smaller_support_then_larger_lambda0(self):
        # The validation design has an all-zero second column, so the
        # second coefficient never changes the scores.
        X = np.array([[1.0, 0.0], [-1.0, 0.0], [2.0, 0.0], [-0.5, 0.0]])
        d = make_dataset(X, [1, -1, 1, 1])
        path = handmade_path(d, [[0.5, 1.0], [0.5, 0.0], [0.5, 0.0]],
                             [0.1, 0.2, 0.3])
        entry, table = tune_on_validation(path, d)
        assert entry is path.entries[2]
        assert len({r["val_loss"] for r in table}) == 1

    def test_skipped_entries_excluded_by_default(self):
        d, _ = small()
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=40, dynamic=False,
                                              **ONE_L2))
        _, table = tune_on_validation(path, d)
        assert len(table) == len(path.distinct())
        _, full = tune_on_validation(path, d, include_skipped=True)
        assert len(full) == len(path)

    def test_errors(self):
        d, _ = small()
        with pytest.raises(ValueError, match="empty"):
            tune_on_validation(PathResult(LOGISTIC), d)
        other, _ = instance(n=20, p=3, seed=1)
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=5, **ONE_L2))
        with pytest.raises(ValueError, match="feature"):
            tune_on_validation(path, other)

    def test_large_validation_set_picks_near_best_test_loss(self):
        spec = SyntheticSpec(200, 30, 3, "exponential", 0.5, s=2.0)
        d, _ = gen_synthetic(spec, 0)
        big = SyntheticSpec(5000, 30, 3, "exponential", 0.5, s=2.0)
        val, _ = gen_synthetic(big, 1)
        test, _ = gen_synthetic(big, 2)
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=60, **ONE_L2))
        entry, _ = tune_on_validation(path, val)
        losses = [validation_loss(LOGISTIC, test, e.solution.beta)
                  for e in path.distinct()]
        picked = validation_loss(LOGISTIC, test, entry.solution.beta)
        # Loss differences on 5000 fresh points have sd near 0.005.
        assert picked <= min(losses) + 0.02


class TestRecords:
    def test_json_ready(self):
        d, _ = small()
        path = fit_path(d, LOGISTIC, GridSpec(n_lambda0=10, **ONE_L2))
        _, table = tune_on_validation(path, d)
        recs = path_records(path, table)
        json.dumps(recs)
        assert len(recs) == len(path)
        assert recs[0]["support"] == [] and recs[0]["parent"] is None
        assert all("val_loss" in r for r in recs if not r["skipped"])
        for r, e in zip(recs, path.entries):
            assert [i for i, _ in r["coefficients"]] == r["support"]
            assert r["objective"] == e.solution.objective_P

    def test_zero_solution_record(self):
        d, _ = small()
        lam = PenaltyParams(1.0, 0, 0)
        z = zero_solution(d, LOGISTIC, lam)
        assert z.support_size == 0 and z.converged
