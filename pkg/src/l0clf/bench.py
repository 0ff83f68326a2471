"""Built-in synthetic experiments comparing the path algorithms.

Each scenario draws a training set, fresh validation labels on the same
design and an independent test design per seed. Every method fits a path
on the training set, is tuned on validation loss, and is scored by test AUC
and support recovery against the planted coefficients.
"""

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cd import FitOptions
from .data import SyntheticSpec, gen_synthetic, gen_validation_response
from .iht import ConstrainedSpec, IhtOptions, iht_fit
from .localsearch import SwapOptions
from .loss import LOGISTIC
from .metrics import auc, support_scores
from .path import (GridSpec, PathEntry, PathResult, fit_l1_path, fit_path,
                   tune_on_validation)

THREADS_ENV = "L0CLF_THREADS"
METRICS = ("auc", "f1", "support_size", "false_positives")


@dataclass(frozen=True)
class Scenario:
    name: str
    spec: SyntheticSpec
    lambda2_values: tuple
    methods: tuple = ("cd", "cd+ls", "iht", "l1")
    kind: object = LOGISTIC
    n_lambda0: int = 100
    max_support: int | None = None
    description: str = ""


SCENARIOS = {
    "highcorr-small": Scenario(
        "highcorr-small",
        SyntheticSpec(n=600, p=200, k_dagger=10, correlation="exponential",
                      corr_param=0.9, s=1.0),
        lambda2_values=tuple(np.geomspace(1e-2, 1e-4, 3)),
        max_support=40,
        description="AR(1) correlation 0.9, p=200, 10 planted features"),
    "setting1-small": Scenario(
        "setting1-small",
        SyntheticSpec(n=500, p=2000, k_dagger=10, s=1000.0),
        lambda2_values=tuple(np.geomspace(1e-2, 1e-8, 4)),
        methods=("cd", "cd+ls", "l1"),
        max_support=30,
        description="independent features, nearly noiseless labels"),
    "medcorr-small": Scenario(
        "medcorr-small",
        SyntheticSpec(n=400, p=500, k_dagger=10, correlation="exponential",
                      corr_param=0.5, s=1.0),
        lambda2_values=tuple(np.geomspace(1e-2, 1e-4, 3)),
        max_support=40,
        description="AR(1) correlation 0.5, p=500"),
}


def _iht_path(d, kind, lambda2, max_k):
    """Cardinality-constrained fits for k = 1..max_k, each warm-started
    from the previous k."""
    path = PathResult(kind)
    prev = None
    for k in range(1, max_k + 1):
        spec = ConstrainedSpec(k, 0.0, lambda2)
        sol = iht_fit(d, kind, spec, prev, IhtOptions(rel_tol=1e-8,
                                                       max_iter=2000))
        path.entries.append(PathEntry(spec.penalty, sol,
                                      len(path.entries) - 1 if prev else None))
        prev = sol
    return path


def _method_path(method, sc, d, lambda2):
    fit_opts = FitOptions(rel_tol=1e-8)
    max_support = sc.max_support or d.p
    if method in ("cd", "cd+ls"):
        grid = GridSpec(n_lambda0=sc.n_lambda0, q="l2",
                        lambda_q_values=(lambda2,), max_support=max_support)
        return fit_path(d, sc.kind, grid, method, fit_opts, SwapOptions())
    if method == "iht":
        return _iht_path(d, sc.kind, lambda2, min(max_support, d.p))
    if method == "l1":
        return fit_l1_path(d, sc.kind, n_lambda1=sc.n_lambda0,
                           fit_opts=fit_opts, max_support=max_support)
    raise ValueError(f"unknown method {method!r}")


def run_seed(scenario, seed):
    """Rows (one per method) for a single seed."""
    sc = SCENARIOS[scenario] if isinstance(scenario, str) else scenario
    d, truth = gen_synthetic(sc.spec, seed)
    d_val = d.with_labels(gen_validation_response(d, truth, sc.spec, seed))
    d_test, _ = gen_synthetic(sc.spec, seed, stream=1)
    true_support = np.flatnonzero(truth)
    rows = []
    for method in sc.methods:
        # The l1 baseline has no continuous sweep of its own.
        l2_values = (0.0,) if method == "l1" else sc.lambda2_values
        best = None
        for l2 in l2_values:
            path = _method_path(method, sc, d, l2)
            entry, table = tune_on_validation(path, d_val)
            loss = min(r["val_loss"] for r in table)
            if best is None or loss < best[0] - 1e-12:
                best = (loss, entry)
        loss, entry = best
        beta = entry.solution.beta
        prec, rec, f1, fp = support_scores(np.flatnonzero(beta),
                                           true_support)
        try:
            test_auc = auc(d_test.matvec(beta), d_test.y)
        except ValueError:
            test_auc = math.nan
        rows.append({"scenario": sc.name, "seed": seed, "method": method,
                     "auc": test_auc, "f1": f1,
                     "support_size": int(np.count_nonzero(beta)),
                     "false_positives": fp, "precision": prec,
                     "recall": rec, "val_loss": loss,
                     "lambda0": entry.lam.lambda0,
                     "lambda1": entry.lam.lambda1,
                     "lambda2": entry.lam.lambda2})
    return rows


def worker_count(requested=None):
    if requested:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_scenario(scenario, seeds, workers=None):
    """All rows for ``seeds``, ordered by seed then method."""
    if isinstance(scenario, str) and scenario not in SCENARIOS:
        raise KeyError(scenario)
    seeds = list(seeds)
    n = min(worker_count(workers), len(seeds)) or 1
    if n == 1:
        results = [run_seed(scenario, s) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(run_seed, [scenario] * len(seeds), seeds))
    return [row for rows in results for row in rows]


def summarize(rows):
    """Per-method mean and standard error of every metric.

    Standard errors are None when only one seed is present.
    """
    methods = list(dict.fromkeys(r["method"] for r in rows))
    out = []
    for m in methods:
        sub = [r for r in rows if r["method"] == m]
        rec = {"method": m, "seeds": len(sub)}
        for key in METRICS:
            vals = np.array([r[key] for r in sub], dtype=float)
            rec[f"{key}_mean"] = float(np.mean(vals))
            rec[f"{key}_stderr"] = (float(np.std(vals, ddof=1)
                                          / math.sqrt(len(vals)))
                                    if len(vals) > 1 else None)
        out.append(rec)
    return out


PER_SEED_COLUMNS = ("scenario", "seed", "method", "auc", "f1",
                    "support_size", "false_positives", "precision", "recall",
                    "val_loss", "lambda0", "lambda1", "lambda2")


def _cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_per_seed(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PER_SEED_COLUMNS)
        for r in rows:
            w.writerow([_cell(r[c]) for c in PER_SEED_COLUMNS])


def write_summary(summary, path):
    single = all(s["seeds"] == 1 for s in summary)
    cols = ["method", "seeds"]
    for key in METRICS:
        cols.append(f"{key}_mean")
        if not single:
            cols.append(f"{key}_stderr")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for s in summary:
            w.writerow(["" if s[c] is None else _cell(s[c]) for c in cols])
