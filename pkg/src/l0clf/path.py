"""Regularization paths over (lambda0, lambda_q) and validation tuning."""

from dataclasses import dataclass, field

import numpy as np

from .cd import FitOptions, cd_fit, lambda0_max, lhat_vector, zero_solution
from .localsearch import SwapOptions, cd_with_local_search
from .loss import PenaltyParams, gradient, loss_value
from .metrics import auc

ALGORITHMS = ("cd", "cd+ls")
DYNAMIC_UNDERSHOOT = 1e-3
TIE_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Grid over lambda0 (inner, decreasing) and lambda_q (outer).

    ``q`` names the swept continuous penalty ("l2" or "l1"); the other one
    is held at ``other``. ``lambda_q_values`` None means 10 log-spaced
    values: [1e-4, 100] for l2, [a, 1e-4 a] for l1 with a = max|grad g(0)|.
    """

    n_lambda0: int = 100
    lambda0_ratio: float = 1e-3
    q: str = "l2"
    lambda_q_values: tuple | None = None
    other: float = 0.0
    dynamic: bool = True
    max_support: int | None = None

    def __post_init__(self):
        if self.n_lambda0 < 1:
            raise ValueError("n_lambda0 must be at least 1")
        if not 0 < self.lambda0_ratio <= 1:
            raise ValueError("lambda0_ratio must lie in (0, 1]")
        if self.q not in ("l1", "l2"):
            raise ValueError("q must be 'l1' or 'l2'")
        if self.lambda_q_values is not None:
            vals = tuple(float(v) for v in self.lambda_q_values)
            if not vals or min(vals) < 0:
                raise ValueError("lambda_q values must be non-negative")
            object.__setattr__(self, "lambda_q_values", vals)
        if self.other < 0:
            raise ValueError("the fixed penalty must be non-negative")

    def q_values(self, d, kind):
        if self.lambda_q_values is not None:
            return self.lambda_q_values
        if self.q == "l2":
            return tuple(np.geomspace(100.0, 1e-4, 10))
        a = float(np.max(np.abs(gradient(kind, d, np.zeros(d.p)))))
        return tuple(np.geomspace(a, 1e-4 * a, 10))

    def penalties(self, lq):
        if self.q == "l2":
            return self.other, lq
        return lq, self.other


@dataclass(frozen=True, eq=False)
class PathEntry:
    lam: PenaltyParams
    solution: object
    parent: int | None
    skipped: bool = False


@dataclass(eq=False)
class PathResult:
    """Path fits in visiting order.

    ``parent`` is the index of the entry whose solution seeded the fit;
    ``skipped`` marks fits that repeated the previous support.
    """

    kind: object
    entries: list = field(default_factory=list)

    def distinct(self):
        return [e for e in self.entries if not e.skipped]

    def solutions(self, lambda1=None, lambda2=None):
        out = []
        for e in self.distinct():
            if lambda1 is not None and e.lam.lambda1 != lambda1:
                continue
            if lambda2 is not None and e.lam.lambda2 != lambda2:
                continue
            out.append(e.solution)
        return out

    def __len__(self):
        return len(self.entries)


def admissible_lambda0(d, kind, beta, lam, gamma):
    """Largest lambda0 at which some zero coordinate of ``beta`` can enter."""
    grad = np.abs(gradient(kind, d, beta))
    lhat = lhat_vector(kind, d, gamma)
    off = beta == 0
    if not off.any():
        return 0.0
    excess = np.maximum(grad[off] - lam.lambda1, 0.0)
    return float(np.max(excess ** 2 / (2 * (lhat[off] + 2 * lam.lambda2))))


def _fit(d, kind, lam, init, algorithm, fit_opts, swap_opts):
    if algorithm == "cd":
        return cd_fit(d, kind, lam, init, fit_opts)
    return cd_with_local_search(d, kind, lam, init, swap_opts, fit_opts)


def fit_path(d, kind, grid=GridSpec(), algorithm="cd", fit_opts=FitOptions(),
             swap_opts=SwapOptions()):
    """Warm-started fits along decreasing lambda0 for every lambda_q."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from "
                         f"{', '.join(ALGORITHMS)}")
    path = PathResult(kind)
    first_fit = True
    for lq in grid.q_values(d, kind):
        l1, l2 = grid.penalties(lq)
        top = lambda0_max(d, kind, l1, l2, fit_opts)
        lam = PenaltyParams(top, l1, l2)
        path.entries.append(PathEntry(lam, zero_solution(d, kind, lam), None))
        if top <= 0.0 or grid.n_lambda0 == 1:
            continue
        static = np.geomspace(top, grid.lambda0_ratio * top, grid.n_lambda0)
        floor = static[-1]
        prev = path.entries[-1]
        prev_idx = len(path.entries) - 1
        current = top
        while True:
            below = static[static < current * (1 - 1e-12)]
            if below.size == 0:
                break
            nxt = below[0]
            if grid.dynamic:
                entry_at = admissible_lambda0(d, kind, prev.solution.beta,
                                              prev.lam, fit_opts.gamma)
                nxt = min(nxt, (1 - DYNAMIC_UNDERSHOOT) * entry_at)
                if nxt <= 0.0 or nxt < floor * (1 - 1e-12):
                    break
            lam = PenaltyParams(nxt, l1, l2)
            opts = fit_opts
            if not first_fit:
                opts = fit_opts.replace(screening=False)
            sol = _fit(d, kind, lam, prev.solution, algorithm, opts,
                       swap_opts)
            first_fit = False
            same = np.array_equal(sol.support, prev.solution.support)
            entry = PathEntry(lam, sol, prev_idx, skipped=same)
            path.entries.append(entry)
            prev, prev_idx, current = entry, len(path.entries) - 1, nxt
            if (grid.max_support is not None
                    and sol.support_size >= grid.max_support):
                break
    return path


def fit_l1_path(d, kind, n_lambda1=100, ratio=1e-3, lambda2=0.0,
                fit_opts=FitOptions(), max_support=None):
    """Pure shrinkage path (lambda0 = 0) along decreasing lambda1."""
    top = float(np.max(np.abs(gradient(kind, d, np.zeros(d.p)))))
    path = PathResult(kind)
    lam = PenaltyParams(0.0, top, lambda2)
    path.entries.append(PathEntry(lam, zero_solution(d, kind, lam), None))
    if top <= 0:
        return path
    for l1 in np.geomspace(top, ratio * top, n_lambda1)[1:]:
        prev_idx = len(path.entries) - 1
        prev = path.entries[prev_idx]
        lam = PenaltyParams(0.0, float(l1), lambda2)
        sol = cd_fit(d, kind, lam, prev.solution, fit_opts)
        same = np.array_equal(sol.support, prev.solution.support)
        path.entries.append(PathEntry(lam, sol, prev_idx, skipped=same))
        if max_support is not None and sol.support_size >= max_support:
            break
    return path


def validation_loss(kind, d_val, beta):
    return float(np.mean(loss_value(kind, d_val.matvec(beta), d_val.y)))


def tune_on_validation(path, d_val, include_skipped=False):
    """Pick the entry with the lowest mean validation loss.

    Near-ties (within 1e-12) go to the smaller support, then the larger
    lambda0. Returns (entry, table) where table rows carry val_loss, auc
    and support size for every candidate.
    """
    entries = path.entries if include_skipped else path.distinct()
    if not entries:
        raise ValueError("path is empty")
    rows = []
    for idx, e in enumerate(entries):
        beta = e.solution.beta
        if beta.shape[0] != d_val.p:
            raise ValueError("validation data has a different feature count")
        scores = d_val.matvec(beta)
        try:
            a = auc(scores, d_val.y)
        except ValueError:
            a = None
        rows.append({"index": idx, "lambda0": e.lam.lambda0,
                     "lambda1": e.lam.lambda1, "lambda2": e.lam.lambda2,
                     "support_size": e.solution.support_size,
                     "val_loss": validation_loss(path.kind, d_val, beta),
                     "auc": a})
    best_loss = min(r["val_loss"] for r in rows)
    near = [r for r in rows
            if r["val_loss"] <= best_loss + TIE_TOL * max(1.0, best_loss)]
    pick = min(near, key=lambda r: (r["support_size"], -r["lambda0"],
                                    r["index"]))
    return entries[pick["index"]], rows


def path_records(path, table=None):
    """JSON-ready list of path entries (validation columns when given)."""
    extra = {}
    if table is not None:
        extra = {id(path.distinct()[r["index"]]): r for r in table}
    out = []
    for idx, e in enumerate(path.entries):
        sol = e.solution
        rec = {"lambda0": e.lam.lambda0, "lambda1": e.lam.lambda1,
               "lambda2": e.lam.lambda2,
               "support": [int(i) for i in sol.support],
               "coefficients": [[i, v] for i, v in sol.coefficients()],
               "objective": sol.objective_P, "converged": sol.converged,
               "parent": e.parent, "skipped": e.skipped}
        row = extra.get(id(e))
        if row is not None:
            rec["val_loss"] = row["val_loss"]
            rec["auc"] = row["auc"]
        out.append(rec)
    return out


def support_monotonicity(path):
    """Share of consecutive steps (same lambda_q) whose support size does
    not shrink. A diagnostic only; theory does not guarantee it."""
    ups = total = 0
    for e in path.entries:
        if e.parent is None:
            continue
        parent = path.entries[e.parent]
        total += 1
        ups += e.solution.support_size >= parent.solution.support_size
    return ups / total if total else 1.0

