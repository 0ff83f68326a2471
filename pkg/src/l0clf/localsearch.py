"""Coordinate descent combined with single-coordinate swap search."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .cd import FitOptions, cd_fit, make_solution
from .loss import coordinate_lipschitz

SEARCH_MODES = ("heuristic", "exhaustive")


@dataclass(frozen=True)
class SwapOptions:
    """Swap search settings.

    ``q`` is the number of outside coordinates tried per deletion in
    heuristic mode (None means ceil(0.05 p)); exhaustive mode tries all.
    """

    q: int | None = None
    inner_prox_iters: int = 100
    inner_tol: float = 1e-8
    mode: str = "heuristic"
    best_of_round: bool = False
    max_rounds: int = 1000

    def __post_init__(self):
        if self.mode not in SEARCH_MODES:
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be at least 1")
        if self.inner_prox_iters < 1 or self.inner_tol <= 0:
            raise ValueError("inner solver caps must be positive")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")

    def size_for(self, p, support_size):
        room = p - support_size
        if self.mode == "exhaustive":
            return room
        q = math.ceil(0.05 * p) if self.q is None else self.q
        return max(0, min(q, room))


def restricted_candidates(grad, outside, q):
    """The q entries of ``outside`` with largest |grad|, ties to lower index.

    Returned in that preference order.
    """
    outside = np.asarray(outside, dtype=np.int64)
    key = np.lexsort((outside, -np.abs(grad[outside])))
    return outside[key][:q]


def _improves(new, cur):
    return new < cur - 1e-12 * max(1.0, abs(cur))


def swap_step(sol, d, kind, lam, opts=SwapOptions()):
    """Try to improve ``sol`` by deleting one support coordinate and
    optionally adding one outside coordinate at its 1-D optimum.

    Returns a Solution with strictly smaller objective, or None when no
    candidate improves. In exhaustive mode None certifies that no single
    deletion and no (in, out) swap helps, up to the inner solver tolerance.
    """
    beta = np.array(getattr(sol, "beta", sol), dtype=float)
    X, indptr, indices, data, sparse = d.kernel_args()
    y, n = d.y, d.n
    code, mu = kind.code, kind.mu
    l0, l1, l2 = lam.lambda0, lam.lambda1, lam.lambda2
    lipschitz = np.maximum(coordinate_lipschitz(kind, d), 1e-12)
    lam1_vec = np.full(d.p, l1)
    u = d.matvec(beta)
    penalty = K._penalty(beta, l0, lam1_vec, l2)
    current = K.mean_loss(code, mu, u, y) + penalty

    support = np.flatnonzero(beta)
    outside_mask = np.ones(d.p, dtype=bool)
    outside_mask[support] = False
    outside = np.flatnonzero(outside_mask).astype(np.int64)
    q = opts.size_for(d.p, support.shape[0])
    order = support[np.lexsort((support, np.abs(beta[support])))]

    u_del = np.empty(n)
    dvec = np.empty(n)
    grad = np.empty(d.p)
    best = None
    for i in order:
        bi = beta[i]
        loss_sum = K.loss_sum_without(X, indptr, indices, data, sparse, y,
                                      code, mu, u, i, bi, u_del)
        base_pen = penalty - (l0 + l1 * abs(bi) + l2 * bi * bi)
        value = loss_sum / n + base_pen
        if _improves(value, current):
            if not opts.best_of_round:
                return _accept(d, kind, lam, beta, i, None, 0.0, value)
            if best is None or _improves(value, best[3]):
                best = (i, None, 0.0, value)
        if q == 0:
            continue
        K.fill_dloss(code, mu, u_del, y, dvec)
        K.full_gradient(X, indptr, indices, data, sparse, dvec, grad)
        for j in restricted_candidates(grad, outside, q):
            b, g_new = K.single_coordinate_fit(
                X, indptr, indices, data, sparse, y, code, mu, u_del,
                loss_sum, j, lipschitz[j], l1, l2, opts.inner_prox_iters,
                opts.inner_tol)
            if b == 0.0:
                continue
            value = g_new + base_pen + l0 + l1 * abs(b) + l2 * b * b
            if _improves(value, current):
                if not opts.best_of_round:
                    return _accept(d, kind, lam, beta, i, j, b, value)
                if best is None or _improves(value, best[3]):
                    best = (i, j, b, value)
    if best is None:
        return None
    return _accept(d, kind, lam, beta, *best)


def _accept(d, kind, lam, beta, i, j, b, value):
    new = beta.copy()
    new[i] = 0.0
    move = {"removed": int(i), "added": None, "predicted_P": value}
    if j is not None:
        new[j] = b
        move["added"] = int(j)
    return make_solution(d, kind, lam, new, info={"swap": move})


def cd_with_local_search(d, kind, lam, init=None, opts=SwapOptions(),
                         fit_opts=FitOptions()):
    """Alternate coordinate descent and swap search until no swap helps.

    ``info`` records the number of accepted swaps (``rounds``) and whether
    the round cap stopped the search (``round_cap_hit``).
    """
    sol = cd_fit(d, kind, lam, init, fit_opts)
    seen = {tuple(sol.support)}
    rounds = 0
    capped = False
    while True:
        if rounds >= opts.max_rounds:
            capped = True
            break
        cand = swap_step(sol, d, kind, lam, opts)
        if cand is None:
            break
        new = cd_fit(d, kind, lam, cand, fit_opts)
        if not new.objective_P < sol.objective_P:
            raise RuntimeError("swap round failed to decrease the objective")
        key = tuple(new.support)
        if key in seen:
            raise RuntimeError(f"support {key} revisited during swap search")
        seen.add(key)
        sol = new
        rounds += 1
    info = dict(sol.info)
    info.update(rounds=rounds, round_cap_hit=capped)
    return make_solution(d, kind, lam, sol.beta,
                         converged=sol.converged and not capped,
                         cycles=sol.cycles,
                         support_stable_cycle=sol.support_stable_cycle,
                         info=info)
