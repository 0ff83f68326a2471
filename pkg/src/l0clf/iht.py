"""Iterative hard thresholding for the cardinality-constrained problem."""

import math
from dataclasses import dataclass

import numpy as np

from .cd import FitOptions, Solution, descend, lhat_vector, make_solution
from .loss import PenaltyParams, global_lipschitz, gradient, objective


@dataclass(frozen=True)
class ConstrainedSpec:
    """Minimise g + l1*|b|_1 + l2*|b|^2 subject to at most ``k`` nonzeros.

    The step is 1/(gamma * L) with L the global gradient Lipschitz
    constant. ``k`` = 0 admits only the zero vector; ``k`` >= p removes
    the cardinality constraint.
    """

    k: int
    lambda1: float = 0.0
    lambda2: float = 0.0
    gamma: float = 1.05

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be non-negative")
        if not self.gamma > 1:
            raise ValueError("gamma must exceed 1")

    @property
    def penalty(self):
        return PenaltyParams(0.0, self.lambda1, self.lambda2)


@dataclass(frozen=True)
class IhtOptions:
    rel_tol: float = 1e-10
    max_iter: int = 100_000


def step_size(spec, d, kind):
    lhat = spec.gamma * global_lipschitz(kind, d)
    return 1.0 / max(lhat, 1e-12)


def _shrink(c, tau, l1, l2):
    return np.sign(c) * np.maximum(np.abs(c) - tau * l1, 0.0) / (
        1.0 + 2.0 * tau * l2)


def top_k(c, k):
    """Indices of the k largest |c|, ties to the lower index."""
    if k >= c.shape[0]:
        return np.arange(c.shape[0])
    order = np.lexsort((np.arange(c.shape[0]), -np.abs(c)))
    return np.sort(order[:k])


def iht_step(beta, spec, d, kind, tau=None):
    """One proximal-gradient step onto the k-sparse set."""
    beta = np.asarray(beta, dtype=float)
    if tau is None:
        tau = step_size(spec, d, kind)
    c = beta - tau * gradient(kind, d, beta)
    out = np.zeros_like(c)
    keep = top_k(c, spec.k)
    out[keep] = _shrink(c[keep], tau, spec.lambda1, spec.lambda2)
    return out


def iht_fit(d, kind, spec, init=None, opts=IhtOptions()):
    """Run IHT updates until the constrained objective settles.

    When the first update leaves ``init`` (a Solution) unchanged to 1e-10
    the same object is returned.
    """
    lam = spec.penalty
    if spec.k == 0:
        return make_solution(d, kind, lam, np.zeros(d.p),
                             info={"k": 0, "iterations": 0})
    if init is None:
        beta = np.zeros(d.p)
    else:
        beta = np.array(getattr(init, "beta", init), dtype=float)
        if np.count_nonzero(beta) > spec.k:
            beta = np.zeros(d.p)
    tau = step_size(spec, d, kind)
    cur = objective(kind, d, beta, lam)[1]
    converged = False
    it = 0
    while it < opts.max_iter:
        new = iht_step(beta, spec, d, kind, tau)
        it += 1
        same_support = np.array_equal(new != 0, beta != 0)
        if it == 1 and same_support and isinstance(init, Solution):
            scale = max(1.0, float(np.max(np.abs(beta))))
            if np.max(np.abs(new - beta)) <= 1e-10 * scale:
                return init
        val = objective(kind, d, new, lam)[1]
        beta = new
        if same_support and abs(cur - val) <= opts.rel_tol * max(abs(cur),
                                                                1e-300):
            cur = val
            converged = True
            break
        cur = val
    size = int(np.count_nonzero(beta))
    return make_solution(d, kind, lam, beta, converged=converged, cycles=it,
                         info={"k": spec.k, "iterations": it,
                               "degenerate": size < min(spec.k, d.p)})


@dataclass(frozen=True)
class FixedPointReport:
    """Residuals of the IHT fixed-point conditions.

    ``restricted_residual``: largest |d/db_i G| over the support.
    ``outside_excess``: largest |grad_i g| - delta_(k) off the support.
    """

    restricted_residual: float
    outside_excess: float
    delta_k: float
    tol: float
    feasible: bool

    @property
    def passed(self):
        return (self.feasible and self.restricted_residual <= self.tol
                and self.outside_excess <= self.tol)


def iht_fixed_point(sol, spec, d, kind, tol=1e-6):
    beta = np.asarray(getattr(sol, "beta", sol), dtype=float)
    grad = gradient(kind, d, beta)
    lhat = spec.gamma * global_lipschitz(kind, d)
    on = beta != 0
    r1 = np.abs(grad[on] + spec.lambda1 * np.sign(beta[on])
                + 2 * spec.lambda2 * beta[on])
    delta = np.abs(lhat * beta - grad)
    if spec.k == 0:
        delta_k = math.inf
    else:
        delta_k = float(np.sort(delta)[::-1][min(spec.k, d.p) - 1])
    off = np.abs(grad[~on])
    r2 = off - delta_k
    return FixedPointReport(
        float(r1.max()) if r1.size else -math.inf,
        float(r2.max()) if r2.size else -math.inf,
        delta_k, tol, int(on.sum()) <= spec.k)


def constrained_path(d, kind, lambda1, lambda2, wanted_k, solutions,
                     opts=IhtOptions(), gamma=1.05):
    """Solutions with support size at most k for every k in ``wanted_k``.

    ``solutions`` are penalized-path fits at (lambda1, lambda2). A fit whose
    support size equals k is returned as is; otherwise IHT starts from the
    largest fit with a smaller support (or from zero). Outputs whose
    support ends up below k carry ``info['degenerate'] = True``.
    """
    pool = sorted(solutions, key=lambda s: s.support_size)
    out = []
    for k in wanted_k:
        exact = [s for s in pool if s.support_size == k]
        if exact:
            out.append(exact[0])
            continue
        smaller = [s for s in pool if s.support_size < k]
        init = smaller[-1] if smaller else None
        spec = ConstrainedSpec(k, lambda1, lambda2, gamma)
        out.append(iht_fit(d, kind, spec, init, opts))
    return out


def penalized_iht_fit(d, kind, lam, init=None, gamma=1.05,
                      opts=IhtOptions()):
    """Proximal-gradient iterations on the penalized objective.

    Each step thresholds every coordinate of b - grad/Lhat with the global
    constant Lhat = gamma * L.
    """
    beta = np.zeros(d.p) if init is None else np.array(
        getattr(init, "beta", init), dtype=float)
    lhat = max(gamma * global_lipschitz(kind, d), 1e-12)
    l0, l1, l2 = lam.lambda0, lam.lambda1, lam.lambda2
    cut = math.sqrt(2 * l0 / (lhat + 2 * l2))
    cur = objective(kind, d, beta, lam)[0]
    converged = False
    it = 0
    while it < opts.max_iter:
        c = beta - gradient(kind, d, beta) / lhat
        a = (lhat / (lhat + 2 * l2)) * (np.abs(c) - l1 / lhat)
        new = np.where((a > 0) & (a >= cut), np.sign(c) * a, 0.0)
        it += 1
        val = objective(kind, d, new, lam)[0]
        same_support = np.array_equal(new != 0, beta != 0)
        beta = new
        if same_support and abs(cur - val) <= opts.rel_tol * max(abs(cur),
                                                                1e-300):
            converged = True
            break
        cur = val
    return make_solution(d, kind, lam, beta, converged=converged, cycles=it,
                         info={"iterations": it})


def polish_on_support(d, kind, lam, sol, opts=FitOptions()):
    """Refit the coefficients on the fixed support of ``sol``.

    The l0 term is constant on a fixed support, so the descent runs without
    it and no coordinate is dropped for being small; the l1 and l2 terms stay.
    The returned objective is evaluated at the full ``lam``.
    """
    beta = np.asarray(getattr(sol, "beta", sol), dtype=float)
    coords = np.flatnonzero(beta).astype(np.int64)
    res = descend(d, kind, beta, lhat_vector(kind, d, opts.gamma),
                  0.0, np.full(d.p, lam.lambda1), lam.lambda2, opts,
                  coords=coords)
    return make_solution(d, kind, lam, res.beta, converged=res.converged,
                         cycles=res.cycles)
