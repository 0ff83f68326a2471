"""Cyclic coordinate descent for the l0-l1-l2 penalized problem."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .loss import coordinate_lipschitz, gradient, objective

LHAT_FLOOR = 1e-12
CYCLE_ORDERS = ("natural", "partially-greedy")
_NO_TRACE = np.zeros((0, 2))


@dataclass(frozen=True)
class FitOptions:
    """Coordinate descent settings.

    Convergence is declared after a full sweep over all coordinates that
    changes no support membership and moves the objective by less than
    ``rel_tol`` (relative). ``coef_tol`` > 0 additionally requires the
    largest coefficient move in that sweep to be at most ``coef_tol``;
    use it when the output must satisfy stationarity to a tight tolerance.
    """

    rel_tol: float = 1e-6
    max_full_cycles: int = 1000
    gamma: float = 1.05
    active_set: bool = True
    cycle_order: str = "natural"
    screening: bool = False
    coef_tol: float = 0.0
    max_restricted_cycles: int = 100_000
    debug: bool = False

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.gamma > 1:
            raise ValueError("gamma must exceed 1")
        if self.max_full_cycles < 1:
            raise ValueError("max_full_cycles must be at least 1")
        if self.cycle_order not in CYCLE_ORDERS:
            raise ValueError(f"unknown cycle order {self.cycle_order!r}")
        if self.coef_tol < 0:
            raise ValueError("coef_tol must be non-negative")

    def replace(self, **kw):
        vals = dict(self.__dict__)
        vals.update(kw)
        return FitOptions(**vals)


TIGHT = FitOptions(rel_tol=1e-13, coef_tol=1e-11, max_full_cycles=5000)


@dataclass(frozen=True, eq=False)
class Solution:
    """Coefficients plus the objective values they attain.

    ``beta`` is a read-only dense vector; ``support`` lists its nonzero
    positions in increasing order.
    """

    beta: np.ndarray
    objective_P: float
    objective_G: float
    objective_g: float
    converged: bool = True
    cycles: int = 0
    support_stable_cycle: int = 0
    info: dict = field(default_factory=dict, repr=False)

    @property
    def support(self):
        return np.flatnonzero(self.beta)

    @property
    def support_size(self):
        return int(np.count_nonzero(self.beta))

    @property
    def p(self):
        return self.beta.shape[0]

    def coefficients(self):
        """Sparse (index, value) pairs."""
        return [(int(i), float(self.beta[i])) for i in self.support]


def make_solution(d, kind, lam, beta, **kw):
    """Wrap ``beta`` with objective values recomputed from scratch."""
    beta = np.array(beta, dtype=float)
    beta[beta == 0] = 0.0
    beta.flags.writeable = False
    P, G, g = objective(kind, d, beta, lam)
    return Solution(beta, P, G, g, **kw)


def zero_solution(d, kind, lam, **kw):
    return make_solution(d, kind, lam, np.zeros(d.p), **kw)


def threshold(c, lam, lhat):
    """Minimiser of (lhat/2)(a - c)^2 + l0*[a != 0] + l1*|a| + l2*a^2."""
    if not lhat > 0:
        raise ValueError("lhat must be positive")
    return K.threshold(float(c), lam.lambda0, lam.lambda1, lam.lambda2,
                       float(lhat))


def lhat_vector(kind, d, gamma):
    return np.maximum(gamma * coordinate_lipschitz(kind, d), LHAT_FLOOR)


def lambda0_max(d, kind, lambda1, lambda2, opts=FitOptions()):
    """Smallest l0 weight at which zero is a coordinate-wise minimum."""
    g0 = np.abs(gradient(kind, d, np.zeros(d.p)))
    lhat = lhat_vector(kind, d, opts.gamma)
    excess = np.maximum(g0 - lambda1, 0.0)
    return float(np.max(excess ** 2 / (2.0 * (lhat + 2.0 * lambda2))))


def greedy_order(kind, d):
    """Coordinates sorted by |gradient at zero|, largest first."""
    g0 = np.abs(gradient(kind, d, np.zeros(d.p)))
    return np.argsort(-g0, kind="stable").astype(np.int64)


@dataclass
class DescentResult:
    beta: np.ndarray
    converged: bool
    cycles: int
    support_stable_cycle: int
    trace: list


def descend(d, kind, beta, lhat, lam0, lam1, lam2, opts, *, box=math.inf,
            coords=None, first_coords=None, trace=False):
    """Coordinate descent engine shared by the penalized and MIP solvers.

    ``lam1`` is a per-coordinate vector. ``coords`` (ordered) restricts the
    coordinates that may move; the rest stay at their value in ``beta``.
    ``first_coords`` replaces ``coords`` for the first two sweeps
    (screening). Modifies and returns a copy of ``beta``.
    """
    X, indptr, indices, data, sparse = d.kernel_args()
    y = d.y
    code, mu = kind.code, kind.mu
    beta = np.array(beta, dtype=float)
    u = d.matvec(beta)
    dvec = np.empty(d.n)
    K.fill_dloss(code, mu, u, y, dvec)
    if coords is None:
        coords = np.arange(d.p, dtype=np.int64)
    coords = np.asarray(coords, dtype=np.int64)
    steps = []

    def value():
        return K.mean_loss(code, mu, u, y) + K._penalty(beta, lam0, lam1,
                                                        lam2)

    def sweep(cs):
        buf = np.empty((cs.shape[0], 2)) if trace else _NO_TRACE
        out = K.cd_sweep(X, indptr, indices, data, sparse, y, code, mu, cs,
                         beta, u, dvec, lhat, lam0, lam1, lam2, box, buf)
        if trace:
            steps.append((cs.copy(), buf))
        return out

    def settled(before, after, flips, move):
        if flips:
            return False
        if opts.coef_tol > 0 and move > opts.coef_tol:
            return False
        return abs(before - after) <= opts.rel_tol * max(abs(before),
                                                         1e-300)

    cur = value()
    start_value = cur
    full = restricted = 0
    stable_at = 0
    converged = False
    while full < opts.max_full_cycles:
        screened = first_coords is not None and full < 2
        cs = np.asarray(first_coords, dtype=np.int64) if screened else coords
        before = cur
        flips, move = sweep(cs)
        full += 1
        cur = value()
        if flips:
            stable_at = full + restricted
        if opts.debug:
            _check_scores(d, beta, u)
        if not screened and settled(before, cur, flips, move):
            converged = True
            break
        if not opts.active_set or full < 2:
            continue
        while restricted < opts.max_restricted_cycles:
            act = coords[beta[coords] != 0.0]
            if act.shape[0] == 0:
                break
            before = cur
            flips, move = sweep(act)
            restricted += 1
            cur = value()
            if flips:
                stable_at = full + restricted
            if settled(before, cur, flips, move):
                break
    trace_out = None
    if trace:
        trace_out = {"P0": start_value, "steps": steps}
    return DescentResult(beta, converged, full + restricted, stable_at,
                         trace_out)


def _check_scores(d, beta, u):
    fresh = d.matvec(beta)
    err = np.max(np.abs(fresh - u)) if u.size else 0.0
    if err > 1e-8 * max(1.0, np.max(np.abs(fresh))):
        raise AssertionError(f"score cache drifted by {err:.3e}")


def cd_fit(d, kind, lam, init=None, opts=FitOptions(), trace=False):
    """Cyclic coordinate descent from ``init`` (a Solution, array or None).

    With ``trace=True`` the returned ``info['trace']`` holds the per-update
    record: arrays ``coord``, ``P`` (objective after the update) and
    ``delta`` (coefficient change), plus the starting objective ``P0``.
    """
    if init is None:
        beta0 = np.zeros(d.p)
    else:
        beta0 = np.asarray(getattr(init, "beta", init), dtype=float)
        if beta0.shape != (d.p,):
            raise ValueError(f"initial coefficients have length "
                             f"{beta0.shape[0]}, expected {d.p}")
    lhat = lhat_vector(kind, d, opts.gamma)
    order = None
    if opts.cycle_order == "partially-greedy":
        order = greedy_order(kind, d)
    first = None
    if opts.screening:
        ranked = greedy_order(kind, d) if order is None else order
        keep = ranked[:math.ceil(0.2 * d.p)]
        first = np.sort(keep) if order is None else keep
    res = descend(d, kind, beta0, lhat, lam.lambda0,
                  np.full(d.p, lam.lambda1), lam.lambda2, opts, coords=order,
                  first_coords=first, trace=trace)
    info = {}
    if trace:
        steps = res.trace["steps"]
        info["trace"] = {
            "P0": res.trace["P0"],
            "coord": np.concatenate([s[0] for s in steps]),
            "P": np.concatenate([s[1][:, 0] for s in steps]),
            "delta": np.concatenate([s[1][:, 1] for s in steps]),
        }
    return make_solution(d, kind, lam, res.beta, converged=res.converged,
                         cycles=res.cycles,
                         support_stable_cycle=res.support_stable_cycle,
                         info=info)


@dataclass(frozen=True)
class StationarityReport:
    """Worst violations of the three coordinate-wise optimality conditions.

    ``restricted_residual``: largest |d/db_i G| over the support.
    ``magnitude_deficit``: largest amount by which a support coefficient
    falls short of the l0 threshold gap.
    ``outside_excess``: largest amount by which an off-support gradient
    exceeds its admissibility bound.
    """

    restricted_residual: float
    magnitude_deficit: float
    outside_excess: float
    tol: float

    @property
    def passed(self):
        return (self.restricted_residual <= self.tol
                and self.magnitude_deficit <= self.tol
                and self.outside_excess <= self.tol)

    def to_dict(self):
        return {"restricted_residual": self.restricted_residual,
                "magnitude_deficit": self.magnitude_deficit,
                "outside_excess": self.outside_excess, "tol": self.tol,
                "passed": self.passed}


def check_stationarity(sol, d, kind, lam, opts=FitOptions(), tol=1e-6):
    beta = np.asarray(getattr(sol, "beta", sol), dtype=float)
    grad = gradient(kind, d, beta)
    lhat = lhat_vector(kind, d, opts.gamma)
    l0, l1, l2 = lam.lambda0, lam.lambda1, lam.lambda2
    on = beta != 0
    r1 = np.abs(grad[on] + l1 * np.sign(beta[on]) + 2 * l2 * beta[on])
    r2 = np.sqrt(2 * l0 / (lhat[on] + 2 * l2)) - np.abs(beta[on])
    off = ~on
    r3 = np.abs(grad[off]) - l1 - np.sqrt(2 * l0 * (lhat[off] + 2 * l2))

    def worst(r):
        return float(r.max()) if r.size else -math.inf

    return StationarityReport(worst(r1), worst(r2), worst(r3), tol)

