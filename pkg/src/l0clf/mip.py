"""Certified global optimisation by branch and bound over big-M indicators.

The mixed-integer model couples each coefficient to an indicator with
|b_i| <= M z_i and charges l0 * z_i. Indicators outside the integrality set
``I`` are continuous in [0, 1]; minimising them out turns their l0 charge
into an extra l1 weight l0/M, so every node relaxation is a box-constrained
l1-l2 problem solved by proximal coordinate descent.

Node lower bounds come from the linearisation of the smooth part at the
relaxation iterate, minimised in closed form over the box. That bound is
valid for any iterate, so inexact relaxation solves only loosen it.
"""

import heapq
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cd import FitOptions, descend, lhat_vector
from .loss import gradient, objective

INTEGRALITY_TOL = 1e-6
PRUNE_SLACK = 1e-9
EXACT_GAP = 1e-6
STATUSES = ("optimal", "gap-reached", "budget-exhausted")


def choose_big_m(warm):
    """1.2 times the largest warm-start magnitude (1.0 for a zero start)."""
    beta = np.asarray(getattr(warm, "beta", warm), dtype=float)
    top = float(np.max(np.abs(beta))) if beta.size else 0.0
    if top == 0.0:
        warnings.warn("zero warm start; falling back to big-M = 1.0",
                      RuntimeWarning, stacklevel=2)
        return 1.0
    return 1.2 * top


@dataclass(frozen=True, eq=False)
class MipProblem:
    d: object
    kind: object
    lam: object
    M: float
    I: tuple = ()

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("big-M must be positive")
        idx = tuple(sorted({int(i) for i in self.I}))
        if idx and (idx[0] < 0 or idx[-1] >= self.d.p):
            raise ValueError("integrality set has out-of-range indices")
        object.__setattr__(self, "I", idx)

    @property
    def in_I(self):
        mask = np.zeros(self.d.p, dtype=bool)
        mask[list(self.I)] = True
        return mask

    def partial_objective(self, beta):
        """Objective with indicators in I integral and the rest relaxed,
        indicators set to their smallest feasible values."""
        G = objective(self.kind, self.d, beta, self.lam)[1]
        nz = beta != 0
        mask = self.in_I
        l0 = self.lam.lambda0
        return (G + l0 * np.count_nonzero(nz & mask)
                + (l0 / self.M) * np.abs(beta[~mask]).sum())

    def full_objective(self, beta):
        return objective(self.kind, self.d, beta, self.lam)[0]


@dataclass(eq=False)
class MipNode:
    fixed: dict
    lower_bound: float
    beta: np.ndarray = None
    z: np.ndarray = None
    depth: int = 0
    settled: bool = False
    leaf: np.ndarray = None


RELAX_OPTS = FitOptions(rel_tol=1e-13, coef_tol=1e-10, max_full_cycles=20000)


class _Relaxer:
    def __init__(self, prob, tol=1e-8, opts=RELAX_OPTS):
        self.prob = prob
        d = prob.d
        self.lhat = lhat_vector(prob.kind, d, opts.gamma)
        self.opts = opts.replace(coef_tol=min(opts.coef_tol, tol * 1e-2))
        self.mask_I = prob.in_I

    def weights(self, fixed):
        """Per-coordinate l1 weights, movable coordinates, fixed-one count."""
        p = self.prob.d.p
        lam, M = self.prob.lam, self.prob.M
        w = np.full(p, lam.lambda1 + lam.lambda0 / M)
        movable = np.ones(p, dtype=bool)
        ones = 0
        for i, v in fixed.items():
            if v:
                w[i] = lam.lambda1
                ones += 1
            else:
                movable[i] = False
        return w, movable, ones

    def solve(self, fixed, warm=None):
        prob = self.prob
        d, lam, M = prob.d, prob.lam, prob.M
        w, movable, ones = self.weights(fixed)
        beta = np.zeros(d.p) if warm is None else np.array(warm, dtype=float)
        beta[~movable] = 0.0
        np.clip(beta, -M, M, out=beta)
        coords = np.flatnonzero(movable).astype(np.int64)
        res = descend(d, prob.kind, beta, self.lhat, 0.0, w, lam.lambda2,
                      self.opts, box=M, coords=coords)
        beta = res.beta
        bound = self.bound(beta, w, movable, ones)
        z = np.abs(beta) / M
        for i, v in fixed.items():
            z[i] = float(v)
        return beta, z, bound, res.converged

    def bound(self, beta, w, movable, ones):
        prob = self.prob
        kind, d, lam, M = prob.kind, prob.d, prob.lam, prob.M
        g = objective(kind, d, beta, lam.replace(lambda0=0.0, lambda1=0.0,
                                                 lambda2=0.0))[2]
        a = gradient(kind, d, beta) + 2 * lam.lambda2 * beta
        h = g + lam.lambda2 * float(beta @ beta)
        slack = np.maximum(np.abs(a[movable]) - w[movable], 0.0)
        lb = h - float(a @ beta) - M * float(slack.sum()) + lam.lambda0 * ones
        return max(lb, 0.0)


def solve_relaxation(prob, node, warm=None, tol=1e-8):
    """Solve the continuous relaxation at ``node``.

    Returns (beta, z, bound) where z_i = |beta_i|/M off the fixed set and
    ``bound`` is a valid lower bound for every completion of the node.
    """
    beta, z, bound, _ = _Relaxer(prob, tol).solve(node.fixed, warm)
    return beta, z, bound


def relaxation_objective(prob, fixed, beta):
    """Value of the node relaxation at ``beta`` (indicators minimised)."""
    lam, M = prob.lam, prob.M
    G = objective(prob.kind, prob.d, beta, lam)[1]
    ones = [i for i, v in fixed.items() if v]
    free = np.ones(prob.d.p, dtype=bool)
    free[list(fixed)] = False
    return (G + lam.lambda0 * len(ones)
            + (lam.lambda0 / M) * np.abs(beta[free]).sum())


@dataclass(frozen=True, eq=False)
class MipResult:
    """Outcome of a certified solve.

    ``beta``/``upper_bound`` describe the best point found for the full
    problem; ``lower_bound`` is a certified bound on its optimum.
    """

    beta: np.ndarray
    z: np.ndarray
    upper_bound: float
    lower_bound: float
    gap: float
    nodes_explored: int
    iga_iterations: int
    status: str
    big_m: float
    lb_history: tuple = ()
    warnings: tuple = ()
    info: dict = field(default_factory=dict, repr=False)

    @property
    def support(self):
        return np.flatnonzero(self.beta)

    def certificate(self):
        return {"objective": self.upper_bound,
                "lower_bound": self.lower_bound,
                "gap": self.gap,
                "support": [int(i) for i in self.support],
                "coefficients": [[int(i), float(self.beta[i])]
                                 for i in self.support],
                "big_m": self.big_m,
                "nodes": self.nodes_explored,
                "iga_iterations": self.iga_iterations,
                "status": self.status,
                "warnings": list(self.warnings)}


def relative_gap(ub, lb):
    if ub == lb:
        return 0.0
    if lb <= 0:
        return math.inf
    return (ub - lb) / lb


def _status(gap, gap_tol, finished):
    if gap <= min(gap_tol, EXACT_GAP):
        return "optimal"
    if gap <= gap_tol:
        return "gap-reached"
    return "optimal" if finished and gap <= EXACT_GAP else "budget-exhausted"


class _Incumbents:
    """Best points for the partial-integrality and the full problem."""

    def __init__(self, prob, relaxer):
        self.prob = prob
        self.relaxer = relaxer
        self.ub_full = math.inf
        self.beta_full = np.zeros(prob.d.p)
        self.ub_partial = math.inf
        self.beta_partial = np.zeros(prob.d.p)

    def offer_partial(self, beta):
        val = self.prob.partial_objective(beta)
        if val < self.ub_partial:
            self.ub_partial = val
            self.beta_partial = beta.copy()

    def offer_full(self, beta):
        prob = self.prob
        if np.max(np.abs(beta), initial=0.0) > prob.M * (1 + 1e-12):
            return
        val = prob.full_objective(beta)
        if val < self.ub_full:
            self.ub_full = val
            self.beta_full = beta.copy()
        self.offer_partial(beta)

    def polish(self, beta):
        """Penalized coordinate descent on the support of ``beta`` within
        the box; the result is feasible for the full problem."""
        prob = self.prob
        lam = prob.lam
        coords = np.flatnonzero(beta).astype(np.int64)
        start = np.clip(beta, -prob.M, prob.M)
        res = descend(prob.d, prob.kind, start, self.relaxer.lhat,
                      lam.lambda0, np.full(prob.d.p, lam.lambda1),
                      lam.lambda2, self.relaxer.opts, box=prob.M,
                      coords=coords)
        self.offer_full(res.beta)


def _integral(z, unfixed):
    zz = z[unfixed]
    return bool(np.all((zz == 0.0) | (zz >= 1.0 - INTEGRALITY_TOL)))


def _most_fractional(z, unfixed):
    zz = z[unfixed]
    frac = np.minimum(zz, 1.0 - zz)
    return int(unfixed[int(np.argmax(frac))])


def _run_bnb(prob, incumbent_betas, gap_tol, node_budget, deadline,
             warm_root=None, tol=1e-8, frontier=None):
    """Search the indicators in ``prob.I``.

    ``frontier`` is the node list returned by an earlier run on a smaller
    integrality set. Node relaxations do not depend on the integrality set,
    so those nodes keep their bounds and only need re-classifying.
    """
    relaxer = _Relaxer(prob, tol)
    inc = _Incumbents(prob, relaxer)
    for b in incumbent_betas:
        if b is not None:
            inc.polish(np.asarray(b, dtype=float))
    I = np.array(prob.I, dtype=np.int64)
    heap = []
    parked = []
    closed = []
    lb_history = []
    counter = [0, 0, 0]

    def unfixed_of(node):
        return np.array([i for i in I if int(i) not in node.fixed],
                        dtype=np.int64)

    def place(node):
        unfixed = unfixed_of(node)
        if unfixed.size == 0 or _integral(node.z, unfixed):
            if not node.settled:
                settle = dict(node.fixed)
                for i in unfixed:
                    settle[int(i)] = int(node.z[i] > 0.5)
                leaf_beta = node.beta
                if unfixed.size:
                    leaf_beta = relaxer.solve(settle, node.beta)[0]
                inc.offer_partial(leaf_beta)
                inc.polish(leaf_beta)
                node.settled = True
                node.leaf = leaf_beta
            else:
                # Settled in an earlier run whose incumbents are gone.
                inc.offer_partial(node.leaf)
            closed.append(node)
        elif node.lower_bound >= inc.ub_partial - PRUNE_SLACK:
            parked.append(node)
        else:
            heapq.heappush(heap, (node.lower_bound, counter[2], node))
            counter[2] += 1

    def evaluate(fixed, warm, parent_bound, depth):
        beta, z, bound, ok = relaxer.solve(fixed, warm)
        counter[0] += 1
        if not ok:
            counter[1] += 1
        node = MipNode(fixed, max(bound, parent_bound), beta, z, depth)
        inc.polish(beta)
        place(node)

    def global_lb():
        cands = [inc.ub_partial]
        if heap:
            cands.append(heap[0][0])
        if closed:
            cands.append(min(n.lower_bound for n in closed))
        return min(cands)

    if frontier:
        for node in frontier:
            place(node)
    else:
        evaluate({}, warm_root, 0.0, 0)
    finished = False
    while True:
        while heap and heap[0][0] >= inc.ub_partial - PRUNE_SLACK:
            parked.append(heapq.heappop(heap)[2])
        lb = global_lb()
        lb_history.append(lb)
        if not heap:
            finished = True
            break
        if relative_gap(inc.ub_partial, lb) <= gap_tol:
            break
        if counter[0] >= node_budget or (deadline
                                         and time.monotonic() > deadline):
            break
        bound, _, node = heapq.heappop(heap)
        j = _most_fractional(node.z, unfixed_of(node))
        for v in (0, 1):
            child = dict(node.fixed)
            child[j] = v
            evaluate(child, node.beta, bound, node.depth + 1)
    nodes_left = [entry[2] for entry in heap] + parked + closed
    return {"inc": inc, "lb": max(lb_history), "lb_history": lb_history,
            "nodes": counter[0], "finished": finished,
            "not_converged": counter[1], "frontier": nodes_left}


def _check_box(beta, M):
    if np.max(np.abs(beta), initial=0.0) >= M * (1 - INTEGRALITY_TOL):
        return ("a coefficient sits on the big-M bound; the certificate "
                "may depend on M")
    return None


def branch_and_bound(prob, incumbent=None, gap_tol=1e-6, node_budget=100_000,
                     time_budget=None, tol=1e-8):
    """Best-bound-first branch and bound over the indicators in ``prob.I``.

    With ``prob.I`` covering every feature this solves the full model.
    """
    deadline = time.monotonic() + time_budget if time_budget else None
    start = None if incumbent is None else getattr(incumbent, "beta",
                                                   incumbent)
    run = _run_bnb(prob, [start], gap_tol, node_budget, deadline,
                   warm_root=start, tol=tol)
    return _bnb_result(prob, run, gap_tol, iterations=0)


def _bnb_result(prob, run, gap_tol, iterations):
    inc = run["inc"]
    full_I = len(prob.I) == prob.d.p
    lb = min(run["lb"], inc.ub_full)
    gap = relative_gap(inc.ub_full, lb)
    msgs = []
    box = _check_box(inc.beta_full, prob.M)
    if box:
        msgs.append(box)
    if run["not_converged"]:
        msgs.append(f"{run['not_converged']} node relaxations hit the cycle "
                    "cap; their bounds are valid but loose")
    beta = inc.beta_full
    info = {"partial_upper_bound": inc.ub_partial,
            "partial_beta": inc.beta_partial,
            "finished": run["finished"]}
    if not full_I:
        info["partial_z"] = _partial_z(prob, inc.beta_partial)
    return MipResult(beta=beta, z=(beta != 0).astype(float),
                     upper_bound=inc.ub_full, lower_bound=lb, gap=gap,
                     nodes_explored=run["nodes"], iga_iterations=iterations,
                     status=_status(gap, gap_tol, run["finished"]),
                     big_m=prob.M, lb_history=tuple(run["lb_history"]),
                     warnings=tuple(msgs), info=info)


def _partial_z(prob, beta):
    z = np.abs(beta) / prob.M
    mask = prob.in_I
    z[mask] = (beta[mask] != 0).astype(float)
    return z


@dataclass(frozen=True)
class IgaOptions:
    gap_tol: float = 1e-6
    max_add_per_iter: int = 10
    frac_cutoff: float | None = None
    node_budget: int = 100_000
    max_iterations: int = 1000
    time_budget: float | None = None
    big_m: float | None = None
    check_big_m: bool = False

    def __post_init__(self):
        if self.gap_tol < 0:
            raise ValueError("gap_tol must be non-negative")
        if self.max_add_per_iter < 1:
            raise ValueError("max_add_per_iter must be at least 1")
        if self.frac_cutoff is not None and not 0 < self.frac_cutoff < 1:
            raise ValueError("frac_cutoff must lie in (0, 1)")


def _fractional_outside(prob, z):
    mask = ~prob.in_I
    frac = mask & (z > INTEGRALITY_TOL) & (z < 1 - INTEGRALITY_TOL)
    return np.flatnonzero(frac)


def iga_solve(d, kind, lam, warm, opts=IgaOptions()):
    """Integrality generation: grow the integrality set from the warm
    start's support until the partial model's solution is integral."""
    warm_beta = np.asarray(getattr(warm, "beta", warm), dtype=float)
    if opts.big_m is not None:
        M = opts.big_m
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            M = choose_big_m(warm_beta)
        for w in caught:
            warnings.warn(str(w.message), RuntimeWarning, stacklevel=2)
    deadline = (time.monotonic() + opts.time_budget if opts.time_budget
                else None)
    I = set(np.flatnonzero(warm_beta).tolist())
    lb = 0.0
    best_beta = None
    best_ub = math.inf
    nodes = 0
    history = []
    it = 0
    frontier = None
    finished = False
    msgs = []
    while it < opts.max_iterations:
        it += 1
        prob = MipProblem(d, kind, lam, M, tuple(sorted(I)))
        run = _run_bnb(prob, [warm_beta, best_beta], opts.gap_tol,
                       max(opts.node_budget - nodes, 1), deadline,
                       warm_root=warm_beta, frontier=frontier)
        nodes += run["nodes"]
        frontier = run["frontier"]
        inc = run["inc"]
        if inc.ub_full < best_ub:
            best_ub, best_beta = inc.ub_full, inc.beta_full.copy()
        lb = max(lb, min(run["lb"], best_ub))
        history.append(lb)
        z = _partial_z(prob, inc.beta_partial)
        frac = _fractional_outside(prob, z)
        solved = run["finished"] or relative_gap(inc.ub_partial,
                                                 run["lb"]) <= opts.gap_tol
        if relative_gap(best_ub, lb) <= opts.gap_tol:
            finished = solved
            break
        if not solved:
            break
        if frac.size == 0:
            # The partial model's optimum is feasible for the full model.
            cand = inc.beta_partial.copy()
            cand[np.abs(cand) <= INTEGRALITY_TOL * M] = 0.0
            val = objective(kind, d, cand, lam)[0]
            if val < best_ub:
                best_ub, best_beta = val, cand
            lb = max(lb, min(run["lb"], best_ub))
            history[-1] = lb
            finished = True
            break
        order = np.lexsort((frac, -z[frac]))
        add = frac[order][:opts.max_add_per_iter]
        if opts.frac_cutoff is not None:
            above = frac[order][z[frac[order]] >= opts.frac_cutoff]
            if above.size:
                add = above
        I.update(int(i) for i in add)
        if nodes >= opts.node_budget or (deadline
                                         and time.monotonic() > deadline):
            break
    gap = relative_gap(best_ub, lb)
    box = _check_box(best_beta, M)
    if box:
        msgs.append(box)
    if opts.check_big_m:
        msg = _big_m_probe(d, kind, lam, best_beta, best_ub, M, opts)
        if msg:
            msgs.append(msg)
    for m in msgs:
        warnings.warn(m, RuntimeWarning, stacklevel=2)
    return MipResult(beta=best_beta, z=(best_beta != 0).astype(float),
                     upper_bound=best_ub, lower_bound=lb, gap=gap,
                     nodes_explored=nodes, iga_iterations=it,
                     status=_status(gap, opts.gap_tol, finished),
                     big_m=M, lb_history=tuple(history), warnings=tuple(msgs),
                     info={"integrality_set": sorted(I)})


def _big_m_probe(d, kind, lam, beta, ub, M, opts):
    probe = IgaOptions(gap_tol=opts.gap_tol, node_budget=opts.node_budget,
                       big_m=2 * M)
    alt = iga_solve(d, kind, lam, beta, probe)
    if alt.upper_bound < ub - opts.gap_tol * max(abs(ub), 1.0):
        return (f"doubling big-M lowers the objective from {ub:.10g} to "
                f"{alt.upper_bound:.10g}; M={M:.6g} is binding")
    return None

