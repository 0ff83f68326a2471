"""Compiled inner loops.

Every kernel takes the design matrix in both layouts (a Fortran-ordered
dense array and CSC arrays) plus a ``sparse`` flag; only one of them is
populated for a given dataset. Loss kinds are passed as integer codes:
0 logistic, 1 squared hinge, 2 smoothed hinge (with ``mu``).
"""

import math

from numba import njit

LOGISTIC = 0
SQUARED_HINGE = 1
SMOOTHED_HINGE = 2


@njit(cache=True)
def loss_scalar(kind, mu, vhat, v):
    m = vhat * v
    if kind == LOGISTIC:
        if m > 0:
            return math.log1p(math.exp(-m))
        return -m + math.log1p(math.exp(m))
    elif kind == SQUARED_HINGE:
        r = 1.0 - m
        if r > 0:
            return r * r
        return 0.0
    else:
        if m >= 1.0:
            return 0.0
        if m <= 1.0 - mu:
            return 1.0 - m - 0.5 * mu
        r = 1.0 - m
        return r * r / (2.0 * mu)


@njit(cache=True)
def dloss_scalar(kind, mu, vhat, v):
    m = vhat * v
    if kind == LOGISTIC:
        if m >= 0:
            e = math.exp(-m)
            return -v * e / (1.0 + e)
        return -v / (1.0 + math.exp(m))
    elif kind == SQUARED_HINGE:
        r = 1.0 - m
        if r > 0:
            return -2.0 * v * r
        return 0.0
    else:
        if m >= 1.0:
            return 0.0
        if m <= 1.0 - mu:
            return -v
        return -v * (1.0 - m) / mu


@njit(cache=True)
def mean_loss(kind, mu, u, y):
    s = 0.0
    for k in range(u.shape[0]):
        s += loss_scalar(kind, mu, u[k], y[k])
    return s / u.shape[0]


@njit(cache=True)
def fill_dloss(kind, mu, u, y, out):
    for k in range(u.shape[0]):
        out[k] = dloss_scalar(kind, mu, u[k], y[k])


@njit(cache=True)
def threshold(c, lam0, lam1, lam2, lhat):
    a = (lhat / (lhat + 2.0 * lam2)) * (abs(c) - lam1 / lhat)
    if a <= 0.0:
        return 0.0
    if a >= math.sqrt(2.0 * lam0 / (lhat + 2.0 * lam2)):
        return a if c > 0 else -a
    return 0.0


@njit(cache=True)
def col_dot(X, indptr, indices, data, sparse, j, vec):
    s = 0.0
    if sparse:
        for idx in range(indptr[j], indptr[j + 1]):
            s += data[idx] * vec[indices[idx]]
    else:
        for k in range(X.shape[0]):
            s += X[k, j] * vec[k]
    return s


@njit(cache=True)
def _move(X, indptr, indices, data, sparse, j, delta, kind, mu, y, u, dvec):
    if sparse:
        for idx in range(indptr[j], indptr[j + 1]):
            k = indices[idx]
            u[k] += delta * data[idx]
            dvec[k] = dloss_scalar(kind, mu, u[k], y[k])
    else:
        for k in range(X.shape[0]):
            x = X[k, j]
            if x != 0.0:
                u[k] += delta * x
                dvec[k] = dloss_scalar(kind, mu, u[k], y[k])


@njit(cache=True)
def _penalty(beta, lam0, lam1, lam2):
    s = 0.0
    for j in range(beta.shape[0]):
        b = beta[j]
        if b != 0.0:
            s += lam0 + lam1[j] * abs(b) + lam2 * b * b
    return s


@njit(cache=True)
def cd_sweep(X, indptr, indices, data, sparse, y, kind, mu, coords, beta, u,
             dvec, lhat, lam0, lam1, lam2, box, trace):
    """One pass of threshold updates over ``coords``.

    ``lam1`` is per-coordinate; ``box`` clips every coordinate to
    [-box, box] (``inf`` disables it). When ``trace`` has rows, row t
    receives (objective after update t, coefficient change of update t).

    Returns (number of support flips, largest absolute coefficient move).
    """
    n = y.shape[0]
    flips = 0
    max_move = 0.0
    record = trace.shape[0] > 0
    for t in range(coords.shape[0]):
        i = coords[t]
        grad = col_dot(X, indptr, indices, data, sparse, i, dvec) / n
        old = beta[i]
        new = threshold(old - grad / lhat[i], lam0, lam1[i], lam2, lhat[i])
        if new > box:
            new = box
        elif new < -box:
            new = -box
        delta = new - old
        if delta != 0.0:
            beta[i] = new
            _move(X, indptr, indices, data, sparse, i, delta, kind, mu, y,
                  u, dvec)
            if (old == 0.0) != (new == 0.0):
                flips += 1
            if abs(delta) > max_move:
                max_move = abs(delta)
        if record:
            trace[t, 0] = mean_loss(kind, mu, u, y) + _penalty(beta, lam0,
                                                               lam1, lam2)
            trace[t, 1] = delta
    return flips, max_move


@njit(cache=True)
def full_gradient(X, indptr, indices, data, sparse, dvec, out):
    n = dvec.shape[0]
    for j in range(out.shape[0]):
        out[j] = col_dot(X, indptr, indices, data, sparse, j, dvec) / n


@njit(cache=True)
def single_coordinate_fit(X, indptr, indices, data, sparse, y, kind, mu, u,
                          loss_sum, j, lj, lam1, lam2, max_iter, tol):
    """Minimise G along coordinate j starting from zero.

    ``u`` holds the scores of the base point (coordinate j is zero there)
    and ``loss_sum`` the sum of losses at ``u``. The 1-D problem is solved
    by repeated thresholding with step 1/``lj`` and no l0 term.

    Returns (coefficient, mean loss at the new point).
    """
    n = y.shape[0]
    b = 0.0
    for _ in range(max_iter):
        grad = 0.0
        if sparse:
            for idx in range(indptr[j], indptr[j + 1]):
                k = indices[idx]
                x = data[idx]
                grad += dloss_scalar(kind, mu, u[k] + b * x, y[k]) * x
        else:
            for k in range(n):
                x = X[k, j]
                if x != 0.0:
                    grad += dloss_scalar(kind, mu, u[k] + b * x, y[k]) * x
        grad /= n
        nb = threshold(b - grad / lj, 0.0, lam1, lam2, lj)
        moved = abs(nb - b)
        b = nb
        if moved <= tol * max(1.0, abs(b)):
            break
    total = loss_sum
    if b != 0.0:
        if sparse:
            for idx in range(indptr[j], indptr[j + 1]):
                k = indices[idx]
                x = data[idx]
                total += (loss_scalar(kind, mu, u[k] + b * x, y[k])
                          - loss_scalar(kind, mu, u[k], y[k]))
        else:
            for k in range(n):
                x = X[k, j]
                if x != 0.0:
                    total += (loss_scalar(kind, mu, u[k] + b * x, y[k])
                              - loss_scalar(kind, mu, u[k], y[k]))
    return b, total / n


@njit(cache=True)
def loss_sum_without(X, indptr, indices, data, sparse, y, kind, mu, u, i,
                     bi, out_u):
    """Scores and loss sum after zeroing coordinate i (coefficient ``bi``)."""
    for k in range(u.shape[0]):
        out_u[k] = u[k]
    if bi != 0.0:
        if sparse:
            for idx in range(indptr[i], indptr[i + 1]):
                out_u[indices[idx]] -= bi * data[idx]
        else:
            for k in range(u.shape[0]):
                out_u[k] -= bi * X[k, i]
    s = 0.0
    for k in range(u.shape[0]):
        s += loss_scalar(kind, mu, out_u[k], y[k])
    return s
