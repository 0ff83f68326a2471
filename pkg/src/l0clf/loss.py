"""Loss functions, objective evaluation and Lipschitz constants."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import _kernels as K

_CODES = {"logistic": K.LOGISTIC, "squared_hinge": K.SQUARED_HINGE,
          "smoothed_hinge": K.SMOOTHED_HINGE}
_ALIASES = {"logistic": "logistic", "squared_hinge": "squared_hinge",
            "squared-hinge": "squared_hinge", "sqhinge": "squared_hinge",
            "smoothed_hinge": "smoothed_hinge",
            "smoothed-hinge": "smoothed_hinge", "hinge": "smoothed_hinge"}


@dataclass(frozen=True)
class LossKind:
    """Logistic, squared hinge, or hinge with quadratic smoothing ``mu``."""

    name: str
    mu: float = 0.2

    def __post_init__(self):
        if self.name not in _CODES:
            raise ValueError(f"unknown loss {self.name!r}; supported: "
                             f"{', '.join(sorted(_CODES))}")
        if self.mu <= 0:
            raise ValueError("smoothing parameter mu must be positive")

    @property
    def code(self):
        return _CODES[self.name]

    @property
    def lipschitz_factor(self):
        """c with L_i = c * ||X_i||^2 / n."""
        if self.name == "logistic":
            return 0.25
        if self.name == "squared_hinge":
            return 2.0
        return 1.0 / self.mu

    @classmethod
    def parse(cls, text, mu=0.2):
        try:
            return cls(_ALIASES[text.lower()], mu)
        except KeyError:
            raise ValueError(f"unknown loss {text!r}; supported: logistic, "
                             "squared_hinge, smoothed_hinge") from None

    def __str__(self):
        if self.name == "smoothed_hinge":
            return f"smoothed_hinge(mu={self.mu:g})"
        return self.name


LOGISTIC = LossKind("logistic")
SQUARED_HINGE = LossKind("squared_hinge")


def smoothed_hinge(mu=0.2):
    return LossKind("smoothed_hinge", mu)


@dataclass(frozen=True)
class PenaltyParams:
    lambda0: float = 0.0
    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self):
        for name in ("lambda0", "lambda1", "lambda2"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a finite non-negative "
                                 f"number, got {v!r}")

    def replace(self, **kw):
        vals = {"lambda0": self.lambda0, "lambda1": self.lambda1,
                "lambda2": self.lambda2}
        vals.update(kw)
        return PenaltyParams(**vals)


def loss_value(kind, vhat, v):
    vhat = np.asarray(vhat, dtype=float)
    m = vhat * v
    if kind.name == "logistic":
        out = np.logaddexp(0.0, -m)
    elif kind.name == "squared_hinge":
        out = np.maximum(0.0, 1.0 - m) ** 2
    else:
        mu = kind.mu
        out = np.where(m >= 1.0, 0.0,
                       np.where(m <= 1.0 - mu, 1.0 - m - mu / 2,
                                (1.0 - m) ** 2 / (2 * mu)))
    return out if out.ndim else float(out)


def loss_derivative(kind, vhat, v):
    """Derivative of the loss with respect to the score ``vhat``."""
    vhat = np.asarray(vhat, dtype=float)
    v = np.asarray(v, dtype=float)
    m = vhat * v
    if kind.name == "logistic":
        out = -v * expit(-m)
    elif kind.name == "squared_hinge":
        out = -2.0 * v * np.maximum(0.0, 1.0 - m)
    else:
        mu = kind.mu
        out = np.where(m >= 1.0, 0.0,
                       np.where(m <= 1.0 - mu, -v, -v * (1.0 - m) / mu))
    return out if out.ndim else float(out)


def coordinate_lipschitz(kind, d):
    return kind.lipschitz_factor * d.col_sq_norms / d.n


def largest_sq_singular_value(d, tol=1e-6, max_iter=10000):
    """sigma_max(X)^2 by power iteration on X^T X (cached per dataset)."""
    key = ("sigma2", tol)
    if key in d._cache:
        return d._cache[key]
    v = np.random.default_rng(0).standard_normal(d.p)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = d.rmatvec(d.matvec(v))
        new = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            d._cache[key] = 0.0
            return 0.0
        v = w / nw
        if abs(new - est) <= tol * new:
            d._cache[key] = new
            return new
        est = new
    raise RuntimeError(f"power iteration did not reach relative tolerance "
                       f"{tol} in {max_iter} iterations")


def global_lipschitz(kind, d, tol=1e-6, max_iter=10000):
    """Upper estimate of the gradient Lipschitz constant (1% safety margin)."""
    s2 = largest_sq_singular_value(d, tol, max_iter)
    return 1.01 * kind.lipschitz_factor * s2 / d.n


def gradient(kind, d, beta):
    u = d.matvec(beta)
    return d.rmatvec(loss_derivative(kind, u, d.y)) / d.n


def objective(kind, d, beta, lam):
    """(P, G, g) evaluated from scratch."""
    beta = np.asarray(beta, dtype=float)
    g = float(np.mean(loss_value(kind, d.matvec(beta), d.y)))
    G = g + lam.lambda1 * np.abs(beta).sum() + lam.lambda2 * beta @ beta
    P = G + lam.lambda0 * np.count_nonzero(beta)
    return float(P), float(G), g
