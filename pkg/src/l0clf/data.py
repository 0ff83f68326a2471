"""Datasets, file ingestion, standardization and synthetic generators."""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class DataError(ValueError):
    """Raised for malformed input files or invalid dataset contents."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable design matrix with +/-1 labels.

    ``X`` is either a Fortran-ordered dense array or a CSC sparse matrix;
    use :func:`make_dataset` rather than calling the constructor directly.
    """

    X: object
    y: np.ndarray
    col_sq_norms: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def is_sparse(self):
        return sp.issparse(self.X)

    def matvec(self, beta):
        return np.asarray(self.X @ beta, dtype=float).ravel()

    def rmatvec(self, v):
        return np.asarray(self.X.T @ v, dtype=float).ravel()

    def column(self, j):
        if self.is_sparse:
            return self.X[:, j].toarray().ravel()
        return self.X[:, j].copy()

    def dense(self):
        return self.X.toarray() if self.is_sparse else self.X.copy()

    def kernel_args(self):
        """(dense, indptr, indices, data, sparse) tuple for the kernels."""
        if "kernel_args" not in self._cache:
            empty_i = np.zeros(1, dtype=np.int64)
            if self.is_sparse:
                X = self.X
                args = (np.zeros((0, 0), order="F"),
                        X.indptr.astype(np.int64), X.indices.astype(np.int64),
                        X.data.astype(float), True)
            else:
                args = (self.X, empty_i, empty_i, np.zeros(0), False)
            self._cache["kernel_args"] = args
        return self._cache["kernel_args"]

    def with_labels(self, y):
        """Same design, new labels (fixed-design validation)."""
        return make_dataset(self.X, y)


def _freeze(a):
    a.flags.writeable = False
    return a


def make_dataset(X, y):
    """Validate and wrap ``X`` (dense or sparse) and labels ``y``."""
    y = np.asarray(y, dtype=float).ravel()
    if sp.issparse(X):
        X = sp.csc_matrix(X, dtype=float)
        X.sort_indices()
        X.eliminate_zeros()
        sq = np.asarray(X.multiply(X).sum(axis=0), dtype=float).ravel()
        _freeze(X.data)
        _freeze(X.indices)
        _freeze(X.indptr)
    else:
        X = np.asfortranarray(np.array(X, dtype=float, copy=True))
        if X.ndim != 2:
            raise DataError("design matrix must be two-dimensional")
        sq = np.einsum("ij,ij->j", X, X)
        _freeze(X)
    n, p = X.shape
    if n < 1 or p < 1:
        raise DataError(f"dataset needs n >= 1 and p >= 1, got n={n}, p={p}")
    if y.shape[0] != n:
        raise DataError(f"label vector has length {y.shape[0]}, expected {n}")
    bad = ~np.isin(y, (-1.0, 1.0))
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise DataError(f"label {y[k]!r} at row {k + 1} is not -1 or +1")
    return Dataset(X, _freeze(y.copy()), _freeze(sq))


def _map_label(token, where):
    try:
        v = float(token)
    except ValueError:
        raise DataError(f"{where}: cannot parse label {token!r}") from None
    if v in (1.0, -1.0):
        return v
    if v == 0.0:
        return -1.0
    raise DataError(f"{where}: label {token!r} is not one of -1, +1, 0, 1")


def load_csv(path, has_header=False, label_column=-1):
    """Read a comma-separated file; one column holds the labels."""
    rows = []
    labels = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if has_header and lineno == 1:
                continue
            if not row or all(not c.strip() for c in row):
                continue
            if width is None:
                width = len(row)
                if width < 2:
                    raise DataError(f"row {lineno}: need a label column and "
                                    "at least one feature")
                col = label_column % width
            elif len(row) != width:
                raise DataError(f"row {lineno} has {len(row)} fields, "
                                f"expected {width}")
            labels.append(_map_label(row[col], f"row {lineno}"))
            feats = []
            for c, tok in enumerate(row):
                if c == col:
                    continue
                try:
                    feats.append(float(tok))
                except ValueError:
                    raise DataError(f"row {lineno}, column {c + 1}: cannot "
                                    f"parse {tok!r}") from None
            rows.append(feats)
    if not rows:
        raise DataError(f"{path}: no rows")
    return make_dataset(np.array(rows), np.array(labels))


def write_csv(d, path, header=True):
    """Write features followed by the label column, 17 significant digits."""
    X = d.dense()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([f"x{j + 1}" for j in range(d.p)] + ["y"])
        for k in range(d.n):
            w.writerow([format(v, ".17g") for v in X[k]]
                       + [str(int(d.y[k]))])


def load_svmlight(path):
    """Read SVMLight/LIBSVM text (1-based, strictly increasing indices)."""
    labels = []
    rows, cols, vals = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            where = f"line {lineno}"
            labels.append(_map_label(tokens[0], where))
            r = len(labels) - 1
            last = 0
            for tok in tokens[1:]:
                idx, sep, val = tok.partition(":")
                try:
                    j = int(idx)
                    v = float(val)
                except ValueError:
                    raise DataError(f"{where}: unparseable token {tok!r}") \
                        from None
                if not sep or j < 1:
                    raise DataError(f"{where}: unparseable token {tok!r}")
                if j <= last:
                    raise DataError(f"{where}: indices not increasing "
                                    f"({j} after {last})")
                last = j
                rows.append(r)
                cols.append(j - 1)
                vals.append(v)
    if not labels:
        raise DataError(f"{path}: no rows")
    p = max(cols) + 1 if cols else 1
    X = sp.csc_matrix((vals, (rows, cols)), shape=(len(labels), p))
    return make_dataset(X, np.array(labels))


def write_svmlight(d, path):
    X = sp.csr_matrix(d.X)
    X.sort_indices()
    with open(path, "w") as fh:
        for k in range(d.n):
            lo, hi = X.indptr[k], X.indptr[k + 1]
            parts = [f"{int(d.y[k]):+d}"]
            parts += [f"{j + 1}:{v:.17g}"
                      for j, v in zip(X.indices[lo:hi], X.data[lo:hi])
                      if v != 0.0]
            fh.write(" ".join(parts) + "\n")


STANDARDIZE_MODES = ("none", "unit-l2", "center-and-unit-l2")


def standardize(d, mode="none"):
    """Return a new dataset with rescaled (and possibly centered) columns.

    Zero columns are left untouched in every mode.
    """
    if mode not in STANDARDIZE_MODES:
        raise ValueError(f"unknown standardization {mode!r}")
    if mode == "none":
        return make_dataset(d.X.copy(), d.y)
    if mode == "center-and-unit-l2":
        if d.is_sparse:
            raise DataError("centering requires dense storage")
        X = d.dense()
        X = X - X.mean(axis=0)
        norms = np.sqrt(np.einsum("ij,ij->j", X, X))
        orig_zero = d.col_sq_norms == 0
        X[:, orig_zero] = 0.0
        norms[norms == 0] = 1.0
        return make_dataset(X / norms, d.y)
    norms = np.sqrt(d.col_sq_norms)
    scale = np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 1.0)
    if d.is_sparse:
        return make_dataset(d.X @ sp.diags(scale), d.y)
    return make_dataset(d.X * scale, d.y)


def add_constant_column(d):
    """Append an all-ones column; it is penalized like every other feature."""
    ones = np.ones((d.n, 1))
    if d.is_sparse:
        return make_dataset(sp.hstack([d.X, sp.csc_matrix(ones)]), d.y)
    return make_dataset(np.hstack([d.X, ones]), d.y)


CORRELATIONS = ("identity", "exponential", "equicorrelated")
RESPONSE_MODELS = ("bernoulli-logistic", "sign-noise")


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    p: int
    k_dagger: int
    correlation: str = "identity"
    corr_param: float = 0.0
    s: float = 1.0
    response_model: str = "bernoulli-logistic"
    snr: float = 10.0

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        if not 1 <= self.k_dagger <= self.p:
            raise ValueError(f"k_dagger must lie in [1, p], got "
                             f"{self.k_dagger}")
        if self.correlation not in CORRELATIONS:
            raise ValueError(f"unknown correlation {self.correlation!r}")
        if self.correlation != "identity" and not 0 <= self.corr_param < 1:
            raise ValueError("correlation parameter must lie in [0, 1)")
        if self.response_model not in RESPONSE_MODELS:
            raise ValueError(f"unknown response model "
                             f"{self.response_model!r}")
        if self.s <= 0 or self.snr <= 0:
            raise ValueError("s and snr must be positive")

    @classmethod
    def from_dict(cls, obj):
        """Build from the JSON layout ``{n, p, correlation: {kind, param},
        k_dagger, s | snr, response_model}``; a ``seed`` key is ignored."""
        corr = obj.get("correlation", {"kind": "identity"})
        if isinstance(corr, str):
            corr = {"kind": corr}
        kw = dict(n=int(obj["n"]), p=int(obj["p"]),
                  k_dagger=int(obj["k_dagger"]),
                  correlation=corr.get("kind", "identity"),
                  corr_param=float(corr.get("param", 0.0)),
                  response_model=obj.get("response_model",
                                         "bernoulli-logistic"))
        if "s" in obj:
            kw["s"] = float(obj["s"])
        if "snr" in obj:
            kw["snr"] = float(obj["snr"])
        return cls(**kw)

    def to_dict(self):
        out = {"n": self.n, "p": self.p,
               "correlation": {"kind": self.correlation,
                               "param": self.corr_param},
               "k_dagger": self.k_dagger,
               "response_model": self.response_model}
        if self.response_model == "sign-noise":
            out["snr"] = self.snr
        else:
            out["s"] = self.s
        return out


def load_spec_json(path):
    with open(path) as fh:
        obj = json.load(fh)
    return SyntheticSpec.from_dict(obj), obj.get("seed")


# Stream layout: every draw derives from SeedSequence(seed) with a fixed
# spawn key, so features, labels and validation labels are independent and
# reproducible across platforms (PCG64 is portable).
_X_STREAM, _Y_STREAM, _YVAL_STREAM = 0, 1, 2


def _rng(seed, stream, sub=0):
    ss = np.random.SeedSequence(seed, spawn_key=(stream, sub))
    return np.random.Generator(np.random.PCG64(ss))


def true_coefficients(spec):
    beta = np.zeros(spec.p)
    beta[(np.arange(spec.k_dagger) * spec.p) // spec.k_dagger] = 1.0
    return beta


def _features(spec, rng):
    n, p = spec.n, spec.p
    if spec.correlation == "identity":
        return rng.standard_normal((n, p))
    if spec.correlation == "equicorrelated":
        c = spec.corr_param
        z = rng.standard_normal((n, 1))
        return math.sqrt(c) * z + math.sqrt(1 - c) * rng.standard_normal(
            (n, p))
    rho = spec.corr_param
    eps = rng.standard_normal((n, p))
    X = np.empty((n, p))
    X[:, 0] = eps[:, 0]
    scale = math.sqrt(1 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + scale * eps[:, j]
    return X


def _labels(X, beta, spec, rng):
    margin = X @ beta
    if spec.response_model == "bernoulli-logistic":
        with np.errstate(over="ignore"):
            prob = 1.0 / (1.0 + np.exp(-spec.s * margin))
        return np.where(rng.random(X.shape[0]) < prob, 1.0, -1.0)
    var = float(np.var(margin))
    sigma = math.sqrt(var / spec.snr) if var > 0 else 0.0
    noisy = margin + sigma * rng.standard_normal(X.shape[0])
    return np.where(noisy >= 0, 1.0, -1.0)


def gen_synthetic(spec, seed, stream=0):
    """Draw a training set and the planted coefficients.

    ``stream`` selects an independent replicate of the design for the same
    seed (used for held-out test sets).
    """
    beta = true_coefficients(spec)
    X = _features(spec, _rng(seed, _X_STREAM, stream))
    y = _labels(X, beta, spec, _rng(seed, _Y_STREAM, stream))
    return make_dataset(X, y), beta


def gen_validation_response(d, beta_dagger, spec, seed):
    """Fresh labels on the same design under the same response model."""
    beta_dagger = np.asarray(beta_dagger, dtype=float)
    if beta_dagger.shape != (d.p,):
        raise ValueError(f"beta_dagger has length {beta_dagger.shape[0]}, "
                         f"expected {d.p}")
    return _labels(d.dense(), beta_dagger, spec, _rng(seed, _YVAL_STREAM))
