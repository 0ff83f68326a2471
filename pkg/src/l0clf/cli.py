"""Command-line entry point: synth, fit, path, mip, eval, bench.

Every command writes JSON carrying ``"schema": 1``. Floats use 17
significant digits and non-finite values become null. Wall-clock time
sits under the ``timing`` key, which is the only field allowed to differ
between identical runs.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
import warnings

import numpy as np

from . import bench
from .cd import CYCLE_ORDERS, FitOptions, TIGHT, cd_fit, check_stationarity
from .data import (CORRELATIONS, RESPONSE_MODELS, STANDARDIZE_MODES,
                   DataError, SyntheticSpec, add_constant_column, gen_synthetic,
                   gen_validation_response, load_csv, load_spec_json,
                   load_svmlight, standardize, write_csv, write_svmlight)
from .iht import ConstrainedSpec, IhtOptions, iht_fit
from .localsearch import SEARCH_MODES, SwapOptions, cd_with_local_search
from .loss import LossKind, PenaltyParams
from .metrics import evaluate
from .mip import IgaOptions, MipProblem, branch_and_bound, choose_big_m, \
    iga_solve
from .path import GridSpec, fit_path, path_records, tune_on_validation

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 2, 3
TIMING_KEY = "timing"

log = logging.getLogger("l0clf")


class UsageError(Exception):
    """Bad flags or unusable input; exits with status 2."""


# ---------------------------------------------------------------- output

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _emit(obj, indent=0):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_emit(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v) for v in obj) + "]"
        items = [inner + _emit(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return format(obj, ".17g")
    return json.dumps(obj)


def dumps(obj):
    """Deterministic JSON text with 17-digit floats."""
    return _emit(_plain(obj)) + "\n"


def _write_json(obj, out):
    text = dumps({"schema": SCHEMA, **obj})
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    parent = os.path.dirname(os.path.abspath(out))
    if not os.path.isdir(parent):
        raise UsageError(f"output directory {parent} does not exist")
    with open(out, "w") as fh:
        fh.write(text)


def _timing(start):
    return {"seconds": time.perf_counter() - start}


# ---------------------------------------------------------------- inputs

def _looks_like_header(path):
    with open(path, newline="") as fh:
        first = next(csv.reader(fh), [])
    for tok in first:
        try:
            float(tok)
        except ValueError:
            return True
    return False


def _load_data(path, fmt="auto", header=False, label_column=-1,
               scale="none", constant=False):
    if path is None:
        raise UsageError("no data file given (use --data)")
    if not os.path.isfile(path):
        raise UsageError(f"data file {path} not found")
    if fmt == "auto":
        fmt = "csv" if path.lower().endswith(".csv") else "svmlight"
    if fmt == "csv" and not header and _looks_like_header(path):
        log.info("%s: first row is not numeric; reading it as a header",
                 path)
        header = True
    try:
        d = (load_csv(path, header, label_column) if fmt == "csv"
             else load_svmlight(path))
        d = standardize(d, scale) if scale != "none" else d
    except (DataError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    if constant:
        log.warning("appending an all-ones column at index %d; it is "
                    "penalized like every other feature", d.p)
        d = add_constant_column(d)
    return d


def _data_from(args, path=None):
    return _load_data(path or args.data, args.format, args.header,
                      args.label_column, args.standardize,
                      args.add_constant_column)


def _loss(args):
    try:
        return LossKind.parse(args.loss, args.mu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _penalty(args):
    try:
        return PenaltyParams(args.l0, args.l1, args.l2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fit_options(args):
    try:
        return FitOptions(rel_tol=args.tol, max_full_cycles=args.max_cycles,
                          gamma=args.gamma, active_set=not args.no_active_set,
                          cycle_order=args.cycle_order,
                          screening=args.screening)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _swap_options(args):
    try:
        return SwapOptions(q=args.swap_q, mode=args.swap_mode,
                           best_of_round=args.swap_best_of_round)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path} is not valid JSON: {exc}") from None


def _coefficients(obj, what):
    """Dense coefficient vector from a model or truth JSON object."""
    if "beta" in obj:
        return np.asarray(obj["beta"], dtype=float)
    try:
        p = int(obj["p"])
        beta = np.zeros(p)
        for i, v in obj["coefficients"]:
            beta[int(i)] = float(v)
    except (KeyError, TypeError, ValueError, IndexError):
        raise UsageError(f"{what} lacks 'p' and 'coefficients' (or 'beta')") \
            from None
    return beta


def _model_record(sol, kind, lam, algorithm):
    return {"kind": "model", "loss": str(kind), "algorithm": algorithm,
            "lambda0": lam.lambda0, "lambda1": lam.lambda1,
            "lambda2": lam.lambda2, "p": sol.p,
            "support": [int(i) for i in sol.support],
            "coefficients": [[i, v] for i, v in sol.coefficients()],
            "objective": sol.objective_P, "converged": sol.converged,
            "cycles": sol.cycles}


# ---------------------------------------------------------------- commands

def _synth_spec(args):
    if args.spec:
        spec, file_seed = load_spec_json(args.spec)
        return spec, file_seed
    missing = [f for f in ("n", "p", "k") if getattr(args, f) is None]
    if missing:
        raise UsageError("give --spec or all of --n, --p, --k")
    kw = dict(n=args.n, p=args.p, k_dagger=args.k,
              correlation=args.correlation, corr_param=args.corr_param,
              response_model=args.response_model)
    if args.s is not None:
        kw["s"] = args.s
    if args.snr is not None:
        kw["snr"] = args.snr
    return SyntheticSpec(**kw), None


def cmd_synth(args):
    start = time.perf_counter()
    try:
        spec, file_seed = _synth_spec(args)
    except (ValueError, KeyError, OSError) as exc:
        raise UsageError(f"invalid synthetic spec: {exc}") from None
    seed = args.seed if args.seed is not None else file_seed
    if seed is None:
        raise UsageError("an explicit --seed is required (or a 'seed' key in "
                         "the --spec file)")
    if not os.path.isdir(args.out):
        raise UsageError(f"output directory {args.out} does not exist")
    d, truth = gen_synthetic(spec, seed)
    d_val = d.with_labels(gen_validation_response(d, truth, spec, seed))
    ext = ".csv" if args.file_format == "csv" else ".svm"
    writer = write_csv if args.file_format == "csv" else write_svmlight
    files = {"train": "train" + ext, "validation": "validation" + ext,
             "truth": "truth.json"}
    sets = [("train", d), ("validation", d_val)]
    if args.test:
        files["test"] = "test" + ext
        sets.append(("test", gen_synthetic(spec, seed, stream=1)[0]))
    for key, data in sets:
        writer(data, os.path.join(args.out, files[key]))
    with open(os.path.join(args.out, files["truth"]), "w") as fh:
        fh.write(dumps({"schema": SCHEMA, "kind": "truth", "p": spec.p,
                        "support": [int(i) for i in np.flatnonzero(truth)],
                        "beta": truth}))
    _write_json({"command": "synth", "spec": spec.to_dict(), "seed": seed,
                 "n": d.n, "p": d.p, "positives": int((d.y > 0).sum()),
                 "validation_positives": int((d_val.y > 0).sum()),
                 "label_disagreements": int((d.y != d_val.y).sum()),
                 "files": files, TIMING_KEY: _timing(start)}, None)
    return EXIT_OK


def cmd_fit(args):
    start = time.perf_counter()
    d = _data_from(args)
    kind, lam, opts = _loss(args), _penalty(args), _fit_options(args)
    init = None
    if args.init:
        init = _coefficients(_read_json(args.init, "initial model"),
                             "initial model")
        if init.shape != (d.p,):
            raise UsageError(f"initial model has {init.shape[0]} "
                             f"coefficients, data has {d.p} features")
    if args.algo == "iht":
        if args.k is None:
            raise UsageError("--algo iht needs --k")
        try:
            spec = ConstrainedSpec(args.k, args.l1, args.l2, args.gamma)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        sol = iht_fit(d, kind, spec, init,
                      IhtOptions(rel_tol=args.tol,
                                 max_iter=args.max_cycles * 100))
        rec = _model_record(sol, kind, spec.penalty, "iht")
        rec["k"] = args.k
        rec["degenerate"] = bool(sol.info.get("degenerate", False))
    else:
        if args.algo == "cd":
            sol = cd_fit(d, kind, lam, init, opts)
        else:
            sol = cd_with_local_search(d, kind, lam, init,
                                       _swap_options(args), opts)
        rec = _model_record(sol, kind, lam, args.algo)
        rec["stationarity"] = check_stationarity(sol, d, kind, lam,
                                                 opts).to_dict()
        if "rounds" in sol.info:
            rec["swap_rounds"] = sol.info["rounds"]
    rec["command"] = "fit"
    rec[TIMING_KEY] = _timing(start)
    _write_json(rec, args.out)
    return EXIT_OK


def _grid(args):
    swept = args.l2 if args.q == "l2" else args.l1
    fixed = args.l1 if args.q == "l2" else args.l2
    if fixed is not None and len(fixed) != 1:
        raise UsageError(f"the fixed penalty --{'l1' if args.q == 'l2' else 'l2'}"
                         " takes a single value")
    try:
        return GridSpec(n_lambda0=args.n_lambda0, lambda0_ratio=args.ratio,
                        q=args.q, lambda_q_values=swept,
                        other=fixed[0] if fixed else 0.0,
                        dynamic=not args.static, max_support=args.max_support)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_path(args):
    start = time.perf_counter()
    d = _data_from(args)
    kind = _loss(args)
    grid = _grid(args)
    path = fit_path(d, kind, grid, args.algo, _fit_options(args),
                    _swap_options(args))
    table = selected = None
    if args.val:
        d_val = _data_from(args, args.val)
        if d_val.p != d.p:
            raise UsageError(f"validation data has {d_val.p} features, "
                             f"training data has {d.p}")
        best, table = tune_on_validation(path, d_val)
        selected = path.entries.index(best)
    out = {"command": "path", "kind": "path", "loss": str(kind),
           "algorithm": args.algo,
           "grid": {"n_lambda0": grid.n_lambda0,
                    "lambda0_ratio": grid.lambda0_ratio, "q": grid.q,
                    "lambda_q_values": list(grid.q_values(d, kind)),
                    "other": grid.other, "dynamic": grid.dynamic,
                    "max_support": grid.max_support},
           "p": d.p, "entries": path_records(path, table),
           "non_converged": sum(not e.solution.converged
                                for e in path.entries)}
    if selected is not None:
        out["selected"] = selected
    out[TIMING_KEY] = _timing(start)
    _write_json(out, args.out)
    return EXIT_OK


def _warm_start(args, d, kind, lam):
    if args.warm == "auto":
        return cd_with_local_search(d, kind, lam, None, SwapOptions(),
                                    TIGHT).beta
    obj = _read_json(args.warm, "warm-start model")
    if obj.get("kind") == "path":
        idx = args.warm_entry
        try:
            entry = obj["entries"][idx]
        except (IndexError, TypeError):
            raise UsageError(f"path file has no entry {idx}") from None
        obj = {"p": obj["p"], "coefficients": entry["coefficients"]}
    beta = _coefficients(obj, "warm-start model")
    if beta.shape != (d.p,):
        raise UsageError(f"warm start has {beta.shape[0]} coefficients, data "
                         f"has {d.p} features")
    return beta


def cmd_mip(args):
    start = time.perf_counter()
    d = _data_from(args)
    kind, lam = _loss(args), _penalty(args)
    warm = _warm_start(args, d, kind, lam)
    try:
        if args.method == "iga":
            opts = IgaOptions(gap_tol=args.gap, max_add_per_iter=args.max_add,
                              frac_cutoff=args.frac_cutoff,
                              node_budget=args.node_budget,
                              time_budget=args.time_budget,
                              big_m=args.big_m, check_big_m=args.check_big_m)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                res = iga_solve(d, kind, lam, warm, opts)
        else:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                M = args.big_m or choose_big_m(warm)
                prob = MipProblem(d, kind, lam, M, tuple(range(d.p)))
                res = branch_and_bound(prob, warm, args.gap, args.node_budget,
                                       args.time_budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for w in caught:
        log.warning("%s", w.message)
    cert = res.certificate()
    cert.update({"command": "mip", "kind": "certificate", "method": args.method,
                 "loss": str(kind), "lambda0": lam.lambda0,
                 "lambda1": lam.lambda1, "lambda2": lam.lambda2, "p": d.p,
                 "lower_bound_history": list(res.lb_history),
                 TIMING_KEY: _timing(start)})
    _write_json(cert, args.out)
    return EXIT_BUDGET if res.status == "budget-exhausted" else EXIT_OK


def cmd_eval(args):
    start = time.perf_counter()
    d = _data_from(args)
    beta = _coefficients(_read_json(args.model, "model"), "model")
    if beta.shape != (d.p,):
        raise UsageError(f"model has {beta.shape[0]} coefficients, data has "
                         f"{d.p} features")
    truth = None
    if args.truth:
        truth = _coefficients(_read_json(args.truth, "truth"), "truth")
        if truth.shape != (d.p,):
            raise UsageError(f"truth has {truth.shape[0]} coefficients, data "
                             f"has {d.p} features")
    rep = evaluate(beta, d, truth).to_dict()
    _write_json({"command": "eval", "kind": "evaluation", **rep,
                 TIMING_KEY: _timing(start)}, args.out)
    return EXIT_OK


def _parse_seeds(text):
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition(":")
        try:
            if sep:
                seeds.extend(range(int(lo), int(hi)))
            else:
                seeds.append(int(part))
        except ValueError:
            raise UsageError(f"cannot parse seeds {text!r}; use a list like "
                             "'0,1,5' or a range like '0:20'") from None
    if not seeds:
        raise UsageError("no seeds given")
    return seeds


def cmd_bench(args):
    start = time.perf_counter()
    if args.scenario not in bench.SCENARIOS:
        raise UsageError(f"unknown scenario {args.scenario!r}; available: "
                         f"{', '.join(sorted(bench.SCENARIOS))}")
    seeds = _parse_seeds(args.seeds)
    if not os.path.isdir(args.out):
        raise UsageError(f"output directory {args.out} does not exist")
    rows = bench.run_scenario(args.scenario, seeds, args.workers)
    summary = bench.summarize(rows)
    per_seed = os.path.join(args.out, "per_seed.csv")
    summ = os.path.join(args.out, "summary.csv")
    bench.write_per_seed(rows, per_seed)
    bench.write_summary(summary, summ)
    _write_json({"command": "bench", "scenario": args.scenario,
                 "seeds": seeds, "summary": summary,
                 "files": {"per_seed": "per_seed.csv",
                           "summary": "summary.csv"},
                 TIMING_KEY: _timing(start)}, None)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_data_flags(p):
    g = p.add_argument_group("data")
    g.add_argument("--data", help="training data (.csv or SVMLight text)")
    g.add_argument("--format", choices=("auto", "csv", "svmlight"),
                   default="auto")
    g.add_argument("--header", action="store_true",
                   help="CSV has a header row (detected when the first row is "
                        "not numeric)")
    g.add_argument("--label-column", type=int, default=-1)
    g.add_argument("--standardize", choices=STANDARDIZE_MODES, default="none")
    g.add_argument("--add-constant-column", action="store_true",
                   help="append a penalized all-ones column")


def _add_loss_flags(p):
    p.add_argument("--loss", default="logistic",
                   help="logistic, squared_hinge or smoothed_hinge")
    p.add_argument("--mu", type=float, default=0.2,
                   help="smoothing for the smoothed hinge")


def _add_fit_flags(p):
    g = p.add_argument_group("coordinate descent")
    g.add_argument("--tol", type=float, default=1e-6)
    g.add_argument("--max-cycles", type=int, default=1000)
    g.add_argument("--gamma", type=float, default=1.05)
    g.add_argument("--cycle-order", choices=CYCLE_ORDERS, default="natural")
    g.add_argument("--no-active-set", action="store_true")
    g.add_argument("--screening", action="store_true")
    s = p.add_argument_group("swap search")
    s.add_argument("--swap-q", type=int, default=None)
    s.add_argument("--swap-mode", choices=SEARCH_MODES, default="heuristic")
    s.add_argument("--swap-best-of-round", action="store_true",
                   help="take the best improving swap per round")


def _add_common(p):
    p.add_argument("--config", help="JSON file of flag defaults")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("-q", "--quiet", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="l0clf", description="Sparse L0-regularized classification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    _add_common(p)
    p.add_argument("--spec", help="synthetic-spec JSON file")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--k", type=int, help="number of planted features")
    p.add_argument("--correlation", choices=CORRELATIONS, default="identity")
    p.add_argument("--corr-param", type=float, default=0.0)
    p.add_argument("--response-model", choices=RESPONSE_MODELS,
                   default="bernoulli-logistic")
    p.add_argument("--s", type=float)
    p.add_argument("--snr", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--test", action="store_true",
                   help="also write an independent test set")
    p.add_argument("--file-format", choices=("csv", "svmlight"),
                   default="csv")
    p.add_argument("--out", required=True, help="existing output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit at one penalty setting")
    _add_common(p)
    _add_data_flags(p)
    _add_loss_flags(p)
    p.add_argument("--l0", type=float, default=0.0)
    p.add_argument("--l1", type=float, default=0.0)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--algo", choices=("cd", "cd+ls", "iht"), default="cd")
    p.add_argument("--k", type=int, help="support cap for --algo iht")
    p.add_argument("--init", help="model JSON to start from")
    _add_fit_flags(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("path", help="fit a regularization path")
    _add_common(p)
    _add_data_flags(p)
    _add_loss_flags(p)
    p.add_argument("--q", choices=("l2", "l1"), default="l2",
                   help="which continuous penalty is swept")
    p.add_argument("--l1", type=float, nargs="+")
    p.add_argument("--l2", type=float, nargs="+")
    p.add_argument("--n-lambda0", type=int, default=100)
    p.add_argument("--ratio", type=float, default=1e-3)
    p.add_argument("--static", action="store_true",
                   help="use the geometric lambda0 grid as is")
    p.add_argument("--max-support", type=int)
    p.add_argument("--algo", choices=("cd", "cd+ls"), default="cd")
    p.add_argument("--val", help="validation data for tuning")
    _add_fit_flags(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("mip", help="certify a global optimum")
    _add_common(p)
    _add_data_flags(p)
    _add_loss_flags(p)
    p.add_argument("--l0", type=float, required=True)
    p.add_argument("--l1", type=float, default=0.0)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--warm", default="auto",
                   help="'auto', a model JSON or a path JSON")
    p.add_argument("--warm-entry", type=int, default=0,
                   help="entry index when --warm is a path file")
    p.add_argument("--method", choices=("iga", "bnb"), default="iga")
    p.add_argument("--gap", type=float, default=1e-6)
    p.add_argument("--node-budget", type=int, default=100_000)
    p.add_argument("--time-budget", type=float)
    p.add_argument("--big-m", type=float)
    p.add_argument("--check-big-m", action="store_true",
                   help="re-solve with doubled big-M and warn if it helps")
    p.add_argument("--max-add", type=int, default=10)
    p.add_argument("--frac-cutoff", type=float)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_mip)

    p = sub.add_parser("eval", help="score a model")
    _add_common(p)
    _add_data_flags(p)
    p.add_argument("--model", required=True)
    p.add_argument("--truth", help="JSON with the planted coefficients")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a built-in experiment")
    _add_common(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--seeds", required=True,
                   help="seed list '0,3,7' or range '0:20'")
    p.add_argument("--workers", type=int,
                   help=f"process count (default ${bench.THREADS_ENV} or "
                        "all cores)")
    p.add_argument("--out", required=True, help="existing output directory")
    p.set_defaults(func=cmd_bench)
    return parser


def _apply_config(parser, argv):
    """Re-parse with defaults taken from ``--config`` when given."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    cfg = _read_json(args.config, "config")
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(k.replace("-", "_") for k in cfg) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except UsageError as exc:
        print(f"l0clf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    level = logging.ERROR if args.quiet else (
        logging.DEBUG if args.verbose > 1 else
        logging.INFO if args.verbose else logging.WARNING)
    logging.basicConfig(level=level, format="l0clf: %(levelname)s: "
                                            "%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"l0clf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
