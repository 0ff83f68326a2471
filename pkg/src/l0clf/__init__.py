"""Sparse classification with l0-l1-l2 penalties."""

from .cd import (FitOptions, Solution, TIGHT, cd_fit, check_stationarity,
                 lambda0_max, threshold)
from .data import (DataError, Dataset, SyntheticSpec, gen_synthetic,
                   gen_validation_response, load_csv, load_svmlight,
                   make_dataset)
from .iht import ConstrainedSpec, iht_fit, iht_step
from .localsearch import SwapOptions, cd_with_local_search
from .loss import (LOGISTIC, SQUARED_HINGE, LossKind, PenaltyParams,
                   objective, smoothed_hinge)
from .metrics import EvalReport, auc, recovery_report
from .mip import IgaOptions, MipProblem, branch_and_bound, iga_solve
from .path import GridSpec, fit_l1_path, fit_path, tune_on_validation

__all__ = [
    "ConstrainedSpec", "DataError", "Dataset", "EvalReport", "FitOptions",
    "GridSpec", "IgaOptions", "LOGISTIC", "LossKind", "MipProblem",
    "PenaltyParams", "SQUARED_HINGE", "Solution", "SwapOptions",
    "SyntheticSpec", "TIGHT", "auc", "branch_and_bound", "cd_fit",
    "cd_with_local_search", "check_stationarity", "fit_l1_path", "fit_path",
    "gen_synthetic", "gen_validation_response", "iga_solve", "iht_fit",
    "iht_step", "lambda0_max", "load_csv", "load_svmlight", "make_dataset",
    "objective", "recovery_report", "smoothed_hinge", "threshold",
    "tune_on_validation",
]
