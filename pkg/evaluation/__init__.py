"""Evaluation module for stream runs."""
# This module allows the use of functions as a library.

from evaluation.data_loading import (
    RunArtifacts,
    load_params,
    load_run_artifacts,
    load_steps,
    write_run_outputs,
)
from evaluation.metrics import (
    AccuracyReport,
    UserAccuracy,
    accuracy_metrics,
    audit_false_positives,
    f_measure,
    write_accuracy_csv,
)
from evaluation.mlflow_utils import log_run_artifacts, log_run_report, setup_mlflow
from evaluation.utils import comparison_ratio, cumulative_curve, normalize_h_sweep, slugify_run_name

__all__ = [
    "RunArtifacts",
    "load_params",
    "load_run_artifacts",
    "load_steps",
    "write_run_outputs",
    "AccuracyReport",
    "UserAccuracy",
    "accuracy_metrics",
    "audit_false_positives",
    "f_measure",
    "write_accuracy_csv",
    "log_run_artifacts",
    "log_run_report",
    "setup_mlflow",
    "comparison_ratio",
    "cumulative_curve",
    "normalize_h_sweep",
    "slugify_run_name",
]
