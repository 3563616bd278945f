"""MLflow utilities for logging stream runs."""

import os
from typing import Dict, Optional

import mlflow
import requests

from engine.stream_engine import RunReport
from evaluation.utils import slugify_run_name


def setup_mlflow(repo_name: str = "pareto-streams") -> bool:
    """Point MLflow at a live tracking server or DagsHub. Returns False when logging is disabled."""
    # 1. MLFLOW_TRACKING_URI, if the server answers
    mlflow_uri = os.getenv("MLFLOW_TRACKING_URI")
    if mlflow_uri:
        try:
            requests.get(mlflow_uri.rstrip("/") + "/health", timeout=2)
            mlflow.set_tracking_uri(mlflow_uri)
            print(f"✓ MLflow connected to: {mlflow_uri}")
            return True
        except requests.RequestException:
            print(f"⚠ Server at URI {mlflow_uri} not reachable.")

    # 2. DagsHub fallback
    dagshub_user = os.getenv("DAGSHUB_USERNAME")
    dagshub_token = os.getenv("DAGSHUB_TOKEN")
    if dagshub_user and dagshub_token:
        os.environ["MLFLOW_TRACKING_USERNAME"] = dagshub_user
        os.environ["MLFLOW_TRACKING_PASSWORD"] = dagshub_token
        remote_uri = f"https://dagshub.com/{dagshub_user}/{repo_name}.mlflow"
        mlflow.set_tracking_uri(remote_uri)
        print(f"🌐 MLflow connected to DagsHub: {remote_uri}")
        return True

    print("⚠ MLFLOW_TRACKING_URI not set and DagsHub credentials not found. MLflow logging will be disabled.")
    return False


def log_run_report(report: RunReport, *, prefix: str, step: Optional[int] = None) -> None:
    """Log the comparison and timing totals of one run under ``prefix``."""
    if mlflow.active_run() is None:
        return
    mlflow.log_metric(f"{prefix}_comparisons", report.total_comparisons, step=step)
    mlflow.log_metric(f"{prefix}_wall_time_s", report.wall_time_s, step=step)
    for scope, count in report.comparisons_by_scope.items():
        mlflow.log_metric(f"{prefix}_{scope}_comparisons", count, step=step)


def log_run_artifacts(paths: Dict[str, str], run_name: str) -> None:
    """Upload the files written for one run (steps, frontiers, summary, trace)."""
    if mlflow.active_run() is None:
        return
    artifact_prefix = f"runs/{slugify_run_name(run_name)}"
    for path in paths.values():
        if path and os.path.exists(path):
            mlflow.log_artifact(path, artifact_path=artifact_prefix)
