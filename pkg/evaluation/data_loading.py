"""Reading and writing run artifacts (steps.csv, frontiers.json, summary.json, trace.csv)."""

import json
import os
from typing import Dict, List

import pandas as pd
from pydantic import BaseModel

from engine.core.errors import ParseError
from engine.stream_engine import RunReport, load_params  # noqa: F401  (re-exported for scripts)

STEP_COLUMNS = [
    "step", "object_id", "target_count", "targets", "comparisons", "cluster_comparisons",
    "member_comparisons", "cumulative_comparisons", "wall_time_s", "cumulative_time_s",
]


class RunArtifacts(BaseModel):
    algorithm: str
    universe: List[str]
    user_frontiers: Dict[str, List[str]]
    cluster_frontiers: Dict[str, List[str]] = {}
    clusters: Dict[str, List[str]] = {}
    config: Dict[str, object] = {}


def steps_frame(report: RunReport) -> pd.DataFrame:
    rows = []
    for record in report.steps:
        row = record.model_dump()
        row["targets"] = " ".join(record.targets)
        rows.append(row)
    return pd.DataFrame(rows, columns=STEP_COLUMNS)


def write_run_outputs(report: RunReport, out_dir: str) -> Dict[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "steps": os.path.join(out_dir, "steps.csv"),
        "frontiers": os.path.join(out_dir, "frontiers.json"),
        "summary": os.path.join(out_dir, "summary.json"),
    }
    steps_frame(report).to_csv(paths["steps"], index=False)

    artifacts = RunArtifacts(
        algorithm=report.algorithm,
        universe=report.universe,
        user_frontiers=report.user_frontiers,
        cluster_frontiers=report.cluster_frontiers,
        clusters=report.clusters,
        config=report.config.model_dump(mode="json"),
    )
    with open(paths["frontiers"], "w", encoding="utf-8") as f:
        json.dump(artifacts.model_dump(), f, indent=2)

    summary = {
        "algorithm": report.algorithm,
        "objects": len(report.steps),
        "total_comparisons": report.total_comparisons,
        "comparisons_by_scope": report.comparisons_by_scope,
        "wall_time_s": report.wall_time_s,
        "mean_targets": (
            sum(s.target_count for s in report.steps) / len(report.steps) if report.steps else 0.0
        ),
    }
    with open(paths["summary"], "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)

    if report.trace:
        paths["trace"] = os.path.join(out_dir, "trace.csv")
        pd.DataFrame(report.trace, columns=["step", "object", "holder", "frontier", "buffer"]).to_csv(
            paths["trace"], index=False
        )
    return paths


def load_run_artifacts(out_dir: str) -> RunArtifacts:
    path = os.path.join(out_dir, "frontiers.json")
    if not os.path.exists(path):
        raise ParseError("run artifacts not found (expected frontiers.json)", path=path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            return RunArtifacts.model_validate(json.load(f))
        except (json.JSONDecodeError, ValueError) as exc:
            raise ParseError(f"unreadable run artifacts: {exc}", path=path) from exc


def load_steps(out_dir: str) -> pd.DataFrame:
    path = os.path.join(out_dir, "steps.csv")
    if not os.path.exists(path):
        raise ParseError("step report not found", path=path)
    return pd.read_csv(path, keep_default_na=False)
