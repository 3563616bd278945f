"""
Stream Evaluation Script
This script runs the dissemination algorithms over the generated workload for every branch cut
configured in params.yaml, compares dominance-comparison counts against the baseline, measures the
accuracy of the approximate variants and logs everything to MLflow (if configured). A JSON summary
is always written for DVC.
"""

import json
import os
from typing import Any, Dict, List

import mlflow
from dotenv import load_dotenv

from engine.stream_engine import config_from_params, execute, resolve_path
from evaluation import (
    accuracy_metrics,
    audit_false_positives,
    comparison_ratio,
    cumulative_curve,
    load_params,
    log_run_artifacts,
    log_run_report,
    normalize_h_sweep,
    setup_mlflow,
    write_accuracy_csv,
    write_run_outputs,
)
from ingestion.data_ingestion import spec_from_params
from ingestion.workload import load_workload

load_dotenv()


def _as_sets(frontiers: Dict[str, List[str]]) -> Dict[str, frozenset]:
    return {uid: frozenset(ids) for uid, ids in frontiers.items()}


def _run(config_kwargs: Dict[str, Any], params, workload, runs_dir: str, run_name: str, *, groups=None):
    config = config_from_params(params, **config_kwargs)
    report = execute(config, workload.users, workload.objects, groups=groups)
    paths = write_run_outputs(report, os.path.join(runs_dir, run_name))
    log_run_artifacts(paths, run_name)
    return report


def main() -> None:
    params = load_params()
    eval_params = params.get("evaluation", {}) or {}
    ingestion_params = params.get("ingestion", {}) or {}

    workload_dir = resolve_path(ingestion_params.get("workload_dir", "data/workload"))
    metrics_output = eval_params.get("metrics_output", "metrics/stream_eval.json")
    runs_dir = eval_params.get("runs_dir", "data/runs/eval")
    h_sweep = normalize_h_sweep(eval_params.get("h_sweep", [0.5]))
    curve_every = int(eval_params.get("curve_every", 1000))
    window = spec_from_params(params).window

    if not os.path.exists(os.path.join(workload_dir, "objects.csv")):
        raise RuntimeError(f"Workload not found in {workload_dir}. Run `dvc repro generate` first.")

    metrics_dir = os.path.dirname(metrics_output)
    if metrics_dir:
        os.makedirs(metrics_dir, exist_ok=True)

    workload = load_workload(workload_dir)
    print(f"✓ Workload loaded: {len(workload.users)} users, {len(workload.objects)} objects")
    objects_by_id = {o.id: o for o in workload.objects}
    users_by_id = {u.user_id: u for u in workload.users}

    tracking = setup_mlflow()
    run_ctx = None
    if tracking:
        mlflow.set_experiment(eval_params.get("mlflow_experiment", "stream_evaluation"))
        run_ctx = mlflow.start_run(run_name="stream_eval")
        print(f"✓ MLflow run started: {run_ctx.info.run_id}")

    modes = [("", None)]
    if window:
        modes.append(("-sw", window))

    results: List[Dict[str, Any]] = []
    try:
        if run_ctx is not None:
            mlflow.log_param("users", len(workload.users))
            mlflow.log_param("objects", len(workload.objects))
            mlflow.log_param("attributes", len(workload.schema))
            mlflow.log_param("similarity", (params.get("clustering", {}) or {}).get("similarity"))
            mlflow.log_param("theta1", (params.get("approximation", {}) or {}).get("theta1"))
            mlflow.log_param("theta2", (params.get("approximation", {}) or {}).get("theta2"))
            mlflow.log_param("window", window if window else "none")
            mlflow.log_param("h_sweep", ",".join(str(h) for h in h_sweep))

        for suffix, w in modes:
            baseline = _run({"algorithm": f"baseline{suffix}", "window": w}, params, workload, runs_dir,
                            f"baseline{suffix}")
            log_run_report(baseline, prefix=f"baseline{suffix}")
            for i, h in enumerate(h_sweep):
                tag = f"h{h:g}"
                exact = _run({"algorithm": f"ftv{suffix}", "window": w, "h": h}, params, workload, runs_dir,
                             f"{tag}/ftv{suffix}")
                approx = _run({"algorithm": f"ftv-approx{suffix}", "window": w, "h": h}, params, workload,
                              runs_dir, f"{tag}/ftv-approx{suffix}")
                if _as_sets(exact.user_frontiers) != _as_sets(baseline.user_frontiers):
                    print(f"⚠ ftv{suffix} at h={h} disagrees with the baseline frontiers")

                accuracy = accuracy_metrics(baseline.user_frontiers, approx.user_frontiers, universe=baseline.universe)
                accuracy_path = write_accuracy_csv(accuracy, os.path.join(runs_dir, tag, f"accuracy{suffix}.csv"))
                audit = audit_false_positives(baseline.user_frontiers, approx.user_frontiers, objects_by_id, users_by_id)

                entry = {
                    "mode": "windowed" if w else "append-only",
                    "window": w,
                    "h": h,
                    "clusters": len(exact.clusters),
                    "baseline_comparisons": baseline.total_comparisons,
                    "ftv_comparisons": exact.total_comparisons,
                    "ftv_approx_comparisons": approx.total_comparisons,
                    "ftv_speedup": comparison_ratio(baseline, exact),
                    "ftv_approx_speedup": comparison_ratio(baseline, approx),
                    "baseline_time_s": baseline.wall_time_s,
                    "ftv_time_s": exact.wall_time_s,
                    "ftv_approx_time_s": approx.wall_time_s,
                    "precision": float(accuracy.precision),
                    "recall": float(accuracy.recall),
                    "f_measure": float(accuracy.f_measure),
                    "accuracy": float(accuracy.accuracy),
                    "false_positive_audit": audit,
                    "curves": {
                        "baseline": cumulative_curve(baseline, curve_every),
                        "ftv": cumulative_curve(exact, curve_every),
                        "ftv_approx": cumulative_curve(approx, curve_every),
                    },
                }
                results.append(entry)
                print(f"📊 {entry['mode']} h={h}: {entry['clusters']} clusters, "
                      f"comparisons baseline={baseline.total_comparisons} ftv={exact.total_comparisons} "
                      f"approx={approx.total_comparisons}; P={entry['precision']:.4f} R={entry['recall']:.4f}")
                if audit["violations"]:
                    print(f"⚠ {audit['violations']} false positives have a correctly reported dominator")

                if run_ctx is not None:
                    log_run_report(exact, prefix=f"ftv{suffix}", step=i)
                    log_run_report(approx, prefix=f"ftv_approx{suffix}", step=i)
                    mlflow.log_metric(f"precision{suffix}", entry["precision"], step=i)
                    mlflow.log_metric(f"recall{suffix}", entry["recall"], step=i)
                    mlflow.log_metric(f"f_measure{suffix}", entry["f_measure"], step=i)
                    mlflow.log_metric(f"accuracy{suffix}", entry["accuracy"], step=i)
                    mlflow.log_artifact(accuracy_path, artifact_path=f"accuracy/{tag}")

        summary = {
            "users": len(workload.users),
            "objects": len(workload.objects),
            "h_sweep": h_sweep,
            "results": results,
        }
        with open(metrics_output, "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2)
        print(f"💾 Metrics written to {metrics_output}")
        if run_ctx is not None:
            mlflow.log_artifact(metrics_output)
        print("✓ Stream evaluation completed.")
    finally:
        if run_ctx is not None:
            mlflow.end_run()


if __name__ == "__main__":
    main()
