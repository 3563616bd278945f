"""
Command-line front end.

    python pareto_cli.py gen      --seed 7 --out data/workload
    python pareto_cli.py cluster  --schema S --prefs P --sim weighted-jaccard --h 0.25 --out data/clusters
    python pareto_cli.py run      --algo ftv --schema S --objects O --prefs P --h 0.5 --out data/runs/ftv
    python pareto_cli.py evaluate data/runs/ftv data/runs/ftv-approx --out metrics/accuracy.csv
    python pareto_cli.py oracle   --schema S --objects O --prefs P [--window 5] --out oracle.csv

Exit codes: 0 success, 1 configuration error, 2 data error, 3 invariant violation.
"""

import argparse
import os
import sys
from typing import List, Optional

import pandas as pd

from engine.core.clustering import SimilarityKind, agglomerate
from engine.core.errors import ConfigError, PreferenceEngineError, SchemaMismatch
from engine.core.frontier import frontier_oracle
from engine.core.sliding_window import windowed_frontier_oracle
from engine.stream_engine import config_from_params, execute, load_params, resolve_path
from evaluation.data_loading import load_run_artifacts, write_run_outputs
from evaluation.metrics import accuracy_metrics, write_accuracy_csv
from ingestion.data_ingestion import spec_from_params
from ingestion.loaders import load_clusters, load_objects, load_profiles, load_schema, save_clusters
from ingestion.workload import generate_workload, save_workload

QUIET = False


def say(message: str) -> None:
    if not QUIET:
        print(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ConfigError(message)


def _inputs(args, params):
    ingestion = params.get("ingestion", {}) or {}
    schema_path = resolve_path(args.schema or ingestion.get("schema"))
    prefs_path = resolve_path(args.prefs or ingestion.get("prefs"))
    if not schema_path or not prefs_path:
        raise ConfigError("--schema and --prefs are required (or set ingestion.schema / ingestion.prefs)")
    schema = load_schema(schema_path)
    users = load_profiles(prefs_path, schema)
    objects, objects_path = None, None
    if hasattr(args, "objects"):
        objects_path = resolve_path(args.objects or ingestion.get("objects"))
        if not objects_path:
            raise ConfigError("--objects is required (or set ingestion.objects)")
        objects = load_objects(objects_path, schema)
    paths = {"schema_path": schema_path, "prefs_path": prefs_path, "objects_path": objects_path}
    return schema, users, objects, paths


def cmd_gen(args, params) -> int:
    spec = spec_from_params(
        params, seed=args.seed, users=args.users, archetypes=args.archetypes, objects=args.objects_count,
        attributes=args.attributes, domain_size=args.domain_size, noise=args.noise, drop=args.drop,
    )
    out_dir = args.out or (params.get("ingestion", {}) or {}).get("workload_dir", "data/workload")
    paths = save_workload(generate_workload(spec), out_dir)
    say(f"✓ Workload generated (seed {spec.seed})")
    for path in paths.values():
        say(f"  💾 {path}")
    return 0


def cmd_cluster(args, params) -> int:
    _, users, _, _ = _inputs(args, params)
    config = config_from_params(
        params, similarity=args.sim, h=args.h, theta1=args.theta1, theta2=args.theta2,
        normalize=args.normalize or None,
    )
    clusters, dendrogram = agglomerate(
        users, config.similarity, config.h,
        theta1=config.theta1, theta2=config.theta2_exact, normalize=config.normalize,
    )
    out_dir = args.out or "data/clusters"
    os.makedirs(out_dir, exist_ok=True)
    save_clusters({c.cluster_id: c.members for c in clusters}, os.path.join(out_dir, "clusters.csv"))
    with open(os.path.join(out_dir, "dendrogram.txt"), "w", encoding="utf-8") as f:
        f.write(dendrogram.to_text())
    say(f"✓ {len(clusters)} clusters ({config.similarity.value}, h={config.h})")
    for c in clusters:
        say(f"  {c.cluster_id}: {' '.join(c.members)}")
    if not dendrogram.is_monotone():
        say("⚠ merge similarities are not monotone for this similarity kind")
    say(f"  💾 {out_dir}")
    return 0


def cmd_run(args, params) -> int:
    _, users, objects, paths = _inputs(args, params)
    stream = params.get("stream", {}) or {}
    config = config_from_params(
        params, algorithm=args.algo, similarity=args.sim, h=args.h, theta1=args.theta1, theta2=args.theta2,
        window=args.window, seed=args.seed, normalize=args.normalize or None,
        assert_oracle=args.assert_oracle or None, trace=args.trace or None,
        clusters_path=args.clusters, **paths,
    )
    groups = load_clusters(args.clusters) if args.clusters else None
    report = execute(config, users, objects, groups=groups, verbose=not QUIET)
    out_dir = args.out or os.path.join(stream.get("out_dir", "data/runs"), config.algorithm)
    written = write_run_outputs(report, out_dir)
    for path in written.values():
        say(f"  💾 {path}")
    return 0


def cmd_evaluate(args, params) -> int:
    exact = load_run_artifacts(args.exact)
    approx = load_run_artifacts(args.approx)
    if exact.universe != approx.universe:
        raise SchemaMismatch("the two runs were made over different object universes")
    report = accuracy_metrics(exact.user_frontiers, approx.user_frontiers, universe=exact.universe)
    out_path = args.out or os.path.join(args.approx, "accuracy.csv")
    write_accuracy_csv(report, out_path)
    say(f"📊 precision={float(report.precision):.4f} recall={float(report.recall):.4f} "
        f"F={float(report.f_measure):.4f} accuracy={float(report.accuracy):.4f}")
    say(f"  💾 {out_path}")
    return 0


def cmd_oracle(args, params) -> int:
    _, users, objects, _ = _inputs(args, params)
    rows = []
    if args.window:
        for step, frontiers in enumerate(windowed_frontier_oracle(objects, users, args.window), start=1):
            for user in users:
                rows.append({"step": step, "user_id": user.user_id,
                             "frontier": " ".join(o.id for o in objects if o.id in frontiers[user.user_id])})
        frame = pd.DataFrame(rows, columns=["step", "user_id", "frontier"])
    else:
        for user in users:
            members = frontier_oracle(objects, user)
            rows.append({"user_id": user.user_id, "frontier": " ".join(o.id for o in objects if o.id in members)})
        frame = pd.DataFrame(rows, columns=["user_id", "frontier"])
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        frame.to_csv(args.out, index=False)
        say(f"  💾 {args.out}")
    else:
        frame.to_csv(sys.stdout, index=False)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pareto_cli", description="Pareto frontier dissemination over preference streams")
    parser.add_argument("--params", default=None, help="params.yaml location (default: PARAMS_PATH or project root)")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def inputs(p, with_objects: bool = True):
        p.add_argument("--schema")
        p.add_argument("--prefs")
        if with_objects:
            p.add_argument("--objects")

    def clustering(p):
        p.add_argument("--sim", choices=[k.value for k in SimilarityKind])
        p.add_argument("--h", type=float)
        p.add_argument("--theta1", type=int)
        p.add_argument("--theta2", type=float)
        p.add_argument("--normalize", action="store_true", help="divide per-attribute similarity by |dom|")

    gen = sub.add_parser("gen", help="generate a seeded synthetic workload")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--users", type=int)
    gen.add_argument("--archetypes", type=int)
    gen.add_argument("--objects", dest="objects_count", type=int)
    gen.add_argument("--attributes", type=int)
    gen.add_argument("--domain-size", type=int)
    gen.add_argument("--noise", type=float)
    gen.add_argument("--drop", type=float)
    gen.add_argument("--out")
    gen.set_defaults(handler=cmd_gen)

    cluster = sub.add_parser("cluster", help="agglomerate users into clusters")
    inputs(cluster, with_objects=False)
    clustering(cluster)
    cluster.add_argument("--out")
    cluster.set_defaults(handler=cmd_cluster)

    run = sub.add_parser("run", help="stream objects through an algorithm")
    inputs(run)
    clustering(run)
    run.add_argument("--algo", choices=["baseline", "ftv", "ftv-approx", "baseline-sw", "ftv-sw", "ftv-approx-sw"])
    run.add_argument("--window", type=int)
    run.add_argument("--clusters", help="cluster assignment CSV; skips agglomeration")
    run.add_argument("--seed", type=int)
    run.add_argument("--assert-oracle", action="store_true", help="check every step against the baseline oracle")
    run.add_argument("--trace", action="store_true", help="write per-step frontier/buffer rows to trace.csv")
    run.add_argument("--out")
    run.set_defaults(handler=cmd_run)

    evaluate = sub.add_parser("evaluate", help="accuracy of an approximate run against an exact run")
    evaluate.add_argument("exact")
    evaluate.add_argument("approx")
    evaluate.add_argument("--out")
    evaluate.set_defaults(handler=cmd_evaluate)

    oracle = sub.add_parser("oracle", help="brute-force frontiers for fixture diffing")
    inputs(oracle)
    oracle.add_argument("--window", type=int)
    oracle.add_argument("--out")
    oracle.set_defaults(handler=cmd_oracle)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    global QUIET
    try:
        args = build_parser().parse_args(argv)
        QUIET = args.quiet
        params = load_params(args.params)
        if getattr(args, "window", None) is not None and args.window < 1:
            raise ConfigError("--window must be a positive integer")
        return args.handler(args, params)
    except PreferenceEngineError as exc:
        print(f"⚠ {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
