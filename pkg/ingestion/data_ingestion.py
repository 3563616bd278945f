"""
Workload Generation Stage

Produces the inputs every downstream stage reads from data/workload/:

Pipeline Steps:
1. Read the `workload` section of params.yaml into a WorkloadSpec
2. Generate archetype-based user profiles and a uniform object stream
3. Save schema, objects, preferences and archetype labels
4. Optionally simulate profiles from an interaction log instead of archetypes

Output:
- data/workload/schema.yaml, objects.csv, prefs.csv, labels.csv
"""

import argparse
import os
from typing import Any, Dict, Optional

from pydantic import ValidationError

from engine.core.errors import ConfigError
from engine.stream_engine import load_params, resolve_path
from ingestion.loaders import load_count_log, load_rating_log, load_schema, save_profiles
from ingestion.simulate import select_active_users, simulate_profiles_counts, simulate_profiles_rating
from ingestion.workload import WorkloadSpec, generate_workload, save_workload


def spec_from_params(params: Dict[str, Any], **overrides: Any) -> WorkloadSpec:
    values = dict(params.get("workload", {}) or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    values.pop("out_dir", None)
    try:
        return WorkloadSpec(**values)
    except ValidationError as exc:
        raise ConfigError(f"invalid workload spec: {exc}") from exc


def simulate_from_log(ingestion_params: Dict[str, Any]) -> Optional[str]:
    """Simulate preferences from the configured interaction log, if any."""
    log_path = ingestion_params.get("interaction_log")
    if not log_path:
        return None
    schema = load_schema(resolve_path(ingestion_params["log_schema"]))
    kind = ingestion_params.get("log_kind", "rating")
    top_users = ingestion_params.get("active_users")
    if kind == "rating":
        log = load_rating_log(resolve_path(log_path))
        users = select_active_users(log, top_users) if top_users else None
        profiles = simulate_profiles_rating(log, schema, users=users)
    elif kind == "counts":
        log = load_count_log(resolve_path(log_path))
        users = select_active_users(log, top_users) if top_users else None
        profiles = simulate_profiles_counts(log, schema, users=users)
    else:
        raise ConfigError(f"unknown log_kind {kind!r}; expected 'rating' or 'counts'")
    out_path = resolve_path(ingestion_params.get("simulated_prefs", "data/simulated/prefs.csv"))
    save_profiles(profiles, schema, out_path)
    print(f"✓ Simulated {len(profiles)} profiles from {log_path}")
    return out_path


def main(argv=None):
    parser = argparse.ArgumentParser(description="Generate the synthetic workload")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    params = load_params()
    ingestion_params = params.get("ingestion", {}) or {}

    # -------------------------------------------------------------------------
    # Stage 1: Synthetic workload
    # -------------------------------------------------------------------------
    spec = spec_from_params(params, seed=args.seed)
    out_dir = resolve_path(args.out or ingestion_params.get("workload_dir", "data/workload"))
    print(f"🔍 Generating workload: {spec.users} users / {spec.archetypes} archetypes, "
          f"{spec.objects} objects, d={spec.attributes}, |dom|={spec.domain_size} (seed {spec.seed})")
    workload = generate_workload(spec)
    paths = save_workload(workload, out_dir)

    # -------------------------------------------------------------------------
    # Stage 2: Optional simulation from an interaction log
    # -------------------------------------------------------------------------
    simulated = simulate_from_log(ingestion_params)

    print(f"✓ Ingestion complete: {len(workload.users)} users, {len(workload.objects)} objects")
    for path in paths.values():
        print(f"  → {os.path.relpath(path)}")
    if simulated:
        print(f"  → {os.path.relpath(simulated)}")


if __name__ == "__main__":
    main()
