"""
Run orchestration for the preference dissemination engine.

This module wires the library pieces of ``engine.core`` into runs: it loads
``params.yaml``, validates a typed run configuration, clusters users when the
selected algorithm needs clusters, builds the algorithm instance, streams the
objects through it while counting dominance comparisons and timing every step,
and returns a structured report. Exact runs can additionally be checked against
a reference baseline and the brute-force frontier oracle.
"""

import os
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError, field_validator, model_validator

from engine.core.approximation import DEFAULT_THETA2
from engine.core.clustering import Dendrogram, SimilarityKind, agglomerate, build_cluster_profiles
from engine.core.errors import ConfigError, InvariantViolation
from engine.core.filter_verify import FilterThenVerify, FilterThenVerifyApprox
from engine.core.frontier import Baseline, check_frontier, frontier_oracle
from engine.core.preference import ClusterProfile, ComparisonCounter, ProfileKind, UserProfile
from engine.core.schema import ObjectRecord
from engine.core.sliding_window import (
    BaselineSW,
    FilterThenVerifyApproxSW,
    FilterThenVerifySW,
    check_buffer_laws,
)

load_dotenv()

PARAMS_PATH = os.environ.get("PARAMS_PATH")
if not PARAMS_PATH:  # default to the params.yaml at the project root
    PROJECT_ROOT = os.path.abspath(os.path.dirname(os.path.dirname(__file__)))
    PARAMS_PATH = os.path.join(PROJECT_ROOT, "params.yaml")
else:
    PROJECT_ROOT = os.path.abspath(os.path.dirname(PARAMS_PATH))


def load_params(path: Optional[str] = None) -> Dict[str, Any]:
    params_path = path or PARAMS_PATH
    if not os.path.exists(params_path):
        return {}
    with open(params_path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def resolve_path(relative_path: Optional[str]) -> Optional[str]:
    """Paths in params.yaml are relative to the project root."""
    if relative_path is None or os.path.isabs(relative_path):
        return relative_path
    local = os.path.abspath(relative_path)
    if os.path.exists(local):
        return local
    return os.path.join(PROJECT_ROOT, relative_path)


Algorithm = Literal["baseline", "ftv", "ftv-approx", "baseline-sw", "ftv-sw", "ftv-approx-sw"]

ALGORITHMS = {
    "baseline": Baseline,
    "ftv": FilterThenVerify,
    "ftv-approx": FilterThenVerifyApprox,
    "baseline-sw": BaselineSW,
    "ftv-sw": FilterThenVerifySW,
    "ftv-approx-sw": FilterThenVerifyApproxSW,
}


def is_windowed(algorithm: str) -> bool:
    return algorithm.endswith("-sw")


def is_approximate(algorithm: str) -> bool:
    return "approx" in algorithm


def is_clustered(algorithm: str) -> bool:
    return algorithm.startswith("ftv")


class RunConfig(BaseModel):
    algorithm: Algorithm = "baseline"
    similarity: SimilarityKind = SimilarityKind.WEIGHTED_JACCARD
    h: float = 0.5
    normalize: bool = False
    theta1: Optional[int] = None
    theta2: float = float(DEFAULT_THETA2)
    window: Optional[int] = None
    seed: int = 0
    schema_path: Optional[str] = None
    objects_path: Optional[str] = None
    prefs_path: Optional[str] = None
    clusters_path: Optional[str] = None
    assert_oracle: bool = False
    trace: bool = False

    @field_validator("theta2")
    @classmethod
    def _theta2_range(cls, value: float) -> float:
        if not 0 <= value < 1:
            raise ValueError("theta2 must lie in [0, 1)")
        return value

    @field_validator("theta1")
    @classmethod
    def _theta1_positive(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("theta1 must be a positive integer")
        return value

    @model_validator(mode="after")
    def _window_iff_windowed(self) -> "RunConfig":
        if is_windowed(self.algorithm):
            if self.window is None:
                raise ValueError(f"algorithm {self.algorithm!r} needs a window size")
            if self.window < 1:
                raise ValueError("window must be a positive integer")
        elif self.window is not None:
            raise ValueError(f"algorithm {self.algorithm!r} is append-only; drop the window size")
        return self

    @property
    def theta2_exact(self) -> Fraction:
        return Fraction(str(self.theta2))


def config_from_params(params: Optional[Dict[str, Any]] = None, **overrides: Any) -> RunConfig:
    """Merge params.yaml sections with explicit overrides (None means "not given")."""
    params = params if params is not None else load_params()
    clustering = params.get("clustering", {}) or {}
    approximation = params.get("approximation", {}) or {}
    stream = params.get("stream", {}) or {}
    values: Dict[str, Any] = {
        "algorithm": stream.get("algorithm"),
        "window": stream.get("window"),
        "similarity": clustering.get("similarity"),
        "h": clustering.get("h"),
        "normalize": clustering.get("normalize"),
        "theta1": approximation.get("theta1"),
        "theta2": approximation.get("theta2"),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    # a window configured for windowed runs must not leak into append-only ones
    algorithm = values.get("algorithm") or "baseline"
    if not is_windowed(algorithm) and overrides.get("window") is None:
        values["window"] = None
    try:
        return RunConfig(**{k: v for k, v in values.items() if v is not None})
    except ValidationError as exc:
        raise ConfigError(f"invalid run configuration: {exc}") from exc


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class StepRecord(BaseModel):
    step: int
    object_id: str
    targets: List[str]
    target_count: int
    comparisons: int
    cluster_comparisons: int = 0
    member_comparisons: int = 0
    cumulative_comparisons: int
    wall_time_s: float
    cumulative_time_s: float


class RunReport(BaseModel):
    algorithm: str
    config: RunConfig
    clusters: Dict[str, List[str]] = {}
    steps: List[StepRecord] = []
    total_comparisons: int = 0
    comparisons_by_scope: Dict[str, int] = {}
    wall_time_s: float = 0.0
    universe: List[str] = []
    user_frontiers: Dict[str, List[str]] = {}
    cluster_frontiers: Dict[str, List[str]] = {}
    trace: List[Dict[str, str]] = []


# ---------------------------------------------------------------------------
# Clustering and engine construction
# ---------------------------------------------------------------------------

def cluster_users(
    users: Sequence[UserProfile],
    config: RunConfig,
    *,
    groups: Optional[Sequence[Sequence[str]]] = None,
) -> Tuple[List[ClusterProfile], Optional[Dendrogram]]:
    """Cluster profiles for a run.

    ``groups`` (lists of user ids) bypass agglomeration. The profile kind
    follows the algorithm: approximate algorithms get approximate relations
    for whatever grouping the similarity kind produced.
    """
    dendrogram = None
    by_id = {u.user_id: u for u in users}
    if groups is None:
        found, dendrogram = agglomerate(
            users, config.similarity, config.h,
            theta1=config.theta1, theta2=config.theta2_exact, normalize=config.normalize,
        )
        groups = [c.members for c in found]
        if not is_approximate(config.algorithm) and not config.similarity.approximate:
            return found, dendrogram
    member_groups = [[by_id[uid] for uid in group] for group in groups]
    profiles = build_cluster_profiles(
        member_groups,
        approximate=is_approximate(config.algorithm),
        theta1=config.theta1,
        theta2=config.theta2_exact,
    )
    return profiles, dendrogram


def build_engine(
    config: RunConfig,
    users: Sequence[UserProfile],
    clusters: Optional[Sequence[ClusterProfile]] = None,
    *,
    counter: Optional[ComparisonCounter] = None,
):
    factory = ALGORITHMS[config.algorithm]
    if not is_clustered(config.algorithm):
        if is_windowed(config.algorithm):
            return factory(users, config.window, counter=counter)
        return factory(users, counter=counter)
    if clusters is None:
        raise ConfigError(f"algorithm {config.algorithm!r} needs clusters")
    wanted = ProfileKind.APPROXIMATE if is_approximate(config.algorithm) else ProfileKind.EXACT_COMMON
    for cluster in clusters:
        if cluster.kind is not wanted:
            raise ConfigError(
                f"algorithm {config.algorithm!r} expects {wanted.value} cluster profiles, "
                f"{cluster.cluster_id} is {cluster.kind.value}"
            )
    if is_windowed(config.algorithm):
        return factory(clusters, users, config.window, counter=counter)
    return factory(clusters, users, counter=counter)


# ---------------------------------------------------------------------------
# Streaming
# ---------------------------------------------------------------------------

class _OracleCheck:
    """Shadow baseline run plus end-of-run brute force, for exact algorithms."""

    def __init__(self, config: RunConfig, users: Sequence[UserProfile]):
        self.users = list(users)
        self.window = config.window
        if is_windowed(config.algorithm):
            self.reference = BaselineSW(users, config.window)
        else:
            self.reference = Baseline(users)
        self.exact = not is_approximate(config.algorithm)
        self.seen: List[ObjectRecord] = []

    def observe(self, o: ObjectRecord, targets, engine) -> None:
        self.seen.append(o)
        expected = self.reference.step(o)
        if self.exact and set(targets) != expected:
            raise InvariantViolation(
                f"object {o.id!r}: {engine.name} reported {sorted(targets)}, baseline reported {sorted(expected)}"
            )
        engine.index.verify(engine.frontiers)
        if hasattr(engine, "buffers"):
            check_buffer_laws(engine.frontiers, engine.buffers, {u.user_id: u for u in self.users})
        if hasattr(engine, "cluster_buffers"):
            check_buffer_laws(
                engine.cluster_frontiers, engine.cluster_buffers, {c.cluster_id: c for c in engine.clusters}
            )

    def finish(self, engine) -> None:
        alive = self.seen[-self.window:] if self.window else self.seen
        for user in self.users:
            frontier = engine.frontiers[user.user_id]
            check_frontier(frontier, user)
            if not self.exact:
                continue
            expected = frontier_oracle(alive, user)
            if frontier.id_set() != expected:
                raise InvariantViolation(
                    f"final frontier of {user.user_id!r} is {sorted(frontier.id_set())}, oracle gives {sorted(expected)}"
                )


def run_stream(
    engine,
    objects: Sequence[ObjectRecord],
    config: RunConfig,
    *,
    users: Optional[Sequence[UserProfile]] = None,
    on_step: Optional[Callable[[StepRecord], None]] = None,
) -> RunReport:
    """Stream ``objects`` through ``engine`` in order and collect a report."""
    oracle = None
    if config.assert_oracle:
        if users is None:
            raise ConfigError("oracle assertions need the user profiles")
        oracle = _OracleCheck(config, users)

    counter: ComparisonCounter = engine.counter
    steps: List[StepRecord] = []
    trace: List[Dict[str, str]] = []
    cumulative_time = 0.0
    for i, o in enumerate(objects, start=1):
        before = counter.snapshot()
        started = time.perf_counter()
        targets = engine.step(o)
        elapsed = time.perf_counter() - started
        cumulative_time += elapsed
        after = counter.snapshot()

        def delta(scope: str) -> int:
            return after.get(scope, 0) - before.get(scope, 0)

        record = StepRecord(
            step=i,
            object_id=o.id,
            targets=sorted(targets),
            target_count=len(targets),
            comparisons=sum(after.values()) - sum(before.values()),
            cluster_comparisons=delta("cluster"),
            member_comparisons=delta("member"),
            cumulative_comparisons=counter.total,
            wall_time_s=elapsed,
            cumulative_time_s=cumulative_time,
        )
        steps.append(record)
        if on_step is not None:
            on_step(record)
        if oracle is not None:
            oracle.observe(o, targets, engine)
        if config.trace and hasattr(engine, "trace_rows"):
            trace.extend(engine.trace_rows(i, o.id))

    if oracle is not None:
        oracle.finish(engine)

    if hasattr(engine, "window"):
        universe = engine.window.alive_ids()
    else:
        universe = [o.id for o in objects]
    cluster_frontiers: Dict[str, List[str]] = {}
    clusters: Dict[str, List[str]] = {}
    if hasattr(engine, "cluster_frontiers"):
        cluster_frontiers = {cid: f.ids() for cid, f in engine.cluster_frontiers.items()}
        clusters = {c.cluster_id: list(c.members) for c in engine.clusters}
    return RunReport(
        algorithm=engine.name,
        config=config,
        clusters=clusters,
        steps=steps,
        total_comparisons=counter.total,
        comparisons_by_scope=counter.snapshot(),
        wall_time_s=cumulative_time,
        universe=universe,
        user_frontiers={uid: f.ids() for uid, f in engine.frontiers.items()},
        cluster_frontiers=cluster_frontiers,
        trace=trace,
    )


def execute(
    config: RunConfig,
    users: Sequence[UserProfile],
    objects: Sequence[ObjectRecord],
    *,
    groups: Optional[Sequence[Sequence[str]]] = None,
    verbose: bool = True,
) -> RunReport:
    """Cluster (if needed), build the engine and run the stream."""
    clusters = None
    if is_clustered(config.algorithm):
        clusters, _ = cluster_users(users, config, groups=groups)
        if verbose:
            print(f"✓ {len(clusters)} clusters over {len(users)} users ({config.similarity.value}, h={config.h})")
    engine = build_engine(config, users, clusters)
    if verbose:
        print(f"🔍 Streaming {len(objects)} objects through {engine.name}...")
    report = run_stream(engine, objects, config, users=users)
    if verbose:
        print(f"📊 {report.total_comparisons} dominance comparisons in {report.wall_time_s:.3f}s")
    return report

