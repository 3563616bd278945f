"""Preference posets, Pareto frontier maintenance and user clustering."""
# This module allows the use of the algorithms as a library.

from engine.core.approximation import (
    DEFAULT_THETA2,
    PairFrequencyTable,
    approximate_profile,
    approximate_relations,
    get_approx_preference_tuples,
    pair_frequency_table,
)
from engine.core.clustering import (
    Dendrogram,
    FrequencyVector,
    SimilarityKind,
    agglomerate,
    build_cluster_profiles,
    frequency_vector,
    similarity,
    similarity_total,
)
from engine.core.errors import (
    ConfigError,
    DataError,
    InvariantViolation,
    PreferenceEngineError,
)
from engine.core.filter_verify import (
    FilterThenVerify,
    FilterThenVerifyApprox,
    filter_then_verify_approx_step,
    filter_then_verify_step,
    update_pareto_frontier_u,
)
from engine.core.frontier import (
    Baseline,
    ParetoFrontier,
    TargetIndex,
    baseline_step,
    check_frontier,
    frontier_oracle,
    update_pareto_frontier,
)
from engine.core.preference import (
    ClusterProfile,
    ComparisonCounter,
    Dominance,
    PreferenceRelation,
    ProfileKind,
    UserProfile,
    common_profile,
    dominates,
    intersect_relations,
    maximal_values,
    min_distance_weight,
    relation_from_edges,
    transitive_reduction,
)
from engine.core.schema import AttributeSchema, AttributeSpec, ObjectRecord, ValueBin
from engine.core.sliding_window import (
    BaselineSW,
    FilterThenVerifyApproxSW,
    FilterThenVerifySW,
    ParetoBuffer,
    Window,
    baseline_sw_step,
    ftv_approx_sw_step,
    ftv_sw_step,
    mend_pareto_frontier,
    windowed_frontier_oracle,
)

__all__ = [
    "DEFAULT_THETA2",
    "PairFrequencyTable",
    "approximate_profile",
    "approximate_relations",
    "get_approx_preference_tuples",
    "pair_frequency_table",
    "Dendrogram",
    "FrequencyVector",
    "SimilarityKind",
    "agglomerate",
    "build_cluster_profiles",
    "frequency_vector",
    "similarity",
    "similarity_total",
    "ConfigError",
    "DataError",
    "InvariantViolation",
    "PreferenceEngineError",
    "FilterThenVerify",
    "FilterThenVerifyApprox",
    "filter_then_verify_approx_step",
    "filter_then_verify_step",
    "update_pareto_frontier_u",
    "Baseline",
    "ParetoFrontier",
    "TargetIndex",
    "baseline_step",
    "check_frontier",
    "frontier_oracle",
    "update_pareto_frontier",
    "ClusterProfile",
    "ComparisonCounter",
    "Dominance",
    "PreferenceRelation",
    "ProfileKind",
    "UserProfile",
    "common_profile",
    "dominates",
    "intersect_relations",
    "maximal_values",
    "min_distance_weight",
    "relation_from_edges",
    "transitive_reduction",
    "AttributeSchema",
    "AttributeSpec",
    "ObjectRecord",
    "ValueBin",
    "BaselineSW",
    "FilterThenVerifyApproxSW",
    "FilterThenVerifySW",
    "ParetoBuffer",
    "Window",
    "baseline_sw_step",
    "ftv_approx_sw_step",
    "ftv_sw_step",
    "mend_pareto_frontier",
    "windowed_frontier_oracle",
]
