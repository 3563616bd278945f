"""
Poset algebra over categorical attribute domains and object dominance.

A PreferenceRelation stores the transitive closure of one user's (or one
cluster's) preference tuples on one attribute as a read-only boolean matrix:
``closure[x, y]`` is True iff value ``x`` is preferred to value ``y``. The
matrix is closed eagerly on construction, so a dominance test is a handful of
bit lookups per attribute. The Hasse view (transitive reduction) and the
per-value weights used by the weighted similarity measures are derived lazily
with networkx and cached on the relation.
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from engine.core.errors import (
    AttributeMismatch,
    CycleError,
    SchemaMismatch,
    UnknownValue,
    UnreachableValue,
)
from engine.core.schema import ObjectRecord

Pair = Tuple[int, int]


def close_matrix(matrix: np.ndarray) -> np.ndarray:
    """Floyd-Warshall style boolean closure. Returns a new array."""
    closure = matrix.astype(bool, copy=True)
    for k in range(closure.shape[0]):
        closure |= np.outer(closure[:, k], closure[k, :])
    return closure


class PreferenceRelation:
    """A strict partial order over one attribute's value ids."""

    def __init__(self, attribute: int, closure: np.ndarray):
        closure = np.array(closure, dtype=bool, copy=True)
        closure.setflags(write=False)
        self.attribute = attribute
        self.closure = closure
        # row masks: bit y of _better[x] is set iff x is preferred to y
        self._better: Tuple[int, ...] = tuple(
            sum(1 << int(y) for y in np.flatnonzero(row)) for row in closure
        )

    @property
    def domain_size(self) -> int:
        return self.closure.shape[0]

    @property
    def better_masks(self) -> Tuple[int, ...]:
        return self._better

    def prefers(self, x: int, y: int) -> bool:
        return bool(self._better[x] >> y & 1)

    def __contains__(self, pair: Pair) -> bool:
        x, y = pair
        return self.prefers(x, y)

    def __len__(self) -> int:
        return int(np.count_nonzero(self.closure))

    def tuples(self) -> List[Pair]:
        """Closure tuples in lexicographic (better, worse) order."""
        xs, ys = np.nonzero(self.closure)
        return [(int(x), int(y)) for x, y in zip(xs, ys)]

    def tuple_set(self) -> FrozenSet[Pair]:
        return frozenset(self.tuples())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PreferenceRelation):
            return NotImplemented
        return (
            self.attribute == other.attribute
            and self.closure.shape == other.closure.shape
            and bool(np.array_equal(self.closure, other.closure))
        )

    def __hash__(self) -> int:
        return hash((self.attribute, self.closure.shape[0], self.closure.tobytes()))

    def __repr__(self) -> str:
        return f"PreferenceRelation(attribute={self.attribute}, tuples={self.tuples()})"

    def issubset(self, other: "PreferenceRelation") -> bool:
        return not bool(np.any(self.closure & ~other.closure))

    @cached_property
    def hasse(self) -> "HasseView":
        return transitive_reduction(self)

    @cached_property
    def value_weights(self) -> Tuple[Fraction, ...]:
        """Weight of every value: 1 / (Hasse distance from the nearest maximal value + 1)."""
        maximal = maximal_values(self)
        graph = self.hasse.to_graph()
        distances = nx.multi_source_dijkstra_path_length(graph, maximal)
        weights = []
        for v in range(self.domain_size):
            if v not in distances:
                raise UnreachableValue(
                    f"value {v} of attribute {self.attribute} is not reachable from a maximal value"
                )
            weights.append(Fraction(1, distances[v] + 1))
        return tuple(weights)


@dataclass(frozen=True)
class HasseView:
    """Transitive reduction of a relation: the cover edges of the poset."""

    attribute: int
    domain_size: int
    edges: Tuple[Pair, ...]

    def to_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.domain_size))
        graph.add_edges_from(self.edges)
        return graph

    def adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {v: [] for v in range(self.domain_size)}
        for x, y in self.edges:
            adj[x].append(y)
        return adj


def relation_from_edges(
    attribute: int, edges: Iterable[Pair], *, domain_size: int, attribute_name: Optional[str] = None
) -> PreferenceRelation:
    """Close a set of preference tuples into a strict partial order."""
    name = attribute_name or str(attribute)
    matrix = np.zeros((domain_size, domain_size), dtype=bool)
    for x, y in edges:
        for v in (x, y):
            if not 0 <= v < domain_size:
                raise UnknownValue(name, v)
        if x == y:
            raise CycleError(f"attribute {name}: tuple ({x}, {x}) is reflexive")
        matrix[x, y] = True
    closure = close_matrix(matrix)
    if closure.diagonal().any():
        looping = [int(v) for v in np.flatnonzero(closure.diagonal())]
        raise CycleError(f"attribute {name}: preference tuples form a cycle through values {looping}")
    return PreferenceRelation(attribute, closure)


def empty_relation(attribute: int, domain_size: int) -> PreferenceRelation:
    return PreferenceRelation(attribute, np.zeros((domain_size, domain_size), dtype=bool))


def intersect_relations(rs: Sequence[PreferenceRelation]) -> PreferenceRelation:
    """Per-attribute intersection. Intersections of strict partial orders are closed already."""
    if not rs:
        raise AttributeMismatch("cannot intersect an empty list of relations")
    first = rs[0]
    for r in rs[1:]:
        if r.attribute != first.attribute or r.domain_size != first.domain_size:
            raise AttributeMismatch(
                f"relation over attribute {r.attribute} (|dom|={r.domain_size}) cannot be "
                f"intersected with attribute {first.attribute} (|dom|={first.domain_size})"
            )
    closure = np.logical_and.reduce([r.closure for r in rs])
    return PreferenceRelation(first.attribute, closure)


def transitive_reduction(r: PreferenceRelation) -> HasseView:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(r.domain_size))
    graph.add_edges_from(r.tuples())
    reduced = nx.transitive_reduction(graph)
    return HasseView(r.attribute, r.domain_size, tuple(sorted(reduced.edges())))


def maximal_values(r: PreferenceRelation) -> FrozenSet[int]:
    return frozenset(int(v) for v in np.flatnonzero(~r.closure.any(axis=0)))


def min_distance_weight(r: PreferenceRelation, v: int) -> Fraction:
    if not 0 <= v < r.domain_size:
        raise UnknownValue(str(r.attribute), v)
    return r.value_weights[v]


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

class ProfileKind(str, Enum):
    USER = "user"
    EXACT_COMMON = "exact-common"
    APPROXIMATE = "approximate"


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    relations: Tuple[PreferenceRelation, ...]

    @property
    def holder_id(self) -> str:
        return self.user_id

    @property
    def kind(self) -> ProfileKind:
        return ProfileKind.USER

    @cached_property
    def masks(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(r.better_masks for r in self.relations)


@dataclass(frozen=True)
class ClusterProfile:
    """A virtual user standing for a set of member users."""

    cluster_id: str
    members: Tuple[str, ...]
    relations: Tuple[PreferenceRelation, ...]
    kind: ProfileKind = ProfileKind.EXACT_COMMON

    @property
    def holder_id(self) -> str:
        return self.cluster_id

    @cached_property
    def masks(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(r.better_masks for r in self.relations)


Profile = Union[UserProfile, ClusterProfile]


def common_profile(cluster_id: str, members: Sequence[UserProfile]) -> ClusterProfile:
    """Exact virtual user: per-attribute intersection of the members' relations."""
    relations = tuple(
        intersect_relations([m.relations[d] for m in members]) for d in range(len(members[0].relations))
    )
    return ClusterProfile(cluster_id, tuple(m.user_id for m in members), relations, ProfileKind.EXACT_COMMON)


# ---------------------------------------------------------------------------
# Dominance
# ---------------------------------------------------------------------------

class Dominance(Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    IDENTICAL = "identical"
    INCOMPARABLE = "incomparable"


class ComparisonCounter:
    """Counts dominance tests per scope (user, cluster, member)."""

    def __init__(self) -> None:
        self.by_scope: Counter = Counter()

    def tick(self, scope: str) -> None:
        self.by_scope[scope] += 1

    @property
    def total(self) -> int:
        return sum(self.by_scope.values())

    def snapshot(self) -> Dict[str, int]:
        return dict(self.by_scope)

    def reset(self) -> None:
        self.by_scope.clear()


def dominates(
    a: ObjectRecord,
    b: ObjectRecord,
    profile: Profile,
    *,
    counter: Optional[ComparisonCounter] = None,
    scope: str = "user",
) -> Dominance:
    """Compare ``a`` against ``b`` under ``profile``."""
    if counter is not None:
        counter.tick(scope)
    av, bv = a.values, b.values
    masks = profile.masks
    if len(av) != len(masks) or len(bv) != len(masks):
        raise SchemaMismatch(
            f"objects {a.id!r}/{b.id!r} have {len(av)}/{len(bv)} values, profile has {len(masks)} attributes"
        )
    a_better = b_better = False
    for better, x, y in zip(masks, av, bv):
        if x == y:
            continue
        if better[x] >> y & 1:
            if b_better:
                return Dominance.INCOMPARABLE
            a_better = True
        elif better[y] >> x & 1:
            if a_better:
                return Dominance.INCOMPARABLE
            b_better = True
        else:
            return Dominance.INCOMPARABLE
    if a_better:
        return Dominance.DOMINATES
    if b_better:
        return Dominance.DOMINATED_BY
    return Dominance.IDENTICAL
