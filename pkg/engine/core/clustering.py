"""
Similarity between preference relations and hierarchical agglomerative
clustering of users.

Exact kinds compare two clusters through their common relations; the
approximate kinds compare member-frequency vectors, so clusters carry their
members' pair counts (or weight sums) and merge them by addition. All values
are exact rationals.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from engine.core.approximation import DEFAULT_THETA2, approximate_profile, canonical_pairs
from engine.core.preference import (
    ClusterProfile,
    Pair,
    PreferenceRelation,
    ProfileKind,
    UserProfile,
    common_profile,
    intersect_relations,
)

Number = Union[Fraction, float, int]


class SimilarityKind(str, Enum):
    INTERSECTION_SIZE = "intersection"
    JACCARD = "jaccard"
    WEIGHTED_INTERSECTION = "weighted-intersection"
    WEIGHTED_JACCARD = "weighted-jaccard"
    APPROX_JACCARD = "approx-jaccard"
    APPROX_WEIGHTED_JACCARD = "approx-weighted-jaccard"

    @property
    def approximate(self) -> bool:
        return self in (SimilarityKind.APPROX_JACCARD, SimilarityKind.APPROX_WEIGHTED_JACCARD)

    @property
    def weighted(self) -> bool:
        return self in (
            SimilarityKind.WEIGHTED_INTERSECTION,
            SimilarityKind.WEIGHTED_JACCARD,
            SimilarityKind.APPROX_WEIGHTED_JACCARD,
        )


# ---------------------------------------------------------------------------
# Exact measures over two relations
# ---------------------------------------------------------------------------

def _weight_sum(r: PreferenceRelation, mask: np.ndarray) -> Fraction:
    weights = r.value_weights
    total = Fraction(0)
    for x in np.nonzero(mask)[0]:
        total += weights[int(x)]
    return total


def relation_similarity(kind: SimilarityKind, a: PreferenceRelation, b: PreferenceRelation) -> Fraction:
    common = a.closure & b.closure
    if kind is SimilarityKind.INTERSECTION_SIZE:
        return Fraction(int(np.count_nonzero(common)))
    if kind is SimilarityKind.JACCARD:
        union = int(np.count_nonzero(a.closure | b.closure))
        return Fraction(int(np.count_nonzero(common)), union) if union else Fraction(0)
    # weight of a tuple = weight of its better value in the relation holding it
    weighted_common = (_weight_sum(a, common) + _weight_sum(b, common)) / 2
    if kind is SimilarityKind.WEIGHTED_INTERSECTION:
        return weighted_common
    if kind is SimilarityKind.WEIGHTED_JACCARD:
        denominator = (
            weighted_common
            + _weight_sum(a, a.closure & ~b.closure)
            + _weight_sum(b, b.closure & ~a.closure)
        )
        return weighted_common / denominator if denominator else Fraction(0)
    raise ValueError(f"{kind.value} is not an exact similarity kind")


# ---------------------------------------------------------------------------
# Frequency vectors (approximate measures)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrequencyVector:
    attribute: int
    pairs: Tuple[Pair, ...]
    entries: Tuple[Fraction, ...]

    def as_dict(self) -> Dict[Pair, Fraction]:
        return dict(zip(self.pairs, self.entries))


def _member_row(member: UserProfile, d: int, weighted: bool) -> List[Fraction]:
    r = member.relations[d]
    pairs = canonical_pairs(r.domain_size)
    if not weighted:
        return [Fraction(1) if r.closure[x, y] else Fraction(0) for x, y in pairs]
    weights = r.value_weights
    return [weights[x] if r.closure[x, y] else Fraction(0) for x, y in pairs]


def frequency_vector(members: Sequence[UserProfile], d: int, *, weighted: bool = False) -> FrequencyVector:
    if not members:
        raise ValueError("a frequency vector needs at least one member")
    sums = _summed_rows(members, d, weighted)
    n = len(members)
    pairs = canonical_pairs(members[0].relations[d].domain_size)
    return FrequencyVector(d, pairs, tuple(s / n for s in sums))


def _summed_rows(members: Sequence[UserProfile], d: int, weighted: bool) -> List[Fraction]:
    rows = [_member_row(m, d, weighted) for m in members]
    return [sum(column, Fraction(0)) for column in zip(*rows)]


def _ratio_of_min_max(a_sums: Sequence[Fraction], na: int, b_sums: Sequence[Fraction], nb: int) -> Fraction:
    # min(a/na, b/nb) summed over max(a/na, b/nb) summed; scaling both by na*nb cancels
    lows = Fraction(0)
    highs = Fraction(0)
    for a, b in zip(a_sums, b_sums):
        sa, sb = a * nb, b * na
        if sa < sb:
            lows += sa
            highs += sb
        else:
            lows += sb
            highs += sa
    return lows / highs if highs else Fraction(0)


def vector_similarity(a: FrequencyVector, b: FrequencyVector) -> Fraction:
    return _ratio_of_min_max(a.entries, 1, b.entries, 1)


# ---------------------------------------------------------------------------
# Public similarity surface
# ---------------------------------------------------------------------------

def similarity(
    kind: SimilarityKind,
    a: ClusterProfile,
    b: ClusterProfile,
    d: int,
    *,
    users: Optional[Mapping[str, UserProfile]] = None,
) -> Fraction:
    """Similarity of two clusters on attribute ``d``.

    Approximate kinds need the member profiles (``users``) to build frequency
    vectors; exact kinds read the clusters' own relations.
    """
    if kind.approximate:
        if users is None:
            raise ValueError(f"{kind.value} needs the member user profiles")
        va = frequency_vector([users[u] for u in a.members], d, weighted=kind.weighted)
        vb = frequency_vector([users[u] for u in b.members], d, weighted=kind.weighted)
        return vector_similarity(va, vb)
    return relation_similarity(kind, a.relations[d], b.relations[d])


def similarity_total(
    kind: SimilarityKind,
    a: ClusterProfile,
    b: ClusterProfile,
    *,
    users: Optional[Mapping[str, UserProfile]] = None,
    normalize: bool = False,
) -> Fraction:
    total = Fraction(0)
    for d, relation in enumerate(a.relations):
        value = similarity(kind, a, b, d, users=users)
        total += value / relation.domain_size if normalize else value
    return total


# ---------------------------------------------------------------------------
# Dendrogram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Merge:
    left: Tuple[str, ...]
    right: Tuple[str, ...]
    similarity: Fraction


@dataclass
class Dendrogram:
    leaves: Tuple[str, ...]
    merges: List[Merge] = field(default_factory=list)

    def is_monotone(self) -> bool:
        return all(b.similarity <= a.similarity for a, b in zip(self.merges, self.merges[1:]))

    def cut(self, h: Number) -> List[Tuple[str, ...]]:
        """Clusters agglomeration stops at for branch cut ``h``."""
        rank = {leaf: i for i, leaf in enumerate(self.leaves)}
        groups: Dict[str, Tuple[str, ...]] = {leaf: (leaf,) for leaf in self.leaves}
        for merge in self.merges:
            if merge.similarity < h:
                break
            left = groups.pop(merge.left[0])
            right = groups.pop(merge.right[0])
            merged = tuple(sorted(left + right, key=rank.__getitem__))
            groups[merged[0]] = merged
        return sorted(groups.values(), key=lambda g: rank[g[0]])

    def to_text(self) -> str:
        lines = ["# leaves\t" + " ".join(self.leaves)]
        for i, m in enumerate(self.merges, start=1):
            lines.append(
                f"{i}\t{'+'.join(m.left)}\t{'+'.join(m.right)}\t{m.similarity}\t{float(m.similarity):.6f}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Dendrogram":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or not lines[0].startswith("# leaves"):
            raise ValueError("merge log must start with a '# leaves' line")
        leaves = tuple(lines[0].split("\t", 1)[1].split()) if "\t" in lines[0] else ()
        merges = []
        for line in lines[1:]:
            _, left, right, sim, _ = line.split("\t")
            merges.append(Merge(tuple(left.split("+")), tuple(right.split("+")), Fraction(sim)))
        return cls(leaves, merges)


# ---------------------------------------------------------------------------
# Agglomeration
# ---------------------------------------------------------------------------

@dataclass
class _Node:
    rank: int
    members: List[UserProfile]
    profile: ClusterProfile
    sums: Optional[List[List[Fraction]]] = None  # per attribute, approximate kinds only

    @property
    def member_ids(self) -> Tuple[str, ...]:
        return tuple(m.user_id for m in self.members)


def build_cluster_profiles(
    groups: Sequence[Sequence[UserProfile]],
    *,
    approximate: bool = False,
    theta1: Optional[int] = None,
    theta2: Number = DEFAULT_THETA2,
) -> List[ClusterProfile]:
    """Cluster profiles ``U1..Uk`` for already-formed member groups, in the given order."""
    profiles = []
    for i, members in enumerate(groups, start=1):
        cid = f"U{i}"
        if approximate:
            profiles.append(approximate_profile(cid, members, theta1=theta1, theta2=theta2))
        else:
            profiles.append(common_profile(cid, members))
    return profiles


def _node_similarity(kind: SimilarityKind, a: _Node, b: _Node, normalize: bool) -> Fraction:
    total = Fraction(0)
    for d, relation in enumerate(a.profile.relations):
        if kind.approximate:
            value = _ratio_of_min_max(a.sums[d], len(a.members), b.sums[d], len(b.members))
        else:
            value = relation_similarity(kind, relation, b.profile.relations[d])
        total += value / relation.domain_size if normalize else value
    return total


def agglomerate(
    users: Sequence[UserProfile],
    kind: SimilarityKind,
    h: Number,
    *,
    theta1: Optional[int] = None,
    theta2: Number = DEFAULT_THETA2,
    normalize: bool = False,
) -> Tuple[List[ClusterProfile], Dendrogram]:
    """Merge the most similar pair of clusters while its similarity is at least ``h``.

    Merged clusters get fresh profiles (intersection for exact kinds, greedy
    approximation for approximate kinds) before the next round. Ties go to the
    pair with the smallest (min rank, max rank), where a cluster's rank is the
    input position of its first member.
    """
    if not users:
        raise ValueError("agglomerate needs at least one user")
    n_attributes = len(users[0].relations)
    input_rank = {u.user_id: i for i, u in enumerate(users)}

    def make_node(rank: int, members: List[UserProfile], sums=None) -> _Node:
        if kind.approximate:
            profile = approximate_profile("", members, theta1=theta1, theta2=theta2)
        elif len(members) == 1:
            profile = ClusterProfile("", (members[0].user_id,), members[0].relations, ProfileKind.EXACT_COMMON)
        else:
            profile = common_profile("", members)
        return _Node(rank, members, profile, sums)

    nodes: Dict[int, _Node] = {}
    for rank, user in enumerate(users):
        sums = None
        if kind.approximate:
            sums = [_summed_rows([user], d, kind.weighted) for d in range(n_attributes)]
        nodes[rank] = make_node(rank, [user], sums)

    pair_sims: Dict[Tuple[int, int], Fraction] = {}
    ranks = sorted(nodes)
    for i, ra in enumerate(ranks):
        for rb in ranks[i + 1:]:
            pair_sims[(ra, rb)] = _node_similarity(kind, nodes[ra], nodes[rb], normalize)

    dendrogram = Dendrogram(tuple(u.user_id for u in users))
    while pair_sims:
        best_pair, best_sim = None, None
        for pair, sim in pair_sims.items():
            if best_sim is None or sim > best_sim or (sim == best_sim and pair < best_pair):
                best_pair, best_sim = pair, sim
        if best_sim < h:
            break
        ra, rb = best_pair
        a, b = nodes.pop(ra), nodes.pop(rb)
        dendrogram.merges.append(Merge(a.member_ids, b.member_ids, best_sim))

        members = sorted(a.members + b.members, key=lambda m: input_rank[m.user_id])
        if kind.approximate:
            merged_sums = [[x + y for x, y in zip(a.sums[d], b.sums[d])] for d in range(n_attributes)]
            merged = make_node(ra, members, merged_sums)
        else:
            # intersection is associative, so the two common relations suffice
            relations = tuple(
                intersect_relations([a.profile.relations[d], b.profile.relations[d]])
                for d in range(n_attributes)
            )
            merged = _Node(ra, members, ClusterProfile("", tuple(m.user_id for m in members), relations))

        pair_sims = {p: s for p, s in pair_sims.items() if ra not in p and rb not in p}
        for other_rank, other in nodes.items():
            key = (min(ra, other_rank), max(ra, other_rank))
            pair_sims[key] = _node_similarity(kind, merged, other, normalize)
        nodes[ra] = merged

    clusters = []
    for i, rank in enumerate(sorted(nodes), start=1):
        node = nodes[rank]
        p = node.profile
        clusters.append(ClusterProfile(f"U{i}", node.member_ids, p.relations, p.kind))
    return clusters, dendrogram
