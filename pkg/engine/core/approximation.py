"""
Approximate common preference relations.

A cluster's exact common relation (the intersection of its members'
relations) shrinks quickly as clusters grow, which weakens the cluster-level
filter. The approximate relation starts from the common tuples and greedily
adds the most frequent member tuples, as long as the result stays a strict
partial order, is smaller than ``theta1`` closure tuples, and the next tuple
is held by more than a ``theta2`` fraction of the members.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from engine.core.preference import (
    ClusterProfile,
    Pair,
    PreferenceRelation,
    ProfileKind,
    UserProfile,
    intersect_relations,
)

DEFAULT_THETA2 = Fraction(3, 5)


@lru_cache(maxsize=None)
def canonical_pairs(domain_size: int) -> Tuple[Pair, ...]:
    """Ordered pairs of distinct value ids, lexicographic by (better, worse)."""
    return tuple((x, y) for x in range(domain_size) for y in range(domain_size) if x != y)


@dataclass(frozen=True)
class PairFrequencyTable:
    """Pairs of one attribute sorted by member frequency (descending, ties by pair)."""

    attribute: int
    domain_size: int
    member_count: int
    rows: Tuple[Tuple[Pair, Fraction], ...]

    def frequency(self, pair: Pair) -> Fraction:
        for p, freq in self.rows:
            if p == pair:
                return freq
        raise KeyError(pair)


def pair_frequency_table(members: Sequence[UserProfile], d: int) -> PairFrequencyTable:
    if not members:
        raise ValueError("a frequency table needs at least one member")
    counts = np.sum([m.relations[d].closure for m in members], axis=0, dtype=np.int64)
    n = len(members)
    size = counts.shape[0]
    rows = [((x, y), Fraction(int(counts[x, y]), n)) for x, y in canonical_pairs(size)]
    rows.sort(key=lambda row: (-row[1], row[0]))
    return PairFrequencyTable(d, size, n, tuple(rows))


def default_theta1(common_size: int) -> int:
    return 7 * common_size + 7


def get_approx_preference_tuples(
    table: PairFrequencyTable,
    theta1: int,
    theta2: Union[Fraction, float],
    *,
    common: Optional[PreferenceRelation] = None,
) -> PreferenceRelation:
    """Greedy construction of an approximate common relation from a frequency table.

    Frequency-1 pairs are always kept. The scan then stops at the first pair
    reached while the relation already has ``theta1`` closure tuples, or whose
    frequency is at most ``theta2``. A pair whose reverse is already implied
    is skipped; an admitted pair is closed into the relation.
    """
    if theta1 < 1:
        raise ValueError("theta1 must be a positive integer")
    # 0.6 must mean exactly 3/5
    theta2 = Fraction(str(theta2)) if isinstance(theta2, float) else Fraction(theta2)
    if not 0 <= theta2 < 1:
        raise ValueError("theta2 must lie in [0, 1)")
    size = table.domain_size
    closure = np.zeros((size, size), dtype=bool)
    for (x, y), freq in table.rows:
        if freq == 1:
            closure[x, y] = True
    if common is not None:
        closure |= common.closure

    for (x, y), freq in table.rows:
        if freq == 1:
            continue
        if int(np.count_nonzero(closure)) >= theta1 or freq <= theta2:
            break
        if closure[y, x]:
            continue
        if closure[x, y]:
            continue
        above = closure[:, x].copy()
        above[x] = True
        below = closure[y, :].copy()
        below[y] = True
        closure |= np.outer(above, below)
    return PreferenceRelation(table.attribute, closure)


def approximate_relations(
    members: Sequence[UserProfile],
    *,
    theta1: Optional[int] = None,
    theta2: Union[Fraction, float] = DEFAULT_THETA2,
) -> Tuple[PreferenceRelation, ...]:
    """Approximate relation per attribute. ``theta1=None`` applies the size-scaled default."""
    relations: List[PreferenceRelation] = []
    for d in range(len(members[0].relations)):
        common = intersect_relations([m.relations[d] for m in members])
        limit = theta1 if theta1 is not None else default_theta1(len(common))
        relations.append(
            get_approx_preference_tuples(pair_frequency_table(members, d), limit, theta2, common=common)
        )
    return tuple(relations)


def approximate_profile(
    cluster_id: str,
    members: Sequence[UserProfile],
    *,
    theta1: Optional[int] = None,
    theta2: Union[Fraction, float] = DEFAULT_THETA2,
) -> ClusterProfile:
    return ClusterProfile(
        cluster_id,
        tuple(m.user_id for m in members),
        approximate_relations(members, theta1=theta1, theta2=theta2),
        ProfileKind.APPROXIMATE,
    )


def frequency_lookup(table: PairFrequencyTable) -> Dict[Pair, Fraction]:
    return dict(table.rows)
