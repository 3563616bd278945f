"""
Simulate partial-order preferences from interaction logs.

Every value of an attribute gets a pair of statistics from the user's log,
and value ``a`` is preferred to ``b`` when its pair Pareto-dominates b's:

    (s_a > s_b and t_a >= t_b) or (s_a >= s_b and t_a > t_b)

Rating logs use (average rating, number of rated items); count logs use the
two counts recorded per value (e.g. collaborations and citations). Values the
user never interacted with get no statistics and stay incomparable.
"""

from collections import Counter, defaultdict
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from engine.core.errors import UnknownValue
from engine.core.preference import PreferenceRelation, UserProfile, relation_from_edges
from engine.core.schema import AttributeSchema
from ingestion.loaders import CountLog, RatingLog

Stats = Dict[int, Tuple[Fraction, Fraction]]


def _pareto_edges(stats: Stats) -> List[Tuple[int, int]]:
    edges = []
    for a, (sa, ta) in stats.items():
        for b, (sb, tb) in stats.items():
            if a == b:
                continue
            if (sa > sb and ta >= tb) or (sa >= sb and ta > tb):
                edges.append((a, b))
    return edges


def _relation(stats: Stats, schema: AttributeSchema, d: int) -> PreferenceRelation:
    return relation_from_edges(
        d, _pareto_edges(stats), domain_size=schema.domain_size(d), attribute_name=schema.names[d]
    )


def rating_statistics(log: RatingLog, user: str, attribute: str, schema: AttributeSchema) -> Stats:
    """value id -> (average rating, number of distinct rated items carrying the value)."""
    d = schema.attribute_id(attribute)
    ratings: Dict[int, Dict[str, Fraction]] = defaultdict(dict)
    for item_id, rating, record_attribute, value in log.get(user, []):
        if record_attribute != attribute:
            continue
        ratings[schema.value_id(d, value)][item_id] = rating
    return {
        v: (sum(by_item.values(), Fraction(0)) / len(by_item), Fraction(len(by_item)))
        for v, by_item in ratings.items()
    }


def simulate_relation_rating(log: RatingLog, user: str, attribute: str, schema: AttributeSchema) -> PreferenceRelation:
    return _relation(rating_statistics(log, user, attribute, schema), schema, schema.attribute_id(attribute))


def count_statistics(log: CountLog, user: str, attribute: str, schema: AttributeSchema) -> Stats:
    d = schema.attribute_id(attribute)
    totals: Dict[int, List[int]] = defaultdict(lambda: [0, 0])
    for record_attribute, value, p, q in log.get(user, []):
        if record_attribute != attribute:
            continue
        entry = totals[schema.value_id(d, value)]
        entry[0] += p
        entry[1] += q
    return {v: (Fraction(p), Fraction(q)) for v, (p, q) in totals.items()}


def simulate_relation_counts(log: CountLog, user: str, attribute: str, schema: AttributeSchema) -> PreferenceRelation:
    return _relation(count_statistics(log, user, attribute, schema), schema, schema.attribute_id(attribute))


def select_active_users(log: Dict[str, Sequence], n: int) -> List[str]:
    """The ``n`` users with the most interaction records; ties keep log order."""
    activity = Counter({user: len(records) for user, records in log.items()})
    order = {user: i for i, user in enumerate(log)}
    ranked = sorted(activity, key=lambda user: (-activity[user], order[user]))
    return ranked[:n]


def simulate_profiles_rating(
    log: RatingLog, schema: AttributeSchema, *, users: Optional[Sequence[str]] = None
) -> List[UserProfile]:
    selected = list(users) if users is not None else list(log)
    for user in selected:
        if user not in log:
            raise UnknownValue("user_id", user)
    return [
        UserProfile(user, tuple(simulate_relation_rating(log, user, name, schema) for name in schema.names))
        for user in selected
    ]


def simulate_profiles_counts(
    log: CountLog, schema: AttributeSchema, *, users: Optional[Sequence[str]] = None
) -> List[UserProfile]:
    selected = list(users) if users is not None else list(log)
    for user in selected:
        if user not in log:
            raise UnknownValue("user_id", user)
    return [
        UserProfile(user, tuple(simulate_relation_counts(log, user, name, schema) for name in schema.names))
        for user in selected
    ]
