"""
Pareto frontier maintenance for individual holders (users or clusters), the
exact Baseline algorithm, and the brute-force frontier oracle used by tests and
by ``--assert-oracle`` runs.
"""

from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set

from engine.core.errors import DuplicateObjectError, InvariantViolation
from engine.core.preference import ComparisonCounter, Dominance, Profile, UserProfile, dominates
from engine.core.schema import ObjectRecord


class ParetoFrontier:
    """Pareto-optimal objects of one holder, kept in insertion order."""

    def __init__(self, holder_id: str):
        self.holder_id = holder_id
        self._members: Dict[str, ObjectRecord] = {}

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[ObjectRecord]:
        return iter(list(self._members.values()))

    def __contains__(self, object_id: object) -> bool:
        return object_id in self._members

    def add(self, o: ObjectRecord) -> None:
        self._members[o.id] = o

    def discard(self, object_id: str) -> bool:
        return self._members.pop(object_id, None) is not None

    def ids(self) -> List[str]:
        return list(self._members)

    def id_set(self) -> FrozenSet[str]:
        return frozenset(self._members)

    def __repr__(self) -> str:
        return f"ParetoFrontier({self.holder_id!r}, {self.ids()})"


class TargetIndex:
    """Reverse index: object id -> ids of the users holding it as Pareto-optimal."""

    def __init__(self) -> None:
        self._holders: Dict[str, Set[str]] = defaultdict(set)

    def add(self, object_id: str, holder_id: str) -> None:
        self._holders[object_id].add(holder_id)

    def remove(self, object_id: str, holder_id: str) -> None:
        holders = self._holders.get(object_id)
        if holders is None:
            return
        holders.discard(holder_id)
        if not holders:
            del self._holders[object_id]

    def holders(self, object_id: str) -> FrozenSet[str]:
        return frozenset(self._holders.get(object_id, ()))

    def __len__(self) -> int:
        return len(self._holders)

    def verify(self, frontiers: Mapping[str, ParetoFrontier]) -> None:
        """Raise InvariantViolation unless c in index[o] <=> o in frontier(c)."""
        expected: Dict[str, Set[str]] = defaultdict(set)
        for holder_id, frontier in frontiers.items():
            for object_id in frontier.ids():
                expected[object_id].add(holder_id)
        actual = {k: set(v) for k, v in self._holders.items() if v}
        if actual != dict(expected):
            missing = {k: v - actual.get(k, set()) for k, v in expected.items() if v - actual.get(k, set())}
            extra = {k: v - expected.get(k, set()) for k, v in actual.items() if v - expected.get(k, set())}
            raise InvariantViolation(f"target index out of sync: missing={missing} extra={extra}")


def update_pareto_frontier(
    profile: Profile,
    o: ObjectRecord,
    frontier: ParetoFrontier,
    index: Optional[TargetIndex] = None,
    *,
    counter: Optional[ComparisonCounter] = None,
    scope: str = "user",
) -> bool:
    """Insert ``o`` into ``frontier`` if no member dominates it; evict what it dominates.

    The scan follows insertion order and stops at the first dominator or the
    first identical member. Returns True iff ``o`` became Pareto-optimal.
    """
    victims: List[str] = []
    for member in frontier:
        outcome = dominates(o, member, profile, counter=counter, scope=scope)
        if outcome is Dominance.DOMINATES:
            victims.append(member.id)
        elif outcome is Dominance.DOMINATED_BY:
            return False
        elif outcome is Dominance.IDENTICAL:
            break
    for object_id in victims:
        frontier.discard(object_id)
        if index is not None:
            index.remove(object_id, frontier.holder_id)
    frontier.add(o)
    if index is not None:
        index.add(o.id, frontier.holder_id)
    return True


class Baseline:
    """Per-user frontier maintenance with no shared computation."""

    name = "baseline"

    def __init__(self, users: Sequence[UserProfile], *, counter: Optional[ComparisonCounter] = None):
        self.users = list(users)
        self.counter = counter if counter is not None else ComparisonCounter()
        self.frontiers: Dict[str, ParetoFrontier] = {u.user_id: ParetoFrontier(u.user_id) for u in self.users}
        self.index = TargetIndex()
        self._seen: Set[str] = set()

    def _register(self, o: ObjectRecord) -> None:
        if o.id in self._seen:
            raise DuplicateObjectError(o.id)
        self._seen.add(o.id)

    def step(self, o: ObjectRecord) -> Set[str]:
        """Process one arriving object and return its target users."""
        self._register(o)
        targets: Set[str] = set()
        for user in self.users:
            if update_pareto_frontier(user, o, self.frontiers[user.user_id], self.index, counter=self.counter):
                targets.add(user.user_id)
        return targets

    def run(self, objects: Iterable[ObjectRecord]) -> List[Set[str]]:
        return [self.step(o) for o in objects]

    def user_frontiers(self) -> Dict[str, FrozenSet[str]]:
        return {uid: f.id_set() for uid, f in self.frontiers.items()}


def baseline_step(baseline: Baseline, o: ObjectRecord) -> Set[str]:
    return baseline.step(o)


def frontier_oracle(objects: Iterable[ObjectRecord], profile: Profile) -> Set[str]:
    """All-pairs evaluation: objects no other object dominates."""
    pool = list(objects)
    result: Set[str] = set()
    for o in pool:
        if not any(
            other.id != o.id and dominates(other, o, profile) is Dominance.DOMINATES for other in pool
        ):
            result.add(o.id)
    return result


def check_frontier(frontier: ParetoFrontier, profile: Profile) -> None:
    """Raise InvariantViolation if a member dominates another member."""
    members = list(frontier)
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            outcome = dominates(a, b, profile)
            if outcome in (Dominance.DOMINATES, Dominance.DOMINATED_BY):
                raise InvariantViolation(
                    f"frontier of {frontier.holder_id!r} holds comparable members {a.id!r} and {b.id!r}"
                )
