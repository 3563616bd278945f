"""
Filter-then-verify dissemination over user clusters.

Each cluster keeps the Pareto frontier of its virtual user (the exact common
relations, or the approximate ones). An arriving object is first compared
against that cluster frontier; only survivors are verified against the
member users' own frontiers. Objects the cluster frontier rejects are
Pareto-optimal for no member, so the member-level work is skipped.
"""

from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set

from engine.core.errors import DuplicateObjectError, SchemaMismatch
from engine.core.frontier import ParetoFrontier, TargetIndex, update_pareto_frontier
from engine.core.preference import ClusterProfile, ComparisonCounter, Dominance, ProfileKind, UserProfile, dominates
from engine.core.schema import ObjectRecord


def update_pareto_frontier_u(
    cluster: ClusterProfile,
    o: ObjectRecord,
    cluster_frontier: ParetoFrontier,
    member_frontiers: Mapping[str, ParetoFrontier],
    index: Optional[TargetIndex] = None,
    *,
    counter: Optional[ComparisonCounter] = None,
) -> bool:
    """Cluster-level filter. Returns True iff ``o`` survives into the cluster frontier.

    Objects ``o`` dominates leave the cluster frontier and every member
    frontier holding them; member frontiers are not re-expanded.
    """
    victims: List[str] = []
    for member in cluster_frontier:
        outcome = dominates(o, member, cluster, counter=counter, scope="cluster")
        if outcome is Dominance.DOMINATED_BY:
            return False
        if outcome is Dominance.DOMINATES:
            victims.append(member.id)
        elif outcome is Dominance.IDENTICAL:
            break
    for object_id in victims:
        cluster_frontier.discard(object_id)
        for user_id in cluster.members:
            if member_frontiers[user_id].discard(object_id) and index is not None:
                index.remove(object_id, user_id)
    cluster_frontier.add(o)
    return True


class FilterThenVerify:
    """Append-only filter-then-verify over a partition of the users into clusters."""

    name = "ftv"
    expected_kind = ProfileKind.EXACT_COMMON

    def __init__(
        self,
        clusters: Sequence[ClusterProfile],
        users: Sequence[UserProfile],
        *,
        counter: Optional[ComparisonCounter] = None,
    ):
        self.users: Dict[str, UserProfile] = {u.user_id: u for u in users}
        self.clusters = list(clusters)
        self._check_partition()
        self.counter = counter if counter is not None else ComparisonCounter()
        self.cluster_frontiers: Dict[str, ParetoFrontier] = {
            c.cluster_id: ParetoFrontier(c.cluster_id) for c in self.clusters
        }
        self.frontiers: Dict[str, ParetoFrontier] = {uid: ParetoFrontier(uid) for uid in self.users}
        self.index = TargetIndex()
        self._seen: Set[str] = set()

    def _check_partition(self) -> None:
        covered: List[str] = [uid for c in self.clusters for uid in c.members]
        if sorted(covered) != sorted(self.users):
            raise SchemaMismatch(
                f"clusters cover users {sorted(covered)} but the profiles are {sorted(self.users)}"
            )

    def _register(self, o: ObjectRecord) -> None:
        if o.id in self._seen:
            raise DuplicateObjectError(o.id)
        self._seen.add(o.id)

    def _verify(self, cluster: ClusterProfile, o: ObjectRecord, targets: Set[str]) -> None:
        for user_id in cluster.members:
            accepted = update_pareto_frontier(
                self.users[user_id], o, self.frontiers[user_id], self.index,
                counter=self.counter, scope="member",
            )
            if accepted:
                targets.add(user_id)

    def step(self, o: ObjectRecord) -> Set[str]:
        self._register(o)
        targets: Set[str] = set()
        # all clusters filter before any member verification of o
        survivors = [
            cluster for cluster in self.clusters
            if update_pareto_frontier_u(
                cluster, o, self.cluster_frontiers[cluster.cluster_id], self.frontiers, self.index,
                counter=self.counter,
            )
        ]
        for cluster in survivors:
            self._verify(cluster, o, targets)
        return targets

    def run(self, objects: Iterable[ObjectRecord]) -> List[Set[str]]:
        return [self.step(o) for o in objects]

    def user_frontiers(self) -> Dict[str, FrozenSet[str]]:
        return {uid: f.id_set() for uid, f in self.frontiers.items()}

    def cluster_frontier_sets(self) -> Dict[str, FrozenSet[str]]:
        return {cid: f.id_set() for cid, f in self.cluster_frontiers.items()}


class FilterThenVerifyApprox(FilterThenVerify):
    """Same control flow over approximate cluster relations; results may differ from the exact ones."""

    name = "ftv-approx"
    expected_kind = ProfileKind.APPROXIMATE


def filter_then_verify_step(engine: FilterThenVerify, o: ObjectRecord) -> Set[str]:
    return engine.step(o)


def filter_then_verify_approx_step(engine: FilterThenVerifyApprox, o: ObjectRecord) -> Set[str]:
    return engine.step(o)
