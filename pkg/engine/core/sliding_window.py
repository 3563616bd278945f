"""
Sliding-window frontier maintenance.

Only the ``W`` most recent objects are alive. When an object expires, objects
it used to dominate may become Pareto-optimal again, so every holder keeps a
Pareto frontier buffer: the alive objects not dominated by any later object.
Anything outside the buffer is dominated by an object that outlives it and can
never rejoin the frontier.

Per step, expiry is processed before arrival:

    mend frontier from buffer -> drop o_out from buffer -> update with o_in -> refresh buffer
"""

from collections import deque
from typing import Deque, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Set

from engine.core.errors import ConfigError, InvariantViolation
from engine.core.filter_verify import FilterThenVerify, update_pareto_frontier_u
from engine.core.frontier import Baseline, ParetoFrontier, TargetIndex, frontier_oracle, update_pareto_frontier
from engine.core.preference import (
    ClusterProfile,
    ComparisonCounter,
    Dominance,
    Profile,
    ProfileKind,
    UserProfile,
    dominates,
)
from engine.core.schema import ObjectRecord


class Window:
    """Count-based window over the ``capacity`` most recent objects."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ConfigError(f"window size must be a positive integer, got {capacity}")
        self.capacity = capacity
        self._alive: Deque[ObjectRecord] = deque()

    def push(self, o: ObjectRecord) -> Optional[ObjectRecord]:
        """Admit ``o`` and return the object that expires with it, if any."""
        self._alive.append(o)
        if len(self._alive) > self.capacity:
            return self._alive.popleft()
        return None

    def __len__(self) -> int:
        return len(self._alive)

    def __iter__(self) -> Iterator[ObjectRecord]:
        return iter(list(self._alive))

    def alive_ids(self) -> List[str]:
        return [o.id for o in self._alive]


class ParetoBuffer:
    """Alive objects of one holder that no later object dominates, in arrival order."""

    def __init__(self, holder_id: str):
        self.holder_id = holder_id
        self._members: Dict[str, ObjectRecord] = {}

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[ObjectRecord]:
        return iter(list(self._members.values()))

    def __contains__(self, object_id: object) -> bool:
        return object_id in self._members

    def discard(self, object_id: str) -> bool:
        return self._members.pop(object_id, None) is not None

    def ids(self) -> List[str]:
        return list(self._members)

    def id_set(self) -> FrozenSet[str]:
        return frozenset(self._members)

    def refresh(
        self,
        profile: Profile,
        o_in: ObjectRecord,
        *,
        counter: Optional[ComparisonCounter] = None,
        scope: str = "user",
    ) -> None:
        """Evict members ``o_in`` dominates, then append ``o_in``."""
        for member in self:
            if dominates(o_in, member, profile, counter=counter, scope=scope) is Dominance.DOMINATES:
                del self._members[member.id]
        self._members[o_in.id] = o_in

    def __repr__(self) -> str:
        return f"ParetoBuffer({self.holder_id!r}, {self.ids()})"


def _undominated(
    profile: Profile, o: ObjectRecord, frontier: ParetoFrontier, counter: Optional[ComparisonCounter], scope: str
) -> bool:
    for member in frontier:
        if dominates(member, o, profile, counter=counter, scope=scope) is Dominance.DOMINATES:
            return False
    return True


def mend_pareto_frontier(
    profile: Profile,
    o_out: ObjectRecord,
    frontier: ParetoFrontier,
    buffer: ParetoBuffer,
    index: Optional[TargetIndex] = None,
    *,
    counter: Optional[ComparisonCounter] = None,
    scope: str = "user",
) -> List[str]:
    """Promote buffer objects ``o_out`` dominated that the current frontier no longer dominates.

    ``o_out`` must already be gone from ``frontier``. Candidates are checked in
    arrival order against the frontier as it grows. Returns the promoted ids.
    """
    promoted: List[str] = []
    for candidate in buffer:
        if candidate.id == o_out.id:
            continue
        if dominates(o_out, candidate, profile, counter=counter, scope=scope) is not Dominance.DOMINATES:
            continue
        if _undominated(profile, candidate, frontier, counter, scope):
            frontier.add(candidate)
            if index is not None:
                index.add(candidate.id, frontier.holder_id)
            promoted.append(candidate.id)
    return promoted


class BaselineSW(Baseline):
    """Per-user windowed maintenance with one frontier buffer per user."""

    name = "baseline-sw"

    def __init__(self, users: Sequence[UserProfile], window: int, *, counter: Optional[ComparisonCounter] = None):
        super().__init__(users, counter=counter)
        self.window = Window(window)
        self.buffers: Dict[str, ParetoBuffer] = {u.user_id: ParetoBuffer(u.user_id) for u in self.users}

    def step(self, o: ObjectRecord) -> Set[str]:
        self._register(o)
        o_out = self.window.push(o)
        targets: Set[str] = set()
        for user in self.users:
            uid = user.user_id
            frontier, buffer = self.frontiers[uid], self.buffers[uid]
            if o_out is not None:
                if frontier.discard(o_out.id):
                    self.index.remove(o_out.id, uid)
                    mend_pareto_frontier(user, o_out, frontier, buffer, self.index, counter=self.counter)
                buffer.discard(o_out.id)
            if update_pareto_frontier(user, o, frontier, self.index, counter=self.counter):
                targets.add(uid)
            buffer.refresh(user, o, counter=self.counter)
        return targets

    def buffer_sets(self) -> Dict[str, FrozenSet[str]]:
        return {uid: b.id_set() for uid, b in self.buffers.items()}

    def trace_rows(self, step: int, object_id: str) -> List[Dict[str, str]]:
        return [
            _trace_row(step, object_id, uid, self.frontiers[uid], self.buffers[uid])
            for uid in self.frontiers
        ]


class FilterThenVerifySW(FilterThenVerify):
    """Windowed filter-then-verify. One buffer per cluster serves all its members."""

    name = "ftv-sw"

    def __init__(
        self,
        clusters: Sequence[ClusterProfile],
        users: Sequence[UserProfile],
        window: int,
        *,
        counter: Optional[ComparisonCounter] = None,
    ):
        super().__init__(clusters, users, counter=counter)
        self.window = Window(window)
        self.cluster_buffers: Dict[str, ParetoBuffer] = {
            c.cluster_id: ParetoBuffer(c.cluster_id) for c in self.clusters
        }

    def _expire(self, cluster: ClusterProfile, o_out: ObjectRecord) -> None:
        cid = cluster.cluster_id
        cluster_frontier, buffer = self.cluster_frontiers[cid], self.cluster_buffers[cid]
        promoted: Set[str] = set()
        if cluster_frontier.discard(o_out.id):
            promoted = set(mend_pareto_frontier(
                cluster, o_out, cluster_frontier, buffer, counter=self.counter, scope="cluster"
            ))
        buffer.discard(o_out.id)
        # exact relations: a member regains objects only when one of its own
        # frontier objects expires. approximate relations: any expiry may release
        # objects for any member, and promoted objects are always re-verified.
        approximate = cluster.kind is ProfileKind.APPROXIMATE
        for uid in cluster.members:
            frontier = self.frontiers[uid]
            if frontier.discard(o_out.id):
                self.index.remove(o_out.id, uid)
            elif not approximate:
                continue
            self._release(self.users[uid], o_out, frontier, cluster_frontier, promoted)

    def _release(
        self,
        user: UserProfile,
        o_out: ObjectRecord,
        frontier: ParetoFrontier,
        cluster_frontier: ParetoFrontier,
        promoted: Set[str],
    ) -> None:
        """Re-verify the cluster-frontier objects ``user`` may regain now that ``o_out`` is gone."""
        for candidate in cluster_frontier:
            if candidate.id in frontier:
                continue
            if candidate.id not in promoted:
                outcome = dominates(o_out, candidate, user, counter=self.counter, scope="member")
                if outcome is not Dominance.DOMINATES:
                    continue
            update_pareto_frontier(user, candidate, frontier, self.index, counter=self.counter, scope="member")

    def step(self, o: ObjectRecord) -> Set[str]:
        self._register(o)
        o_out = self.window.push(o)
        targets: Set[str] = set()
        for cluster in self.clusters:
            cid = cluster.cluster_id
            if o_out is not None:
                self._expire(cluster, o_out)
            survived = update_pareto_frontier_u(
                cluster, o, self.cluster_frontiers[cid], self.frontiers, self.index, counter=self.counter
            )
            if survived:
                self._verify(cluster, o, targets)
            self.cluster_buffers[cid].refresh(cluster, o, counter=self.counter, scope="cluster")
        return targets

    def cluster_buffer_sets(self) -> Dict[str, FrozenSet[str]]:
        return {cid: b.id_set() for cid, b in self.cluster_buffers.items()}

    def trace_rows(self, step: int, object_id: str) -> List[Dict[str, str]]:
        rows = [
            _trace_row(step, object_id, cid, self.cluster_frontiers[cid], self.cluster_buffers[cid])
            for cid in self.cluster_frontiers
        ]
        rows += [_trace_row(step, object_id, uid, f, None) for uid, f in self.frontiers.items()]
        return rows


class FilterThenVerifyApproxSW(FilterThenVerifySW):
    name = "ftv-approx-sw"
    expected_kind = ProfileKind.APPROXIMATE


def baseline_sw_step(engine: BaselineSW, o_in: ObjectRecord) -> Set[str]:
    return engine.step(o_in)


def ftv_sw_step(engine: FilterThenVerifySW, o_in: ObjectRecord) -> Set[str]:
    return engine.step(o_in)


def ftv_approx_sw_step(engine: FilterThenVerifyApproxSW, o_in: ObjectRecord) -> Set[str]:
    return engine.step(o_in)


def _trace_row(
    step: int, object_id: str, holder_id: str, frontier: ParetoFrontier, buffer: Optional[ParetoBuffer]
) -> Dict[str, str]:
    return {
        "step": str(step),
        "object": object_id,
        "holder": holder_id,
        "frontier": " ".join(frontier.ids()),
        "buffer": " ".join(buffer.ids()) if buffer is not None else "",
    }


# ---------------------------------------------------------------------------
# Oracles and law checks
# ---------------------------------------------------------------------------

def windowed_frontier_oracle(
    objects: Sequence[ObjectRecord], profiles: Sequence[Profile], window: int
) -> List[Dict[str, Set[str]]]:
    """Per step, the brute-force frontier of every profile over the alive objects."""
    if window < 1:
        raise ConfigError(f"window size must be a positive integer, got {window}")
    history: List[Dict[str, Set[str]]] = []
    for i in range(len(objects)):
        alive = objects[max(0, i + 1 - window): i + 1]
        history.append({p.holder_id: frontier_oracle(alive, p) for p in profiles})
    return history


def check_buffer(buffer: ParetoBuffer, profile: Profile) -> None:
    """Raise InvariantViolation if a buffer member is dominated by a later member."""
    members = list(buffer)
    for i, earlier in enumerate(members):
        for later in members[i + 1:]:
            if dominates(later, earlier, profile) is Dominance.DOMINATES:
                raise InvariantViolation(
                    f"buffer of {buffer.holder_id!r}: {earlier.id!r} is dominated by later member {later.id!r}"
                )


def check_buffer_laws(
    frontiers: Mapping[str, ParetoFrontier],
    buffers: Mapping[str, ParetoBuffer],
    profiles: Mapping[str, Profile],
) -> None:
    """Buffer ordering law plus frontier containment for every holder with a buffer."""
    for holder_id, buffer in buffers.items():
        check_buffer(buffer, profiles[holder_id])
        outside = frontiers[holder_id].id_set() - buffer.id_set()
        if outside:
            raise InvariantViolation(f"frontier of {holder_id!r} holds {sorted(outside)} outside its buffer")


def check_cluster_buffer_containment(
    cluster: ClusterProfile,
    cluster_buffer: ParetoBuffer,
    member_buffers: Mapping[str, ParetoBuffer],
) -> None:
    for uid in cluster.members:
        outside = member_buffers[uid].id_set() - cluster_buffer.id_set()
        if outside:
            raise InvariantViolation(
                f"buffer of {uid!r} holds {sorted(outside)} missing from cluster buffer {cluster.cluster_id!r}"
            )
