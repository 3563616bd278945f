import pytest

from conftest import by_id, random_workloads
from engine.core.errors import DuplicateObjectError, InvariantViolation
from engine.core.frontier import (
    Baseline,
    ParetoFrontier,
    TargetIndex,
    baseline_step,
    check_frontier,
    frontier_oracle,
    update_pareto_frontier,
)
from engine.core.preference import ComparisonCounter
from engine.core.schema import ObjectRecord


def test_baseline_on_laptop_stream(laptops, shoppers):
    baseline = Baseline(shoppers)
    for o in laptops[:14]:
        baseline_step(baseline, o)
    assert baseline.user_frontiers() == {"c1": {"o2"}, "c2": {"o2", "o3", "o7"}}

    assert baseline.step(laptops[14]) == {"c2"}
    assert baseline.user_frontiers() == {"c1": {"o2"}, "c2": {"o2", "o3", "o15"}}
    assert baseline.index.holders("o15") == {"c2"}
    assert baseline.index.holders("o7") == frozenset()


def test_baseline_matches_oracle_on_every_prefix(laptops, shoppers):
    baseline = Baseline(shoppers)
    for i, o in enumerate(laptops, start=1):
        baseline.step(o)
        for user in shoppers:
            assert baseline.frontiers[user.user_id].id_set() == frontier_oracle(laptops[:i], user)
        baseline.index.verify(baseline.frontiers)


def test_duplicate_object_is_rejected(laptops, shoppers):
    baseline = Baseline(shoppers)
    baseline.step(laptops[0])
    with pytest.raises(DuplicateObjectError):
        baseline.step(laptops[0])


def test_identical_object_joins_the_frontier(laptops, shoppers):
    objects = by_id(laptops)
    twin = ObjectRecord("o2-twin", objects["o2"].values, 99)
    frontier = ParetoFrontier("c1")
    counter = ComparisonCounter()
    update_pareto_frontier(shoppers[0], objects["o2"], frontier, counter=counter)
    assert update_pareto_frontier(shoppers[0], twin, frontier, counter=counter)
    assert frontier.ids() == ["o2", "o2-twin"]
    assert counter.total == 1


def test_dominated_object_is_rejected_and_dominated_members_evicted(laptops, shoppers):
    objects = by_id(laptops)
    frontier = ParetoFrontier("c1")
    index = TargetIndex()
    update_pareto_frontier(shoppers[0], objects["o1"], frontier, index)
    update_pareto_frontier(shoppers[0], objects["o6"], frontier, index)
    assert update_pareto_frontier(shoppers[0], objects["o2"], frontier, index)
    assert frontier.ids() == ["o2"]
    assert not update_pareto_frontier(shoppers[0], objects["o8"], frontier, index)
    index.verify({"c1": frontier})


def test_check_frontier_flags_comparable_members(laptops, shoppers):
    objects = by_id(laptops)
    frontier = ParetoFrontier("c1")
    frontier.add(objects["o1"])
    frontier.add(objects["o2"])
    with pytest.raises(InvariantViolation):
        check_frontier(frontier, shoppers[0])


def test_index_verify_detects_drift(laptops):
    frontier = ParetoFrontier("c1")
    frontier.add(laptops[0])
    index = TargetIndex()
    with pytest.raises(InvariantViolation):
        index.verify({"c1": frontier})
    index.add(laptops[0].id, "c1")
    index.verify({"c1": frontier})
    index.remove(laptops[0].id, "c1")
    assert len(index) == 0


def test_baseline_matches_oracle_on_random_instances():
    for workload in random_workloads(10):
        baseline = Baseline(workload.users)
        baseline.run(workload.objects)
        for user in workload.users:
            frontier = baseline.frontiers[user.user_id]
            assert frontier.id_set() == frontier_oracle(workload.objects, user)
            check_frontier(frontier, user)
        baseline.index.verify(baseline.frontiers)
