from fractions import Fraction

import pytest

from conftest import random_workloads
from engine.core.clustering import SimilarityKind, agglomerate, build_cluster_profiles
from engine.core.errors import ConfigError, InvariantViolation
from engine.core.sliding_window import (
    BaselineSW,
    FilterThenVerifyApproxSW,
    FilterThenVerifySW,
    ParetoBuffer,
    Window,
    baseline_sw_step,
    check_buffer,
    check_buffer_laws,
    check_cluster_buffer_containment,
    ftv_approx_sw_step,
    ftv_sw_step,
    mend_pareto_frontier,
    windowed_frontier_oracle,
)


def test_window_expires_oldest(laptops):
    window = Window(2)
    assert window.push(laptops[0]) is None
    assert window.push(laptops[1]) is None
    assert window.push(laptops[2]).id == "o1"
    assert window.alive_ids() == ["o2", "o3"]


@pytest.mark.parametrize("size", [0, -3])
def test_window_size_must_be_positive(size):
    with pytest.raises(ConfigError):
        Window(size)
    with pytest.raises(ConfigError):
        windowed_frontier_oracle([], [], size)


def test_baseline_sw_on_product_window(window_laptops, shoppers):
    engine = BaselineSW(shoppers, 6)
    for o in window_laptops[:6]:
        baseline_sw_step(engine, o)
    assert engine.user_frontiers() == {"c1": {"o3"}, "c2": {"o3", "o4", "o6"}}
    assert engine.buffer_sets() == {"c1": {"o3", "o4", "o5", "o6"}, "c2": {"o3", "o4", "o6"}}

    assert engine.step(window_laptops[6]) == {"c1", "c2"}
    assert engine.window.alive_ids() == ["o2", "o3", "o4", "o5", "o6", "o7"]
    assert engine.user_frontiers() == {"c1": {"o7"}, "c2": {"o4", "o6", "o7"}}
    assert engine.buffer_sets() == {"c1": {"o7"}, "c2": {"o4", "o6", "o7"}}


def test_ftv_sw_on_product_window(window_laptops, shoppers, shopper_cluster):
    engine = FilterThenVerifySW([shopper_cluster], shoppers, 6)
    for o in window_laptops[:6]:
        ftv_sw_step(engine, o)
    assert engine.cluster_frontier_sets() == {"U1": {"o1", "o3", "o4", "o6"}}
    assert engine.cluster_buffer_sets() == {"U1": {"o1", "o3", "o4", "o5", "o6"}}

    assert engine.step(window_laptops[6]) == {"c1", "c2"}
    assert engine.cluster_frontier_sets() == {"U1": {"o4", "o6", "o7"}}
    assert engine.cluster_buffer_sets() == {"U1": {"o4", "o6", "o7"}}
    assert engine.user_frontiers() == {"c1": {"o7"}, "c2": {"o4", "o6", "o7"}}


def test_expiry_mends_the_cluster_frontier(window_laptops, shoppers, shopper_cluster):
    engine = FilterThenVerifySW([shopper_cluster], shoppers, 6)
    engine.run(window_laptops[:6])
    frontier, buffer = engine.cluster_frontiers["U1"], engine.cluster_buffers["U1"]
    o1 = window_laptops[0]
    assert frontier.discard(o1.id)
    assert mend_pareto_frontier(shopper_cluster, o1, frontier, buffer) == []
    buffer.discard(o1.id)
    assert frontier.id_set() == {"o3", "o4", "o6"}
    assert buffer.id_set() == {"o3", "o4", "o5", "o6"}


def test_mend_promotes_objects_the_expired_one_dominated(laptops, shoppers):
    c1 = shoppers[0]
    engine = BaselineSW([c1], 2)
    engine.run(laptops[1:3])  # o2 dominates o3 under c1
    assert engine.frontiers["c1"].ids() == ["o2"]
    assert engine.buffers["c1"].ids() == ["o2", "o3"]
    # o2 expires when o4 arrives; o3 comes back before o4 is compared
    assert engine.step(laptops[3]) == {"c1"}
    assert engine.frontiers["c1"].ids() == ["o3", "o4"]
    assert engine.buffers["c1"].ids() == ["o3", "o4"]


def test_sliding_window_on_laptops_after_ten_objects(laptops, shoppers):
    engine = BaselineSW(shoppers, 5)
    engine.run(laptops[:10])
    assert engine.window.alive_ids() == ["o6", "o7", "o8", "o9", "o10"]
    assert engine.user_frontiers() == {"c1": {"o8"}, "c2": {"o7", "o8"}}
    assert engine.buffers["c1"].id_set() == {"o8", "o9", "o10"}


@pytest.mark.parametrize("window", [1, 2, 3, 5, 8, 16])
def test_windowed_engines_match_oracle_on_laptops(laptops, shoppers, shopper_cluster, window):
    history = windowed_frontier_oracle(laptops, shoppers, window)
    baseline = BaselineSW(shoppers, window)
    engine = FilterThenVerifySW([shopper_cluster], shoppers, window)
    profiles = {u.user_id: u for u in shoppers}
    for o, expected in zip(laptops, history):
        assert engine.step(o) == baseline.step(o)
        assert baseline.user_frontiers() == expected
        assert engine.user_frontiers() == expected
        check_buffer_laws(baseline.frontiers, baseline.buffers, profiles)
        check_buffer_laws(engine.cluster_frontiers, engine.cluster_buffers, {"U1": shopper_cluster})
        check_cluster_buffer_containment(shopper_cluster, engine.cluster_buffers["U1"], baseline.buffers)
        engine.index.verify(engine.frontiers)


def test_check_buffer_flags_later_dominator(laptops, shoppers):
    buffer = ParetoBuffer("c1")
    buffer.refresh(shoppers[0], laptops[2])
    buffer._members[laptops[1].id] = laptops[1]  # o2 arrives after o3 without evicting it
    with pytest.raises(InvariantViolation):
        check_buffer(buffer, shoppers[0])


def test_unanimous_approximation_matches_exact_windowed(laptops, shoppers):
    (exact,) = build_cluster_profiles([shoppers])
    (approx,) = build_cluster_profiles([shoppers], approximate=True, theta2=Fraction(99, 100))
    left = FilterThenVerifySW([exact], shoppers, 4)
    right = FilterThenVerifyApproxSW([approx], shoppers, 4)
    for o in laptops:
        assert ftv_sw_step(left, o) == ftv_approx_sw_step(right, o)


@pytest.mark.parametrize("window", [3, 10])
def test_windowed_engines_match_oracle_on_random_instances(window):
    for workload in random_workloads(6, objects=40):
        clusters, _ = agglomerate(workload.users, SimilarityKind.WEIGHTED_JACCARD, Fraction(1, 2))
        history = windowed_frontier_oracle(workload.objects, workload.users, window)
        baseline = BaselineSW(workload.users, window)
        engine = FilterThenVerifySW(clusters, workload.users, window)
        for o, expected in zip(workload.objects, history):
            assert engine.step(o) == baseline.step(o)
            assert engine.user_frontiers() == expected
        for cluster in clusters:
            check_cluster_buffer_containment(cluster, engine.cluster_buffers[cluster.cluster_id], baseline.buffers)
