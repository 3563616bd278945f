import os
from fractions import Fraction

import pytest

from conftest import fixture_path
from engine.core.errors import ConfigError, DataError, ParseError, SchemaViolation, UnknownValue
from engine.core.preference import UserProfile, relation_from_edges
from ingestion.data_ingestion import simulate_from_log, spec_from_params
from ingestion.loaders import (
    load_clusters,
    load_count_log,
    load_labels,
    load_objects,
    load_profiles,
    load_rating_log,
    load_schema,
    relation_names,
    save_clusters,
    save_profiles,
    save_schema,
)
from ingestion.simulate import (
    rating_statistics,
    select_active_users,
    simulate_profiles_counts,
    simulate_profiles_rating,
    simulate_relation_counts,
    simulate_relation_rating,
)
from ingestion.workload import WorkloadSpec, generate_workload, load_workload, save_workload


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# Schema and objects
# ---------------------------------------------------------------------------

def test_display_sizes_are_binned(laptop_schema, laptops):
    assert laptop_schema.names == ["display", "brand", "CPU"]
    assert laptops[0].describe(laptop_schema) == {"display": "10-12.9", "brand": "Apple", "CPU": "single"}
    assert laptop_schema.value_name(0, laptop_schema.discretize(0, 9.9)) == "9.9-under"
    assert laptop_schema.value_name(0, laptop_schema.discretize(0, 19)) == "19-up"
    assert [o.timestamp for o in laptops[:3]] == [1, 2, 3]


def test_number_outside_bins_is_unknown(laptop_schema):
    with pytest.raises(UnknownValue):
        laptop_schema.discretize(0, 120)


def test_bin_names_are_accepted_directly(laptop_schema):
    assert laptop_schema.encode(0, "13-15.9") == laptop_schema.encode(0, "14")


def test_bins_must_be_contiguous(tmp_path):
    path = write(tmp_path, "schema.yaml", """
attributes:
  - name: size
    values: [small, big]
    bins:
      - {low: 0, high: 5, value: small}
      - {low: 6, high: 10, value: big}
""")
    with pytest.raises(SchemaViolation):
        load_schema(path)


def test_schema_round_trip(tmp_path, laptop_schema):
    path = str(tmp_path / "schema.yaml")
    save_schema(laptop_schema, path)
    assert load_schema(path).model_dump() == laptop_schema.model_dump()


def test_object_row_with_missing_field(tmp_path, laptop_schema):
    path = write(tmp_path, "objects.csv", "id,display,brand,CPU\no1,12,Apple,single\no2,14,Apple\n")
    with pytest.raises(ParseError) as excinfo:
        load_objects(path, laptop_schema)
    assert excinfo.value.line == 3


def test_duplicate_object_id(tmp_path, laptop_schema):
    path = write(tmp_path, "objects.csv", "o1,12,Apple,single\n# repeated\no1,14,Apple,dual\n")
    with pytest.raises(ParseError):
        load_objects(path, laptop_schema)


def test_unknown_object_value(tmp_path, laptop_schema):
    path = write(tmp_path, "objects.csv", "o1,12,Dell,single\n")
    with pytest.raises(SchemaViolation) as excinfo:
        load_objects(path, laptop_schema)
    assert excinfo.value.field == "brand"


def test_missing_file(laptop_schema):
    with pytest.raises(ParseError):
        load_objects(fixture_path("no_such_file.csv"), laptop_schema)


def test_invalid_utf8_byte_is_a_parse_error(tmp_path, laptop_schema):
    path = tmp_path / "objects.csv"
    path.write_bytes(b"id,display,brand,CPU\no1,12,Apple,single\no99,\xff\xfe,Apple,dual\n")
    with pytest.raises(ParseError) as excinfo:
        load_objects(str(path), laptop_schema)
    assert excinfo.value.line == 3
    assert "0xff" in str(excinfo.value)


def test_byte_order_mark_is_skipped(tmp_path, laptop_schema):
    path = tmp_path / "objects.csv"
    path.write_bytes(b"\xef\xbb\xbfid,display,brand,CPU\no1,12,Apple,single\n")
    assert [o.id for o in load_objects(str(path), laptop_schema)] == ["o1"]


def test_malformed_quoted_field(tmp_path, laptop_schema):
    path = write(tmp_path, "objects.csv", 'o1,12,Apple,single\no2,"14"x,Apple,dual\n')
    with pytest.raises(ParseError) as excinfo:
        load_objects(path, laptop_schema)
    assert excinfo.value.line == 2


def test_unterminated_quote(tmp_path, laptop_schema):
    path = write(tmp_path, "objects.csv", 'o1,12,Apple,single\no2,"14,Apple,dual\n')
    with pytest.raises(ParseError):
        load_objects(path, laptop_schema)


# ---------------------------------------------------------------------------
# Preferences and clusters
# ---------------------------------------------------------------------------

def test_profiles_keep_file_order(shoppers, laptop_schema):
    assert [u.user_id for u in shoppers] == ["c1", "c2"]
    assert ("Apple", "Sony") in relation_names(shoppers[0].relations[1], laptop_schema)


def test_cyclic_preferences_are_a_data_error(tmp_path, brand_schema):
    path = write(tmp_path, "prefs.csv", "u,brand,Apple,Lenovo\nu,brand,Lenovo,Apple\n")
    with pytest.raises(DataError):
        load_profiles(path, brand_schema)


def test_unknown_attribute(tmp_path, brand_schema):
    path = write(tmp_path, "prefs.csv", "u,colour,red,blue\n")
    with pytest.raises(SchemaViolation):
        load_profiles(path, brand_schema)


def test_profiles_round_trip(tmp_path, laptop_schema, shoppers):
    empty = UserProfile("c3", tuple(
        relation_from_edges(d, [], domain_size=laptop_schema.domain_size(d)) for d in range(len(laptop_schema))
    ))
    path = str(tmp_path / "prefs.csv")
    save_profiles(list(shoppers) + [empty], laptop_schema, path)
    loaded = load_profiles(path, laptop_schema)
    assert loaded == list(shoppers) + [empty]


def test_clusters_file(tmp_path):
    assert load_clusters(fixture_path("laptop_clusters.csv")) == [["c1", "c2"]]
    path = str(tmp_path / "clusters.csv")
    save_clusters({"U1": ["c3"], "U2": ["c1", "c2"]}, path)
    assert load_clusters(path) == [["c3"], ["c1", "c2"]]


# ---------------------------------------------------------------------------
# Interaction logs
# ---------------------------------------------------------------------------

RATINGS = """user_id,item_id,rating,attribute,brand_value
ann,m1,5,brand,Apple
ann,m2,4,brand,Apple
ann,m3,3,brand,Lenovo
ann,m4,4,brand,Toshiba
ann,m4,4,brand,Samsung
bob,m1,2,brand,Apple
"""


def test_rating_log_simulation(tmp_path, brand_schema):
    log = load_rating_log(write(tmp_path, "ratings.csv", RATINGS))
    stats = rating_statistics(log, "ann", "brand", brand_schema)
    assert stats[0] == (Fraction(9, 2), Fraction(2))
    relation = simulate_relation_rating(log, "ann", "brand", brand_schema)
    # Apple beats everything on both statistics; Toshiba and Samsung tie
    assert relation.tuple_set() == {(0, 1), (0, 2), (0, 3), (2, 1), (3, 1)}
    assert not relation.prefers(2, 3)


def test_rating_out_of_scale(tmp_path):
    with pytest.raises(SchemaViolation):
        load_rating_log(write(tmp_path, "ratings.csv", "ann,m1,7,brand,Apple\n"))


def test_count_log_simulation(tmp_path, brand_schema):
    log = load_count_log(write(tmp_path, "counts.csv", """user_id,attribute,value,first,second
ann,brand,Apple,3,10
ann,brand,Lenovo,3,4
ann,brand,Toshiba,5,1
ann,brand,Lenovo,0,1
"""))
    relation = simulate_relation_counts(log, "ann", "brand", brand_schema)
    assert relation.tuple_set() == {(0, 1)}


def test_active_users_and_profile_simulation(tmp_path, brand_schema):
    log = load_rating_log(write(tmp_path, "ratings.csv", RATINGS))
    assert select_active_users(log, 1) == ["ann"]
    profiles = simulate_profiles_rating(log, brand_schema, users=["ann", "bob"])
    assert [p.user_id for p in profiles] == ["ann", "bob"]
    assert len(profiles[1].relations[0]) == 0
    with pytest.raises(UnknownValue):
        simulate_profiles_rating(log, brand_schema, users=["zed"])
    counts = load_count_log(write(tmp_path, "counts.csv", "ann,brand,Apple,1,1\n"))
    assert simulate_profiles_counts(counts, brand_schema)[0].user_id == "ann"


# ---------------------------------------------------------------------------
# Synthetic workloads
# ---------------------------------------------------------------------------

def test_workload_is_deterministic():
    spec = WorkloadSpec(seed=5, users=8, archetypes=2, objects=30, attributes=2, domain_size=4)
    first, second = generate_workload(spec), generate_workload(spec)
    assert first.users == second.users
    assert first.objects == second.objects
    assert first.labels == {f"c{i + 1}": i % 2 for i in range(8)}


def test_noise_only_adds_tuples_to_the_archetype():
    shape = dict(seed=9, users=12, archetypes=3, objects=1, attributes=3, domain_size=6)
    exact = generate_workload(WorkloadSpec(noise=0, **shape))
    noisy = generate_workload(WorkloadSpec(noise=0.4, **shape))
    grown = 0
    for archetype, user in zip(exact.users, noisy.users):
        for base, relation in zip(archetype.relations, user.relations):
            assert set(base.tuples()) <= set(relation.tuples())
            grown += len(relation) - len(base)
    assert grown > 0


def test_dropped_edges_shrink_the_shared_core():
    shape = dict(seed=9, users=12, archetypes=3, objects=1, attributes=3, domain_size=6, noise=0)
    exact = generate_workload(WorkloadSpec(**shape))
    thinned = generate_workload(WorkloadSpec(drop=0.5, **shape))
    assert any(
        not set(base.tuples()) <= set(relation.tuples())
        for archetype, user in zip(exact.users, thinned.users)
        for base, relation in zip(archetype.relations, user.relations)
    )


def test_labels_file_skips_comments(tmp_path):
    path = write(tmp_path, "labels.csv", "user_id,archetype\n# ground truth\nc1,0\n\nc2,1\n")
    assert load_labels(path) == {"c1": 0, "c2": 1}
    bad = write(tmp_path, "bad.csv", "c1,first\n")
    with pytest.raises(ParseError) as excinfo:
        load_labels(bad)
    assert excinfo.value.line == 1


def test_workload_files_round_trip(tmp_path, small_workload):
    paths = save_workload(small_workload, str(tmp_path))
    assert set(paths) == {"schema", "objects", "prefs", "labels"}
    loaded = load_workload(str(tmp_path))
    assert loaded.users == small_workload.users
    assert loaded.objects == small_workload.objects
    assert loaded.labels == small_workload.labels


def test_workload_spec_from_params():
    spec = spec_from_params({"workload": {"users": 10, "archetypes": 2}}, seed=4, objects=None)
    assert (spec.seed, spec.users, spec.archetypes, spec.objects) == (4, 10, 2, 1000)
    assert spec.window is None
    windowed = spec_from_params({"workload": {"users": 4, "archetypes": 2, "objects": 3, "window": 2}})
    assert generate_workload(windowed).window == 2
    with pytest.raises(ConfigError):
        spec_from_params({"workload": {"users": 2, "archetypes": 5}})
    with pytest.raises(ConfigError):
        spec_from_params({"workload": {"window": 0}})


def test_simulated_log_written_by_stage(tmp_path):
    log_path = write(tmp_path, "ratings.csv", RATINGS)
    out_path = str(tmp_path / "simulated" / "prefs.csv")
    written = simulate_from_log({
        "interaction_log": log_path,
        "log_schema": fixture_path("brand_schema.yaml"),
        "log_kind": "rating",
        "active_users": 1,
        "simulated_prefs": out_path,
    })
    assert written == out_path
    assert os.path.exists(out_path)
    assert simulate_from_log({}) is None
