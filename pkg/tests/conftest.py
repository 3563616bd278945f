import os
from typing import Dict, List

import pytest

from engine.core.preference import ClusterProfile, ProfileKind, UserProfile, common_profile
from engine.core.schema import ObjectRecord
from ingestion.loaders import load_objects, load_profiles, load_schema
from ingestion.workload import WorkloadSpec, generate_workload

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, name)


def by_id(objects: List[ObjectRecord]) -> Dict[str, ObjectRecord]:
    return {o.id: o for o in objects}


@pytest.fixture(scope="session")
def laptop_schema():
    return load_schema(fixture_path("laptop_schema.yaml"))


@pytest.fixture(scope="session")
def laptops(laptop_schema) -> List[ObjectRecord]:
    """o1..o16 in arrival order."""
    return load_objects(fixture_path("laptop_objects.csv"), laptop_schema)


@pytest.fixture(scope="session")
def window_laptops(laptop_schema) -> List[ObjectRecord]:
    return load_objects(fixture_path("window_objects.csv"), laptop_schema)


@pytest.fixture(scope="session")
def shoppers(laptop_schema) -> List[UserProfile]:
    """c1 and c2."""
    return load_profiles(fixture_path("laptop_prefs.csv"), laptop_schema)


@pytest.fixture(scope="session")
def shopper_cluster(shoppers) -> ClusterProfile:
    return common_profile("U1", shoppers)


@pytest.fixture(scope="session")
def approx_shopper_cluster(laptop_schema, shoppers) -> ClusterProfile:
    (profile,) = load_profiles(fixture_path("laptop_approx_prefs.csv"), laptop_schema)
    return ClusterProfile("U1", tuple(u.user_id for u in shoppers), profile.relations, ProfileKind.APPROXIMATE)


@pytest.fixture(scope="session")
def brand_schema():
    return load_schema(fixture_path("brand_schema.yaml"))


@pytest.fixture(scope="session")
def customers(brand_schema) -> Dict[str, UserProfile]:
    """c1..c6 over a single brand attribute."""
    return {u.user_id: u for u in load_profiles(fixture_path("customer_prefs.csv"), brand_schema)}


@pytest.fixture(scope="session")
def frequency_users(brand_schema) -> List[UserProfile]:
    return load_profiles(fixture_path("frequency_prefs.csv"), brand_schema)


@pytest.fixture
def small_workload():
    return generate_workload(WorkloadSpec(seed=11, users=12, archetypes=3, objects=120, attributes=3, domain_size=5))


def random_workloads(count: int, *, objects: int = 60):
    """Seeded small instances for property checks."""
    for seed in range(count):
        yield generate_workload(WorkloadSpec(
            seed=seed,
            users=6 + seed % 5,
            archetypes=2 + seed % 3,
            objects=objects,
            attributes=2 + seed % 3,
            domain_size=3 + seed % 4,
            noise=0.2,
            drop=0.2,
        ))
