"""
Seeded synthetic workloads.

Users are noisy copies of a few archetype profiles: every user keeps its
archetype's relations and gains a few random tuples on top (skipped when the
relation already orders the pair), so users of one archetype share at least
the archetype as their common relation. A nonzero ``drop`` also removes Hasse
edges per user, which weakens that shared core.
Objects are uniform over the attribute domains. The archetype of each user is
kept as a ground-truth label.
"""

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from engine.core.preference import PreferenceRelation, UserProfile, relation_from_edges, transitive_reduction
from engine.core.schema import AttributeSchema, AttributeSpec, ObjectRecord
from ingestion.loaders import (
    load_labels,
    load_objects,
    load_profiles,
    load_schema,
    save_labels,
    save_objects,
    save_profiles,
    save_schema,
)


class WorkloadSpec(BaseModel):
    seed: int = 0
    users: int = Field(default=100, ge=1)
    archetypes: int = Field(default=5, ge=1)
    objects: int = Field(default=1000, ge=1)
    attributes: int = Field(default=4, ge=1)
    domain_size: int = Field(default=8, ge=2)
    density: float = Field(default=0.6, gt=0, le=1)
    noise: float = Field(default=0.1, ge=0, le=1)
    drop: float = Field(default=0.0, ge=0, le=1)
    # evaluation mode: None streams append-only only, W adds a windowed pass
    window: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _archetypes_fit(self) -> "WorkloadSpec":
        if self.archetypes > self.users:
            raise ValueError(f"{self.archetypes} archetypes cannot be spread over {self.users} users")
        return self


@dataclass
class Workload:
    schema: AttributeSchema
    users: List[UserProfile]
    objects: List[ObjectRecord]
    labels: Dict[str, int] = field(default_factory=dict)
    window: Optional[int] = None


def synthetic_schema(attributes: int, domain_size: int) -> AttributeSchema:
    return AttributeSchema(
        attributes=[
            AttributeSpec(name=f"a{d + 1}", values=[f"v{j}" for j in range(domain_size)])
            for d in range(attributes)
        ]
    )


def random_relation(rng: np.random.Generator, d: int, domain_size: int, density: float) -> PreferenceRelation:
    """Random strict partial order: pairs taken forward along a random permutation."""
    order = rng.permutation(domain_size)
    edges = [
        (int(order[i]), int(order[j]))
        for i in range(domain_size)
        for j in range(i + 1, domain_size)
        if rng.random() < density
    ]
    return relation_from_edges(d, edges, domain_size=domain_size)


def perturb_relation(
    rng: np.random.Generator, relation: PreferenceRelation, noise: float, drop: float = 0.0
) -> PreferenceRelation:
    """One user's copy of an archetype relation.

    Each Hasse edge is lost with probability ``drop``; then about
    ``noise / 2`` of all value pairs are offered as extra tuples, skipping
    any the current closure already orders either way.
    """
    if noise == 0 and drop == 0:
        return relation
    size = relation.domain_size
    edges = transitive_reduction(relation).edges
    kept = [edge for edge in edges if rng.random() >= drop] if drop else list(edges)
    closure = relation_from_edges(relation.attribute, kept, domain_size=size).closure
    extra = int(rng.binomial(size * (size - 1) // 2, noise / 2)) if noise else 0
    for _ in range(extra):
        x, y = (int(v) for v in rng.choice(size, 2, replace=False))
        if closure[y, x] or closure[x, y]:
            continue
        kept.append((x, y))
        closure = relation_from_edges(relation.attribute, kept, domain_size=size).closure
    return relation_from_edges(relation.attribute, kept, domain_size=size)


def generate_workload(spec: WorkloadSpec) -> Workload:
    """Deterministic under ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    schema = synthetic_schema(spec.attributes, spec.domain_size)
    archetypes = [
        tuple(random_relation(rng, d, spec.domain_size, spec.density) for d in range(spec.attributes))
        for _ in range(spec.archetypes)
    ]
    users: List[UserProfile] = []
    labels: Dict[str, int] = {}
    for i in range(spec.users):
        label = i % spec.archetypes
        user_id = f"c{i + 1}"
        relations = tuple(perturb_relation(rng, r, spec.noise, spec.drop) for r in archetypes[label])
        users.append(UserProfile(user_id, relations))
        labels[user_id] = label
    values = rng.integers(0, spec.domain_size, size=(spec.objects, spec.attributes))
    objects = [
        ObjectRecord(f"o{i + 1}", tuple(int(v) for v in row), i + 1) for i, row in enumerate(values)
    ]
    return Workload(schema=schema, users=users, objects=objects, labels=labels, window=spec.window)


def save_workload(workload: Workload, out_dir: str) -> Dict[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "schema": os.path.join(out_dir, "schema.yaml"),
        "objects": os.path.join(out_dir, "objects.csv"),
        "prefs": os.path.join(out_dir, "prefs.csv"),
        "labels": os.path.join(out_dir, "labels.csv"),
    }
    save_schema(workload.schema, paths["schema"])
    save_objects(workload.objects, workload.schema, paths["objects"])
    save_profiles(workload.users, workload.schema, paths["prefs"])
    save_labels(workload.labels, paths["labels"])
    return paths


def load_workload(out_dir: str) -> Workload:
    schema = load_schema(os.path.join(out_dir, "schema.yaml"))
    labels_path = os.path.join(out_dir, "labels.csv")
    labels = load_labels(labels_path) if os.path.exists(labels_path) else {}
    return Workload(
        schema=schema,
        users=load_profiles(os.path.join(out_dir, "prefs.csv"), schema),
        objects=load_objects(os.path.join(out_dir, "objects.csv"), schema),
        labels=labels,
    )
