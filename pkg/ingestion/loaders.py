"""
File formats for schemas, object streams, preference relations, cluster
assignments, archetype labels and interaction logs.

    schema       YAML document: attributes -> [{name, values, bins: [{low, high, value}]}]
    objects      CSV rows  id,value_1,...,value_D        (file order = arrival order)
    preferences  CSV rows  user_id,attribute,better,worse (closed transitively on load)
    clusters     CSV rows  cluster_id,user_id
    ratings log  CSV rows  user_id,item_id,rating,attribute,value
    counts log   CSV rows  user_id,attribute,value,first_count,second_count
    labels       CSV rows  user_id,archetype

A first row starting with the format's first column name is a header; rows
starting with ``#`` and blank rows are skipped.
"""

import codecs
import csv
import io
import os
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

import yaml
from pydantic import ValidationError

from engine.core.errors import (
    DataError,
    DuplicateObjectError,
    ParseError,
    SchemaViolation,
    UnknownValue,
)
from engine.core.preference import PreferenceRelation, UserProfile, relation_from_edges, transitive_reduction
from engine.core.schema import AttributeSchema, ObjectRecord


def _rows(path: str, header: str) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line number, stripped fields) for every data row of a CSV file."""
    if not os.path.exists(path):
        raise ParseError("file not found", path=path)
    with open(path, "rb") as f:
        raw = f.read()
    if raw.startswith(codecs.BOM_UTF8):
        raw = raw[len(codecs.BOM_UTF8):]
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw[:exc.start].count(b"\n") + 1
        raise ParseError(f"invalid UTF-8 byte 0x{raw[exc.start]:02x}", path=path, line=line) from exc
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    try:
        for line_no, row in enumerate(reader, start=1):
            fields = [field.strip() for field in row]
            if not fields or not any(fields) or fields[0].startswith("#"):
                continue
            if line_no == 1 and fields[0] == header:
                continue
            yield line_no, fields
    except csv.Error as exc:
        raise ParseError(f"malformed CSV row: {exc}", path=path, line=reader.line_num) from exc


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------

def load_schema(path: str) -> AttributeSchema:
    if not os.path.exists(path):
        raise ParseError("file not found", path=path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            line = exc.problem_mark.line + 1 if getattr(exc, "problem_mark", None) else None
            raise ParseError(f"invalid YAML: {exc}", path=path, line=line) from exc
    if not isinstance(document, dict) or "attributes" not in document:
        raise ParseError("schema must be a mapping with an 'attributes' list", path=path)
    try:
        return AttributeSchema.model_validate(document)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error["loc"]) or "attributes"
        raise SchemaViolation(field, error["msg"]) from exc


def save_schema(schema: AttributeSchema, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(schema.model_dump(exclude_defaults=True), f, sort_keys=False, allow_unicode=True)


# ---------------------------------------------------------------------------
# Objects
# ---------------------------------------------------------------------------

def load_objects(path: str, schema: AttributeSchema) -> List[ObjectRecord]:
    """Schema-validated records in file order. Timestamps are 1-based arrival indexes."""
    objects: List[ObjectRecord] = []
    seen = set()
    for line_no, fields in _rows(path, "id"):
        object_id, values = fields[0], fields[1:]
        if len(values) != len(schema):
            raise ParseError(
                f"object {object_id!r} has {len(values)} values, schema has {len(schema)} attributes",
                path=path, line=line_no,
            )
        if object_id in seen:
            raise ParseError(str(DuplicateObjectError(object_id)), path=path, line=line_no)
        try:
            encoded = schema.encode_row(values)
        except UnknownValue as exc:
            raise SchemaViolation(exc.attribute, f"unknown value {exc.value!r}", line=line_no) from exc
        seen.add(object_id)
        objects.append(ObjectRecord(object_id, encoded, len(objects) + 1))
    return objects


def save_objects(objects: Sequence[ObjectRecord], schema: AttributeSchema, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["id"] + schema.names)
        for o in objects:
            writer.writerow([o.id] + [schema.value_name(d, v) for d, v in enumerate(o.values)])


# ---------------------------------------------------------------------------
# Preferences
# ---------------------------------------------------------------------------

def load_profiles(path: str, schema: AttributeSchema) -> List[UserProfile]:
    """One profile per user, ordered by first appearance in the file."""
    edges: Dict[str, List[List[Tuple[int, int]]]] = {}
    for line_no, fields in _rows(path, "user_id"):
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", path=path, line=line_no)
        user_id, attribute, better, worse = fields
        per_user = edges.setdefault(user_id, [[] for _ in range(len(schema))])
        if not attribute:
            # a bare user id declares a user without preference tuples
            continue
        try:
            d = schema.attribute_id(attribute)
        except SchemaViolation as exc:
            raise SchemaViolation("attribute", f"unknown attribute {attribute!r}", line=line_no) from exc
        try:
            pair = (schema.value_id(d, better), schema.value_id(d, worse))
        except UnknownValue as exc:
            raise SchemaViolation(exc.attribute, f"unknown value {exc.value!r}", line=line_no) from exc
        per_user[d].append(pair)

    profiles = []
    for user_id, per_attribute in edges.items():
        try:
            relations = tuple(
                relation_from_edges(d, pairs, domain_size=schema.domain_size(d), attribute_name=schema.names[d])
                for d, pairs in enumerate(per_attribute)
            )
        except DataError as exc:
            raise ParseError(f"user {user_id!r}: {exc}", path=path) from exc
        profiles.append(UserProfile(user_id, relations))
    return profiles


def save_profiles(profiles: Sequence[UserProfile], schema: AttributeSchema, path: str) -> None:
    """Write the Hasse edges of every relation; loading closes them again."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["user_id", "attribute", "better", "worse"])
        for profile in profiles:
            if not any(len(r) for r in profile.relations):
                writer.writerow([profile.user_id, "", "", ""])
            for d, relation in enumerate(profile.relations):
                for x, y in transitive_reduction(relation).edges:
                    writer.writerow([profile.user_id, schema.names[d], schema.value_name(d, x), schema.value_name(d, y)])


def relation_names(relation: PreferenceRelation, schema: AttributeSchema) -> List[Tuple[str, str]]:
    d = relation.attribute
    return [(schema.value_name(d, x), schema.value_name(d, y)) for x, y in relation.tuples()]


# ---------------------------------------------------------------------------
# Cluster assignments
# ---------------------------------------------------------------------------

def load_clusters(path: str) -> List[List[str]]:
    """Member groups in file order of first appearance of each cluster id."""
    groups: Dict[str, List[str]] = {}
    for line_no, fields in _rows(path, "cluster_id"):
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", path=path, line=line_no)
        groups.setdefault(fields[0], []).append(fields[1])
    return list(groups.values())


def save_clusters(clusters: Dict[str, Sequence[str]], path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cluster_id", "user_id"])
        for cluster_id, members in clusters.items():
            for user_id in members:
                writer.writerow([cluster_id, user_id])


# ---------------------------------------------------------------------------
# Interaction logs
# ---------------------------------------------------------------------------

RatingLog = Dict[str, List[Tuple[str, Fraction, str, str]]]
CountLog = Dict[str, List[Tuple[str, str, int, int]]]


def load_rating_log(path: str, *, scale: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(5))) -> RatingLog:
    """user -> [(item, rating, attribute, value)]. An item may list several values of one attribute."""
    log: RatingLog = defaultdict(list)
    low, high = scale
    for line_no, fields in _rows(path, "user_id"):
        if len(fields) != 5:
            raise ParseError(f"expected 5 fields, got {len(fields)}", path=path, line=line_no)
        user_id, item_id, raw_rating, attribute, value = fields
        try:
            rating = Fraction(raw_rating)
        except ValueError:
            raise ParseError(f"rating {raw_rating!r} is not a number", path=path, line=line_no) from None
        if not low <= rating <= high:
            raise SchemaViolation("rating", f"{rating} outside [{low}, {high}]", line=line_no)
        log[user_id].append((item_id, rating, attribute, value))
    return dict(log)


def load_count_log(path: str) -> CountLog:
    """user -> [(attribute, value, first_count, second_count)]."""
    log: CountLog = defaultdict(list)
    for line_no, fields in _rows(path, "user_id"):
        if len(fields) != 5:
            raise ParseError(f"expected 5 fields, got {len(fields)}", path=path, line=line_no)
        user_id, attribute, value, first, second = fields
        try:
            p, q = int(first), int(second)
        except ValueError:
            raise ParseError("counts must be integers", path=path, line=line_no) from None
        if p < 0 or q < 0:
            raise SchemaViolation("count", f"negative count ({p}, {q})", line=line_no)
        log[user_id].append((attribute, value, p, q))
    return dict(log)


# ---------------------------------------------------------------------------
# Ground-truth labels
# ---------------------------------------------------------------------------

def load_labels(path: str) -> Dict[str, int]:
    """user -> archetype index."""
    labels: Dict[str, int] = {}
    for line_no, fields in _rows(path, "user_id"):
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", path=path, line=line_no)
        try:
            labels[fields[0]] = int(fields[1])
        except ValueError:
            raise ParseError(f"archetype {fields[1]!r} is not an integer", path=path, line=line_no) from None
    return labels


def save_labels(labels: Dict[str, int], path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["user_id", "archetype"])
        for user_id, label in labels.items():
            writer.writerow([user_id, label])
