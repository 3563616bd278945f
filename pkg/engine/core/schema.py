"""Attribute schema and object records.

The schema interns attribute names and value names into dense integer ids in
declaration order. Numeric attributes carry half-open bins ``[low, high)``
that map a raw number onto one of the attribute's value names before any
dominance test runs.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from pydantic import BaseModel, Field, PrivateAttr, field_validator, model_validator

from engine.core.errors import SchemaMismatch, SchemaViolation, UnknownValue


class ValueBin(BaseModel):
    low: float
    high: float
    value: str

    @model_validator(mode="after")
    def _check_bounds(self) -> "ValueBin":
        if not self.low < self.high:
            raise ValueError(f"bin {self.value!r} has low >= high ({self.low} >= {self.high})")
        return self


class AttributeSpec(BaseModel):
    name: str
    values: List[str] = Field(min_length=1)
    bins: List[ValueBin] = []

    @field_validator("values")
    @classmethod
    def _unique_values(cls, values: List[str]) -> List[str]:
        if len(set(values)) != len(values):
            raise ValueError("value names must be unique within an attribute")
        return values

    @model_validator(mode="after")
    def _check_bins(self) -> "AttributeSpec":
        if not self.bins:
            return self
        ordered = sorted(self.bins, key=lambda b: b.low)
        for left, right in zip(ordered, ordered[1:]):
            # disjoint and gap-free over the declared range
            if left.high != right.low:
                raise ValueError(
                    f"bins of {self.name!r} must be contiguous: {left.value!r} ends at "
                    f"{left.high}, {right.value!r} starts at {right.low}"
                )
        for b in ordered:
            if b.value not in self.values:
                raise ValueError(f"bin value {b.value!r} is not in the domain of {self.name!r}")
        self.bins = ordered
        return self

    @property
    def numeric(self) -> bool:
        return bool(self.bins)

    @property
    def declared_range(self) -> Tuple[float, float]:
        return self.bins[0].low, self.bins[-1].high


class AttributeSchema(BaseModel):
    """Ordered attributes with their domains. Ids follow declaration order."""

    attributes: List[AttributeSpec] = Field(min_length=1)

    _value_ids: List[Dict[str, int]] = PrivateAttr(default_factory=list)
    _attribute_ids: Dict[str, int] = PrivateAttr(default_factory=dict)

    @field_validator("attributes")
    @classmethod
    def _unique_names(cls, attributes: List[AttributeSpec]) -> List[AttributeSpec]:
        names = [a.name for a in attributes]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique")
        return attributes

    def model_post_init(self, __context) -> None:
        self._attribute_ids = {a.name: i for i, a in enumerate(self.attributes)}
        self._value_ids = [{v: j for j, v in enumerate(a.values)} for a in self.attributes]

    @property
    def names(self) -> List[str]:
        return [a.name for a in self.attributes]

    def __len__(self) -> int:
        return len(self.attributes)

    def attribute_id(self, name: str) -> int:
        try:
            return self._attribute_ids[name]
        except KeyError:
            raise SchemaViolation("attribute", f"unknown attribute {name!r}") from None

    def domain_size(self, attribute: int) -> int:
        return len(self.attributes[attribute].values)

    def domain_sizes(self) -> List[int]:
        return [len(a.values) for a in self.attributes]

    def value_id(self, attribute: int, value: str) -> int:
        try:
            return self._value_ids[attribute][value]
        except KeyError:
            raise UnknownValue(self.attributes[attribute].name, value) from None

    def value_name(self, attribute: int, value_id: int) -> str:
        return self.attributes[attribute].values[value_id]

    def discretize(self, attribute: int, number: float) -> int:
        spec = self.attributes[attribute]
        for b in spec.bins:
            if b.low <= number < b.high:
                return self.value_id(attribute, b.value)
        low, high = spec.declared_range
        raise UnknownValue(spec.name, f"{number} (outside [{low}, {high}))")

    def encode(self, attribute: int, raw: str) -> int:
        """Map a raw field (value name, or a number for binned attributes) to a value id."""
        raw = raw.strip()
        spec = self.attributes[attribute]
        if raw in self._value_ids[attribute]:
            return self._value_ids[attribute][raw]
        if spec.numeric:
            try:
                number = float(raw)
            except ValueError:
                raise UnknownValue(spec.name, raw) from None
            return self.discretize(attribute, number)
        raise UnknownValue(spec.name, raw)

    def encode_row(self, fields: Sequence[str]) -> Tuple[int, ...]:
        if len(fields) != len(self.attributes):
            raise SchemaMismatch(
                f"expected {len(self.attributes)} attribute values, got {len(fields)}"
            )
        return tuple(self.encode(i, f) for i, f in enumerate(fields))


@dataclass(frozen=True)
class ObjectRecord:
    """An arriving object: one value id per schema attribute plus its arrival index."""

    id: str
    values: Tuple[int, ...]
    timestamp: int

    def describe(self, schema: AttributeSchema) -> Dict[str, str]:
        return {schema.attributes[i].name: schema.value_name(i, v) for i, v in enumerate(self.values)}
