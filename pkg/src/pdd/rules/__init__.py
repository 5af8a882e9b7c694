"""Deterministic entity-recognition detector."""

from pdd.rules.checksums import iban_check_digits, iban_valid, luhn_checksum, luhn_valid
from pdd.rules.engine import (
    AggregationPolicy,
    classify_column_rules,
    classify_dataset_rules,
    serialize_columnwise,
    serialize_rowwise,
)
from pdd.rules.recognizers import (
    ENTITY_CLASS,
    EntityHit,
    EntityKind,
    build_recognizers,
    entity_is_personal,
    recognize,
)

__all__ = [
    "ENTITY_CLASS",
    "AggregationPolicy",
    "EntityHit",
    "EntityKind",
    "build_recognizers",
    "classify_column_rules",
    "classify_dataset_rules",
    "entity_is_personal",
    "iban_check_digits",
    "iban_valid",
    "luhn_checksum",
    "luhn_valid",
    "recognize",
    "serialize_columnwise",
    "serialize_rowwise",
]
