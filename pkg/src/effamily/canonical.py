"""Deterministic, byte-for-byte reproducible JSON.

Payloads are normalized to JSON primitives and serialized per RFC 8785 (JCS):
sorted keys, no insignificant whitespace, UTF-8. Rationals are always "p/q"
strings and floats are refused, so nothing inexact reaches an archive.
"""

import hashlib
import json
from dataclasses import asdict, is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

import rfc8785

from effamily.params import format_rational


def normalize(value: Any) -> Any:
    """Recursively convert toolkit values into JSON primitives.

    Fractions become "p/q", enums their value, dataclasses their fields,
    objects with `to_dict()` their dict form.

    Raises:
        TypeError: On floats or any type with no JSON form.
    """
    if isinstance(value, Enum):
        return normalize(value.value)
    if value is None or isinstance(value, bool | int | str):
        return value
    if isinstance(value, float):
        msg = f"Floats are not allowed in canonical payloads: {value!r}"
        raise TypeError(msg)
    if isinstance(value, Fraction):
        return format_rational(value)
    if hasattr(value, "to_dict"):
        return normalize(value.to_dict())
    if is_dataclass(value) and not isinstance(value, type):
        return normalize(asdict(value))
    if isinstance(value, dict):
        return {str(k): normalize(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [normalize(item) for item in value]
    msg = f"Cannot serialize type {type(value).__name__} to canonical JSON"
    raise TypeError(msg)


def canonical_bytes(value: Any) -> bytes:
    """RFC 8785 serialization of `normalize(value)`."""
    return rfc8785.dumps(normalize(value))


def canonical_json(value: Any) -> str:
    """`canonical_bytes` decoded as UTF-8."""
    return canonical_bytes(value).decode("utf-8")


def canonical_hash(value: Any) -> str:
    """Hex SHA-256 of the canonical bytes, used to tie derived data to its source."""
    return hashlib.sha256(canonical_bytes(value)).hexdigest()


def loads(text: str | bytes) -> Any:
    """Parse archive JSON, refusing floats the same way `normalize` does."""

    def _no_float(token: str) -> Any:
        msg = f"Floats are not allowed in canonical payloads: {token}"
        raise ValueError(msg)

    return json.loads(text, parse_float=_no_float)
