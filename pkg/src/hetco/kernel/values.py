"""Canonical data model: exact rationals, booleans, strings and key-value maps."""

from __future__ import annotations

import json
from collections.abc import Mapping
from fractions import Fraction
from typing import Any, Iterator, Union

Value = Union[Fraction, bool, str]


def as_value(x: Any) -> Value:
    """Coerce a Python scalar into a canonical Value.

    ``int`` and ``float`` become exact :class:`Fraction` (floats via their
    shortest decimal repr, so ``0.1`` is 1/10).
    """
    if isinstance(x, bool):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return x
    raise TypeError(f"not a canonical value: {x!r}")


def kind_of(v: Any) -> str:
    if isinstance(v, bool):
        return "BOOL"
    if isinstance(v, Fraction):
        return "NUM"
    if isinstance(v, str):
        return "STR"
    if isinstance(v, VarMap):
        return "RECORD"
    raise TypeError(f"not a canonical value: {v!r}")


_KIND_ORDER = {"BOOL": 0, "NUM": 1, "STR": 2, "RECORD": 3}


def value_key(v: Any) -> tuple:
    """Total order over values of mixed kinds, for canonical sorting."""
    k = kind_of(v)
    if k == "RECORD":
        return (3, tuple((name, value_key(x)) for name, x in v.items()))
    return (_KIND_ORDER[k], v)


def same_value(a: Any, b: Any) -> bool:
    """Exact equality that never conflates ``True`` with ``1``."""
    return kind_of(a) == kind_of(b) and a == b


def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, VarMap):
        return "{" + ", ".join(f"{k}: {format_value(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"not a canonical value: {v!r}")


def value_to_json(v: Any) -> Any:
    """JSON-friendly encoding; non-integral rationals become ``"n/d"`` strings."""
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else str(v)
    if isinstance(v, VarMap):
        return {k: value_to_json(x) for k, x in v.items()}
    return v


class VarMap(Mapping):
    """Immutable, hashable map from variable name to Value, iterated in key order."""

    __slots__ = ("_items", "_index", "_hash")

    def __init__(self, data: Mapping[str, Any] | Any = ()):
        d = dict(data)
        for k in d:
            if not isinstance(k, str) or not k:
                raise TypeError(f"variable names must be non-empty strings, got {k!r}")
        index = {k: (v if isinstance(v, VarMap) else as_value(v)) for k, v in d.items()}
        self._index = index
        self._items = tuple(sorted(index.items()))
        self._hash = None

    def __getitem__(self, key: str) -> Value:
        return self._index[key]

    def __iter__(self) -> Iterator[str]:
        return (k for k, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def _tagged(self) -> tuple:
        return tuple((k, kind_of(v), v) for k, v in self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VarMap):
            return NotImplemented
        return self._tagged() == other._tagged()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._tagged())
        return self._hash

    def __repr__(self) -> str:
        return "VarMap({" + ", ".join(f"{k!r}: {v!r}" for k, v in self._items) + "})"

    def set(self, key: str, value: Any) -> "VarMap":
        d = dict(self._index)
        d[key] = value
        return VarMap(d)

    def without(self, key: str) -> "VarMap":
        d = dict(self._index)
        d.pop(key, None)
        return VarMap(d)

    def merged(self, other: Mapping[str, Any]) -> "VarMap":
        d = dict(self._index)
        d.update(other)
        return VarMap(d)


EMPTY = VarMap()
