"""Bridging abstract states and real vectors for acceleration.

An abstract state over v variables maps to a 2v-coordinate vector laid
out as (lower_1, upper_1, ..., lower_v, upper_v).  Infinite bounds
cannot enter the numeric transformations, so extraction reports them
as an excluded coordinate set and combination restores them as the
corresponding infinity.  Accelerated estimates occasionally come back
with an inverted pair (lower > upper); combination swaps the pair and
flags the variable so callers can skip injecting it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .intervals import BOTTOM, AbstractState, Interval

Coord = tuple[str, str]  # (variable name, "lower" | "upper")


@dataclass(frozen=True)
class ExtractionSchema:
    """Fixed coordinate layout for one analysis run."""

    coords: tuple[Coord, ...]

    def __post_init__(self) -> None:
        if len(self.coords) % 2 != 0:
            raise ValueError("schema must pair lower and upper coordinates")
        for j in range(0, len(self.coords), 2):
            (v1, k1), (v2, k2) = self.coords[j], self.coords[j + 1]
            if v1 != v2 or k1 != "lower" or k2 != "upper":
                raise ValueError(
                    "schema coordinates must come as (var, lower), (var, upper) pairs"
                )
        names = [v for v, _ in self.coords[::2]]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable in extraction schema")

    @classmethod
    def for_variables(cls, names: Sequence[str]) -> "ExtractionSchema":
        coords: list[Coord] = []
        for name in names:
            coords.append((name, "lower"))
            coords.append((name, "upper"))
        return cls(tuple(coords))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coords[::2])

    @property
    def dimension(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class ExtractionResult:
    """The finite coordinates of a state plus the excluded coordinates."""

    vector: np.ndarray
    excluded: frozenset[Coord]

    @property
    def nothing_to_accelerate(self) -> bool:
        return len(self.vector) == 0


def extract(x: AbstractState, schema: ExtractionSchema) -> ExtractionResult:
    """Read the state's bounds into a vector per the schema layout.

    Infinite bounds — and both bounds of a Bottom component — go to the
    excluded set instead of the vector.  If everything is excluded the
    result signals "nothing to accelerate" via the flag.
    """
    if x.names != schema.variables:
        raise ValueError(
            f"state variables {x.names} do not match schema {schema.variables}"
        )
    values: list[float] = []
    excluded: set[Coord] = set()
    for name, iv in x:
        if iv.is_bottom:
            excluded.add((name, "lower"))
            excluded.add((name, "upper"))
            continue
        for kind, bound in (("lower", iv.lo), ("upper", iv.hi)):
            if math.isinf(bound):
                excluded.add((name, kind))
            else:
                values.append(bound)
    return ExtractionResult(np.array(values), frozenset(excluded))


def combine_detailed(
    y: Sequence[float],
    excluded: frozenset[Coord] | set[Coord],
    schema: ExtractionSchema,
) -> tuple[AbstractState, frozenset[str]]:
    """Rebuild an abstract state from a vector, also reporting which
    variables had their (inverted) bound pair swapped."""
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise ValueError("combine expects a flat coordinate vector")
    if np.any(np.isnan(arr)) or np.any(np.isinf(arr)):
        raise ValueError("combined vector must contain only finite values")
    expected = schema.dimension - len(excluded)
    if len(arr) != expected:
        raise ValueError(
            f"vector has {len(arr)} coordinates, schema minus excluded "
            f"requires {expected}"
        )
    pos = 0
    items: list[tuple[str, Interval]] = []
    swapped: set[str] = set()
    for j in range(0, schema.dimension, 2):
        name = schema.coords[j][0]
        if schema.coords[j] in excluded:
            lo = -math.inf
        else:
            lo = float(arr[pos])
            pos += 1
        if schema.coords[j + 1] in excluded:
            hi = math.inf
        else:
            hi = float(arr[pos])
            pos += 1
        if lo > hi:
            lo, hi = hi, lo
            swapped.add(name)
        items.append((name, Interval(lo, hi)))
    return AbstractState(items), frozenset(swapped)


def combine(
    y: Sequence[float],
    excluded: frozenset[Coord] | set[Coord],
    schema: ExtractionSchema,
) -> AbstractState:
    """Rebuild an abstract state from a vector (see combine_detailed)."""
    state, _ = combine_detailed(y, excluded, schema)
    return state
