"""Parsing and validation of TTP benchmark instances.

File format is the usual line-oriented ``KEY: VALUE`` header followed by a
NODE_COORD_SECTION and an ITEMS SECTION.  An EDGE_WEIGHT_SECTION (row-major
full matrix) is accepted when EDGE_WEIGHT_TYPE is EXPLICIT, for fixtures that
are defined by travel distances rather than coordinates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np


class ParseError(ValueError):
    """Malformed instance file; carries the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EdgeWeightType(str, Enum):
    CEIL_2D = "CEIL_2D"
    EUC_2D = "EUC_2D"
    EXPLICIT = "EXPLICIT"


@dataclass(frozen=True)
class Item:
    """One collectible item, 1-based index, homed at a city in 2..n."""

    index: int
    profit: float
    weight: float
    city: int


@dataclass(frozen=True)
class Instance:
    """Immutable problem data.  City and item ids are 1-based."""

    name: str
    n: int
    m: int
    coords: Optional[np.ndarray]  # shape (n, 2) or None for EXPLICIT
    items: tuple[Item, ...]
    capacity: float
    v_min: float
    v_max: float
    renting_ratio: float
    edge_weight_type: EdgeWeightType = EdgeWeightType.CEIL_2D
    explicit_dist: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("instance needs at least 2 cities")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if not (0 < self.v_min < self.v_max):
            raise ValueError("need 0 < v_min < v_max")
        if self.renting_ratio < 0:
            raise ValueError("renting ratio must be nonnegative")
        if len(self.items) != self.m:
            raise ValueError("item count mismatch")
        for it in self.items:
            if not (2 <= it.city <= self.n):
                raise ValueError(f"item {it.index} homed at invalid city {it.city}")
            if it.profit <= 0 or it.weight <= 0:
                raise ValueError(f"item {it.index} must have positive profit and weight")
        if self.edge_weight_type is EdgeWeightType.EXPLICIT:
            d = self.explicit_dist
            if d is None or d.shape != (self.n, self.n):
                raise ValueError("EXPLICIT instances need a full n x n distance matrix")
            if not np.allclose(d, d.T):
                raise ValueError("explicit distance matrix must be symmetric")
            if not np.allclose(np.diag(d), 0.0):
                raise ValueError("explicit distance matrix must have zero diagonal")
        elif self.coords is None or self.coords.shape != (self.n, 2):
            raise ValueError("coordinate instances need an n x 2 coordinate array")

    @property
    def weight_velocity_slope(self) -> float:
        """Velocity lost per unit of carried weight: (v_max - v_min) / W."""
        return (self.v_max - self.v_min) / self.capacity

    def distance(self, i: int, j: int) -> float:
        """Distance between cities ``i`` and ``j`` (1-based ids)."""
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"city id out of range: ({i}, {j})")
        if self.edge_weight_type is EdgeWeightType.EXPLICIT:
            return float(self.explicit_dist[i - 1, j - 1])
        dx = self.coords[i - 1, 0] - self.coords[j - 1, 0]
        dy = self.coords[i - 1, 1] - self.coords[j - 1, 1]
        d = math.hypot(dx, dy)
        if self.edge_weight_type is EdgeWeightType.CEIL_2D:
            return float(math.ceil(d))
        return float(round(d))  # EUC_2D, TSPLIB nearest-integer rounding

    def items_at_city(self) -> list[list[Item]]:
        """Items grouped by home city; entry ``k`` holds the items of city k+1."""
        by_city: list[list[Item]] = [[] for _ in range(self.n)]
        for it in self.items:
            by_city[it.city - 1].append(it)
        return by_city

    @property
    def total_item_weight(self) -> float:
        return sum(it.weight for it in self.items)


_HEADER_KEYS = {
    "PROBLEM NAME": "name",
    "NAME": "name",
    "DIMENSION": "n",
    "NUMBER OF ITEMS": "m",
    "CAPACITY OF KNAPSACK": "capacity",
    "MIN SPEED": "v_min",
    "MAX SPEED": "v_max",
    "RENTING RATIO": "renting_ratio",
    "EDGE_WEIGHT_TYPE": "edge_weight_type",
    "KNAPSACK DATA TYPE": None,  # informational
    "COMMENT": None,
    "TYPE": None,
}

_REQUIRED = ("n", "m", "capacity", "v_min", "v_max", "renting_ratio")


def _parse_number(text: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", lineno) from None


def parse_instance(text: str | Iterable[str]) -> Instance:
    """Parse a TTP benchmark file into a validated :class:`Instance`."""
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in text]

    header: dict[str, object] = {"name": "unnamed", "edge_weight_type": "CEIL_2D"}
    coords: dict[int, tuple[float, float]] = {}
    items: dict[int, Item] = {}
    matrix_rows: list[list[float]] = []
    section = None  # None | "coords" | "items" | "matrix"

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        upper = line.upper()
        if upper.startswith("NODE_COORD_SECTION"):
            section = "coords"
            continue
        if upper.startswith("ITEMS SECTION"):
            section = "items"
            continue
        if upper.startswith("EDGE_WEIGHT_SECTION"):
            section = "matrix"
            continue
        if upper == "EOF":
            break

        if section is None:
            if ":" not in line:
                raise ParseError(f"expected 'KEY: VALUE' header, got {line!r}", lineno)
            key, _, value = line.partition(":")
            key = key.strip().upper()
            value = value.strip()
            if key not in _HEADER_KEYS:
                warnings.warn(f"ignoring unknown header key {key!r} (line {lineno})")
                continue
            field_name = _HEADER_KEYS[key]
            if field_name is None:
                continue
            if field_name in ("name", "edge_weight_type"):
                header[field_name] = value
            elif field_name in ("n", "m"):
                header[field_name] = int(_parse_number(value, lineno))
            else:
                header[field_name] = _parse_number(value, lineno)
        elif section == "coords":
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(f"expected 'index x y', got {line!r}", lineno)
            idx = int(_parse_number(parts[0], lineno))
            n = header.get("n")
            if n is None or not (1 <= idx <= n):
                raise ParseError(f"city index {idx} out of range", lineno)
            if idx in coords:
                raise ParseError(f"duplicate city index {idx}", lineno)
            coords[idx] = (_parse_number(parts[1], lineno), _parse_number(parts[2], lineno))
        elif section == "items":
            parts = line.split()
            if len(parts) != 4:
                raise ParseError(f"expected 'index profit weight city', got {line!r}", lineno)
            idx = int(_parse_number(parts[0], lineno))
            m = header.get("m")
            if m is None or not (1 <= idx <= m):
                raise ParseError(f"item index {idx} out of range", lineno)
            if idx in items:
                raise ParseError(f"duplicate item index {idx}", lineno)
            city = int(_parse_number(parts[3], lineno))
            n = header.get("n", 0)
            if city == 1:
                raise ParseError(f"item {idx} assigned to the start city", lineno)
            if not (2 <= city <= n):
                raise ParseError(f"item {idx} references invalid city {city}", lineno)
            items[idx] = Item(
                index=idx,
                profit=_parse_number(parts[1], lineno),
                weight=_parse_number(parts[2], lineno),
                city=city,
            )
        elif section == "matrix":
            matrix_rows.append([_parse_number(p, lineno) for p in line.split()])

    for req in _REQUIRED:
        if req not in header:
            raise ParseError(f"missing required header field for {req!r}")

    n = int(header["n"])
    m = int(header["m"])
    try:
        ewt = EdgeWeightType(str(header["edge_weight_type"]))
    except ValueError:
        raise ParseError(f"unsupported edge weight type {header['edge_weight_type']!r}") from None

    if len(items) != m:
        raise ParseError(f"expected {m} items, found {len(items)}")
    item_tuple = tuple(items[k] for k in sorted(items))

    explicit = None
    coord_arr = None
    if ewt is EdgeWeightType.EXPLICIT:
        flat = [v for row in matrix_rows for v in row]
        if len(flat) != n * n:
            raise ParseError(f"expected {n * n} distance entries, found {len(flat)}")
        explicit = np.array(flat, dtype=float).reshape(n, n)
        if coords:
            coord_arr = np.array([coords[i] for i in range(1, n + 1)], dtype=float)
    else:
        if len(coords) != n:
            raise ParseError(f"expected {n} coordinate lines, found {len(coords)}")
        coord_arr = np.array([coords[i] for i in range(1, n + 1)], dtype=float)

    try:
        return Instance(
            name=str(header["name"]),
            n=n,
            m=m,
            coords=coord_arr,
            items=item_tuple,
            capacity=float(header["capacity"]),
            v_min=float(header["v_min"]),
            v_max=float(header["v_max"]),
            renting_ratio=float(header["renting_ratio"]),
            edge_weight_type=ewt,
            explicit_dist=explicit,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def serialize_instance(inst: Instance) -> str:
    """Render an Instance back into the benchmark file format."""
    out = [
        f"PROBLEM NAME: {inst.name}",
        f"DIMENSION: {inst.n}",
        f"NUMBER OF ITEMS: {inst.m}",
        f"CAPACITY OF KNAPSACK: {inst.capacity:g}",
        f"MIN SPEED: {inst.v_min:g}",
        f"MAX SPEED: {inst.v_max:g}",
        f"RENTING RATIO: {inst.renting_ratio:g}",
        f"EDGE_WEIGHT_TYPE: {inst.edge_weight_type.value}",
    ]
    if inst.edge_weight_type is EdgeWeightType.EXPLICIT:
        out.append("EDGE_WEIGHT_SECTION")
        for row in inst.explicit_dist:
            out.append(" ".join(f"{v:g}" for v in row))
    else:
        out.append("NODE_COORD_SECTION (INDEX, X, Y):")
        for i, (x, y) in enumerate(inst.coords, start=1):
            out.append(f"{i} {x:g} {y:g}")
    out.append("ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):")
    for it in inst.items:
        out.append(f"{it.index} {it.profit:g} {it.weight:g} {it.city}")
    return "\n".join(out) + "\n"


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh)
