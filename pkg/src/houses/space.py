"""Hyperparameter search spaces and the unit-cube encoding.

All surrogate and search machinery operates on the normalized unit cube
[0, 1]^D. A :class:`SearchSpace` owns the bijection between raw parameter
values and unit coordinates (log-scaled parameters are mapped linearly in
log space); integer parameters are rounded only when leaving the cube.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import yaml

KINDS = ("continuous", "integer")
SCALES = ("linear", "logarithmic")


@dataclass(frozen=True)
class ParamSpec:
    """One tunable parameter: bounds, integrality and sampling scale."""

    name: str
    kind: str
    lower: float
    upper: float
    scale: str = "linear"

    def __post_init__(self):
        if not self.name:
            raise ValueError("parameter name must be non-empty")
        if self.kind not in KINDS:
            raise ValueError(f"parameter {self.name!r}: kind must be one of {KINDS}, got {self.kind!r}")
        if self.scale not in SCALES:
            raise ValueError(f"parameter {self.name!r}: scale must be one of {SCALES}, got {self.scale!r}")
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError(f"parameter {self.name!r}: bounds must be finite")
        if not self.lower < self.upper:
            raise ValueError(f"parameter {self.name!r}: lower ({self.lower}) must be < upper ({self.upper})")
        if self.scale == "logarithmic" and self.lower <= 0:
            raise ValueError(f"parameter {self.name!r}: logarithmic scale requires lower > 0")
        if self.kind == "integer":
            if self.lower != int(self.lower) or self.upper != int(self.upper):
                raise ValueError(f"parameter {self.name!r}: integer kind requires integer bounds")
            if self.upper - self.lower < 1:
                raise ValueError(f"parameter {self.name!r}: integer kind requires upper - lower >= 1")

    def to_unit(self, value: float) -> float:
        if value < self.lower or value > self.upper:
            raise ValueError(
                f"parameter {self.name!r}: value {value} outside bounds [{self.lower}, {self.upper}]"
            )
        if self.scale == "logarithmic":
            return (np.log(value) - np.log(self.lower)) / (np.log(self.upper) - np.log(self.lower))
        return (value - self.lower) / (self.upper - self.lower)

    def from_unit(self, u: float) -> float | int:
        if u < 0.0 or u > 1.0:
            raise ValueError(f"parameter {self.name!r}: unit coordinate {u} outside [0, 1]")
        if self.scale == "logarithmic":
            value = float(np.exp(np.log(self.lower) + u * (np.log(self.upper) - np.log(self.lower))))
        else:
            value = float(self.lower + u * (self.upper - self.lower))
        if self.kind == "integer":
            return int(min(max(round(value), self.lower), self.upper))
        return value


@dataclass(frozen=True)
class SearchSpace:
    """Ordered collection of parameters spanning the unit cube."""

    params: tuple[ParamSpec, ...]

    def __init__(self, params: Iterable[ParamSpec]):
        object.__setattr__(self, "params", tuple(params))
        if len(self.params) < 1:
            raise ValueError("a search space needs at least one parameter")
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate parameter names: {dupes}")

    @property
    def dim(self) -> int:
        return len(self.params)

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.params]

    def normalize(self, raw: Sequence) -> np.ndarray:
        """Map raw parameter values to unit-cube coordinates."""
        if len(raw) != self.dim:
            raise ValueError(f"expected {self.dim} values, got {len(raw)}")
        return np.array([p.to_unit(v) for p, v in zip(self.params, raw)], dtype=float)

    def denormalize(self, unit: Sequence[float]) -> list:
        """Map unit-cube coordinates back to raw values (integers rounded)."""
        if len(unit) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(unit)}")
        return [p.from_unit(float(u)) for p, u in zip(self.params, unit)]

    def configuration(self, unit: Sequence[float]) -> "Configuration":
        u = np.asarray(unit, dtype=float)
        return Configuration(unit=u, raw=tuple(self.denormalize(u)))

    def to_dict(self) -> list[dict]:
        return [
            {"name": p.name, "kind": p.kind, "lower": p.lower, "upper": p.upper, "scale": p.scale}
            for p in self.params
        ]

    @classmethod
    def from_dict(cls, entries: Iterable[dict]) -> "SearchSpace":
        return cls(
            ParamSpec(
                name=e["name"],
                kind=e["kind"],
                lower=float(e["lower"]),
                upper=float(e["upper"]),
                scale=e.get("scale", "linear"),
            )
            for e in entries
        )


@dataclass(frozen=True)
class Configuration:
    """A point of the search space in both encodings."""

    unit: np.ndarray
    raw: tuple

    def __post_init__(self):
        u = np.asarray(self.unit, dtype=float)
        if u.ndim != 1 or np.any(u < 0.0) or np.any(u > 1.0):
            raise ValueError("unit coordinates must form a vector inside [0, 1]^D")
        object.__setattr__(self, "unit", u)


def lhs_sample(space: SearchSpace, n: int, seed) -> list[Configuration]:
    """Latin Hypercube sample of ``n`` configurations.

    Every dimension is split into ``n`` equal bins; each bin receives exactly
    one sample at a uniform position, and bins are assigned to samples by an
    independent random permutation per dimension. Deterministic given the
    seed.
    """
    if n < 1:
        raise ValueError("lhs_sample requires n >= 1")
    rng = np.random.default_rng(seed)
    unit = np.empty((n, space.dim), dtype=float)
    for d in range(space.dim):
        perm = rng.permutation(n)
        unit[:, d] = (perm + rng.random(n)) / n
    return [space.configuration(unit[i]) for i in range(n)]


def load_space(path: str | Path) -> SearchSpace:
    """Read a space definition file (YAML with a ``params`` list)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict) or "params" not in doc:
        raise ValueError(f"{path}: space file must contain a top-level 'params' list")
    entries = doc["params"]
    if not isinstance(entries, list):
        raise ValueError(f"{path}: 'params' must be a list")
    try:
        return SearchSpace.from_dict(entries)
    except KeyError as exc:
        raise ValueError(f"{path}: parameter entry missing field {exc}") from exc


def save_space(space: SearchSpace, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump({"params": space.to_dict()}, fh, sort_keys=False)
