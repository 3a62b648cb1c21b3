"""Candidate generation: grid-based parent selection and importance-weighted
bounded polynomial mutation, scored through the surrogate's acquisition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acquisition import AcquisitionSpec, score
from .gp import GPModel, predict

IMPORTANCE_SMOOTHING = 0.01


@dataclass(frozen=True)
class ESConfig:
    """Search knobs: grids per dimension, offspring per parent, mutation
    rate (None defaults to 1/D at run time), distribution index and the
    per-gene probability clamps."""

    grids: int = 5
    offspring: int = 10
    mutation_rate: float | None = None
    eta: float = 20.0
    p_min: float = 0.05
    p_max: float = 0.95

    def __post_init__(self):
        if self.grids < 1:
            raise ValueError("grids must be >= 1")
        if self.offspring < 1:
            raise ValueError("offspring must be >= 1")
        if self.mutation_rate is not None and not 0.0 < self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in (0, 1]")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0.0 < self.p_min <= self.p_max <= 1.0:
            raise ValueError("need 0 < p_min <= p_max <= 1")

    def rate_for(self, dim: int) -> float:
        return self.mutation_rate if self.mutation_rate is not None else 1.0 / dim


def grid_select(units: np.ndarray, values: np.ndarray, grids: int) -> np.ndarray:
    """Indices of the best record in every (dimension, bin) cell.

    Each dimension of [0, 1] is split into ``grids`` equal bins (the
    upper endpoint belongs to the last bin); the lowest-value record per
    non-empty cell is kept, deduplicated, in ascending index order.
    """
    units = np.atleast_2d(np.asarray(units, dtype=float))
    values = np.asarray(values, dtype=float).ravel()
    if units.shape[0] == 0:
        raise ValueError("grid_select requires a nonempty history")
    if units.shape[0] != values.shape[0]:
        raise ValueError("units and values must have matching lengths")
    bins = np.minimum((units * grids).astype(int), grids - 1)
    winners: dict[tuple[int, int], int] = {}
    for d in range(units.shape[1]):
        for i in range(units.shape[0]):
            cell = (d, bins[i, d])
            held = winners.get(cell)
            if held is None or values[i] < values[held]:
                winners[cell] = i
    return np.array(sorted(set(winners.values())), dtype=int)


def mutation_probabilities(importances: np.ndarray, config: ESConfig) -> np.ndarray:
    """Per-gene mutation probabilities proportional to smoothed importances.

    The unclamped probabilities average to the base rate; clamping to
    [p_min, p_max] is applied last.
    """
    imp = np.asarray(importances, dtype=float)
    if abs(float(imp.sum()) - 1.0) > 1e-6:
        raise ValueError("importances must sum to 1")
    dim = imp.shape[0]
    rate = config.rate_for(dim)
    weights = imp + IMPORTANCE_SMOOTHING
    probs = rate * dim * weights / weights.sum()
    return np.clip(probs, config.p_min, config.p_max)


def polynomial_mutation(parent: np.ndarray, probs: np.ndarray, eta: float,
                        rng: np.random.Generator) -> np.ndarray:
    """Bounded polynomial mutation of a unit vector.

    Per gene, with its own probability, a spread drawn from the
    polynomial distribution with index ``eta`` moves the gene toward
    one of the bounds, scaled by the distance to that bound; draws are
    consumed in gene order (gate first, then the spread when mutating).
    """
    parent = np.asarray(parent, dtype=float)
    if np.any(parent < 0.0) or np.any(parent > 1.0):
        raise ValueError("parent must lie in the unit cube")
    child = parent.copy()
    exponent = 1.0 / (eta + 1.0)
    for d in range(child.shape[0]):
        if rng.random() >= probs[d]:
            continue
        r = rng.random()
        if r < 0.5:
            delta = (2.0 * r) ** exponent - 1.0
            child[d] += delta * child[d]
        else:
            delta = 1.0 - (2.0 * (1.0 - r)) ** exponent
            child[d] += delta * (1.0 - child[d])
    return np.clip(child, 0.0, 1.0)


def propose(model: GPModel, spec: AcquisitionSpec, parent_units: np.ndarray,
            importances: np.ndarray, config: ESConfig,
            rng: np.random.Generator) -> np.ndarray:
    """Mutate every parent into offspring and return the acquisition-best one.

    Each parent owns an independent child RNG stream, so results do not
    depend on evaluation order. Ties break toward the lowest predictive
    mean, then the lowest candidate index.
    """
    parents = np.atleast_2d(np.asarray(parent_units, dtype=float))
    if parents.shape[0] == 0:
        raise ValueError("propose requires a nonempty parent set")
    probs = mutation_probabilities(importances, config)
    streams = rng.spawn(parents.shape[0])
    candidates = np.empty((parents.shape[0] * config.offspring, parents.shape[1]))
    row = 0
    for parent, stream in zip(parents, streams):
        for _ in range(config.offspring):
            candidates[row] = polynomial_mutation(parent, probs, config.eta, stream)
            row += 1
    mean, var = predict(model, candidates)
    scores = score(spec, mean, np.sqrt(var))
    best = 0
    for i in range(1, candidates.shape[0]):
        if scores[i] > scores[best] or (scores[i] == scores[best] and mean[i] < mean[best]):
            best = i
    return candidates[best]


def ensure_novel(point: np.ndarray, evaluated_units: np.ndarray, probs: np.ndarray,
                 eta: float, rng: np.random.Generator, tol: float = 1e-9,
                 max_tries: int = 10) -> np.ndarray:
    """Avoid spending a true evaluation on an already-evaluated point.

    A proposal matching an evaluated point within ``tol`` per coordinate
    is re-mutated up to ``max_tries`` times, then replaced by a uniform
    random point.
    """
    evaluated = np.atleast_2d(np.asarray(evaluated_units, dtype=float))

    def is_duplicate(p: np.ndarray) -> bool:
        return evaluated.shape[0] > 0 and bool(
            np.any(np.all(np.abs(evaluated - p) <= tol, axis=1))
        )

    candidate = np.asarray(point, dtype=float)
    for _ in range(max_tries):
        if not is_duplicate(candidate):
            return candidate
        candidate = polynomial_mutation(candidate, probs, eta, rng)
    if is_duplicate(candidate):
        candidate = rng.random(candidate.shape[0])
    return candidate
