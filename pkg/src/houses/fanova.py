"""Variance-based per-dimension importance of a predictor on the unit cube.

For each dimension, the marginal response curve averages the predictor
over all other dimensions with a scrambled low-discrepancy sample and
subtracts the empirical global mean. Dimension variances are the mean
squared marginal values on the grid; importances are their shares of
the total. Interaction terms (joint subsets of dimensions) are out of
scope, so the shares sum to one by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

DEGENERATE_VARIANCE = 1e-12


@dataclass(frozen=True)
class MarginalCurve:
    """Mean-centered marginal response of one dimension on a grid."""

    dimension: int
    grid: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class ImportanceReport:
    """Per-dimension variance decomposition: I_d = V_d / sum(V)."""

    total_variance: float
    variances: np.ndarray
    importances: np.ndarray


def _complement_sample(dim_count: int, mc_samples: int, seed) -> np.ndarray:
    if dim_count == 1:
        return np.zeros((mc_samples, 0))
    sampler = qmc.Halton(d=dim_count - 1, scramble=True, seed=np.random.default_rng(seed))
    return sampler.random(mc_samples)


def _raw_marginal(predictor, dim_count: int, d: int, grid: np.ndarray, Z: np.ndarray) -> np.ndarray:
    n_grid, n_mc = grid.shape[0], Z.shape[0]
    points = np.empty((n_grid * n_mc, dim_count))
    others = [j for j in range(dim_count) if j != d]
    points[:, others] = np.tile(Z, (n_grid, 1))
    points[:, d] = np.repeat(grid, n_mc)
    values = np.asarray(predictor(points), dtype=float).reshape(n_grid, n_mc)
    return values.mean(axis=1)


def _validate(dim_count: int, grid_size: int, mc_samples: int) -> None:
    if dim_count < 1:
        raise ValueError("dim_count must be >= 1")
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if mc_samples < 1:
        raise ValueError("mc_samples must be >= 1")


def marginal_curve(predictor, dim_count: int, d: int, grid_size: int = 20,
                   mc_samples: int = 512, seed=0) -> MarginalCurve:
    """Mean-centered marginal response of dimension ``d``.

    ``predictor`` must map an (m, D) array of unit-cube points to m
    values. Deterministic given the seed.
    """
    _validate(dim_count, grid_size, mc_samples)
    if not 0 <= d < dim_count:
        raise ValueError(f"dimension {d} out of range for {dim_count}-dimensional input")
    grid = np.linspace(0.0, 1.0, grid_size)
    Z = _complement_sample(dim_count, mc_samples, seed)
    raw = _raw_marginal(predictor, dim_count, d, grid, Z)
    return MarginalCurve(dimension=d, grid=grid, values=raw - raw.mean())


def importance(predictor, dim_count: int, grid_size: int = 20,
               mc_samples: int = 512, seed=0) -> ImportanceReport:
    """Variance share of every dimension; a flat predictor falls back to 1/D."""
    _validate(dim_count, grid_size, mc_samples)
    grid = np.linspace(0.0, 1.0, grid_size)
    Z = _complement_sample(dim_count, mc_samples, seed)
    variances = np.empty(dim_count)
    for d in range(dim_count):
        raw = _raw_marginal(predictor, dim_count, d, grid, Z)
        centered = raw - raw.mean()
        variances[d] = float(np.mean(centered**2))
    total = float(np.sum(variances))
    if total < DEGENERATE_VARIANCE:
        shares = np.full(dim_count, 1.0 / dim_count)
    else:
        shares = variances / total
    return ImportanceReport(total_variance=total, variances=variances, importances=shares)
