"""Acquisition scoring of surrogate predictions (minimization objective).

Higher score means more promising. Probability of improvement and
expected improvement use the standard closed forms; the confidence-bound
score is ``w * sigma - mean`` so that maximizing it minimizes the lower
confidence bound of the predicted objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

ACQUISITION_KINDS = ("pi", "ei", "ucb")

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class AcquisitionSpec:
    """Which score to use, the incumbent best value, and the UCB weight."""

    kind: str
    f_best: float
    w: float = 2.0

    def __post_init__(self):
        if self.kind not in ACQUISITION_KINDS:
            raise ValueError(f"unknown acquisition kind {self.kind!r}")
        if not np.isfinite(self.f_best):
            raise ValueError("f_best must be finite")
        if self.w < 0:
            raise ValueError("exploration weight must be nonnegative")


def _phi(z):
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def score(spec: AcquisitionSpec, mean, sigma):
    """Acquisition value for predictive mean(s) and standard deviation(s).

    Accepts scalars or equally shaped arrays; ``sigma`` must be
    nonnegative and all inputs finite.
    """
    mean = np.asarray(mean, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(sigma))):
        raise ValueError("acquisition inputs must be finite")
    if np.any(sigma < 0):
        raise ValueError("sigma must be nonnegative")

    if spec.kind == "ucb":
        out = spec.w * sigma - mean
    else:
        improvement = spec.f_best - mean
        positive = sigma > 0
        safe_sigma = np.where(positive, sigma, 1.0)
        gamma = improvement / safe_sigma
        if spec.kind == "pi":
            out = np.where(positive, ndtr(gamma), (improvement > 0).astype(float))
        else:  # ei
            closed = safe_sigma * (gamma * ndtr(gamma) + _phi(gamma))
            out = np.where(positive, closed, np.maximum(improvement, 0.0))
    return float(out) if out.ndim == 0 else out


def argbest(spec: AcquisitionSpec, candidates):
    """Pick the candidate (point, mean, sigma) with the highest score.

    Ties break toward the lowest predictive mean, then the lowest index.
    """
    items = list(candidates)
    if not items:
        raise ValueError("argbest requires at least one candidate")
    means = np.array([c[1] for c in items], dtype=float)
    sigmas = np.array([c[2] for c in items], dtype=float)
    scores = np.atleast_1d(score(spec, means, sigmas))
    best = 0
    for i in range(1, len(items)):
        if scores[i] > scores[best] or (scores[i] == scores[best] and means[i] < means[best]):
            best = i
    return items[best][0]
