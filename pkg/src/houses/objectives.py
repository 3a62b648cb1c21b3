"""Built-in black-box objectives and classification metrics.

All benchmarks consume unit-cube coordinates and map them internally to
their standard domains, so the optimizer never needs to know the raw
scale. ``mlp_synth`` is a desk-scale trainable objective: a small
one-hidden-layer classifier on a deterministic synthetic two-arc
dataset, exposing the classic interacting hyperparameters (learning
rate, capacity, regularization, schedule).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .space import Configuration, ParamSpec, SearchSpace


class ObjectiveError(RuntimeError):
    """An evaluation failed; the record is marked failed, the run continues."""

    def __init__(self, message: str, reason: str = "error"):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class ObjectiveSpec:
    """What to evaluate: a registered builtin or an external worker command."""

    kind: str
    name: str | None = None
    command: str | list | None = None
    timeout: float = 600.0

    def __post_init__(self):
        if self.kind not in ("builtin", "external"):
            raise ValueError(f"objective kind must be 'builtin' or 'external', got {self.kind!r}")
        if self.kind == "builtin":
            if self.name not in BUILTINS:
                raise ValueError(f"unknown builtin objective {self.name!r}; known: {sorted(BUILTINS)}")
        elif not self.command:
            raise ValueError("an external objective requires a command")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


def sphere(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    return float(np.sum((u - 0.5) ** 2))


def rastrigin(u: np.ndarray) -> float:
    z = 10.24 * np.asarray(u, dtype=float) - 5.12
    return float(10.0 * z.size + np.sum(z**2 - 10.0 * np.cos(2.0 * math.pi * z)))


def branin(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    x1 = 15.0 * u[0] - 5.0
    x2 = 15.0 * u[1]
    b = 5.1 / (4.0 * math.pi**2)
    c = 5.0 / math.pi
    t = 1.0 / (8.0 * math.pi)
    return float((x2 - b * x1**2 + c * x1 - 6.0) ** 2 + 10.0 * (1.0 - t) * math.cos(x1) + 10.0)


_HARTMANN6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN6_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])
_HARTMANN6_P = 1e-4 * np.array([
    [1312, 1696, 5569, 124, 8283, 5886],
    [2329, 4135, 8307, 3736, 1004, 9991],
    [2348, 1451, 3522, 2883, 3047, 6650],
    [4047, 8828, 8732, 5743, 1091, 381],
])


def hartmann6(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    inner = np.sum(_HARTMANN6_A * (u[None, :] - _HARTMANN6_P) ** 2, axis=1)
    return float(-np.sum(_HARTMANN6_ALPHA * np.exp(-inner)))


# --- synthetic trainable objective ------------------------------------------

MLP_SPACE = SearchSpace([
    ParamSpec("learning_rate", "continuous", 1e-3, 1.0, "logarithmic"),
    ParamSpec("hidden_units", "integer", 2, 64),
    ParamSpec("l2_penalty", "continuous", 1e-6, 1e-1, "logarithmic"),
    ParamSpec("epochs", "integer", 5, 200),
    ParamSpec("batch_size", "integer", 4, 64),
])

# Hand-tuned reference for mlp_synth at data seed 0; its error was measured
# once by a pilot run and is the bar the optimizer must reach.
MLP_REFERENCE_CONFIG = (0.12, 24, 1e-5, 120, 16)
MLP_REFERENCE_ERROR = 0.07


def _two_arcs_dataset(seed, n_train: int = 400, n_val: int = 200):
    """Two interleaved noisy arcs in the plane, fixed split, standardized."""
    rng = np.random.default_rng([int(seed), 11])
    n = n_train + n_val
    half = n // 2
    t0 = rng.random(half) * math.pi
    t1 = rng.random(n - half) * math.pi
    pts0 = np.column_stack([np.cos(t0), np.sin(t0)])
    pts1 = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    X = np.vstack([pts0, pts1]) + rng.normal(0.0, 0.24, (n, 2))
    y = np.concatenate([np.zeros(half), np.ones(n - half)])
    order = rng.permutation(n)
    X, y = X[order], y[order]
    X_train, y_train = X[:n_train], y[:n_train]
    X_val, y_val = X[n_train:], y[n_train:]
    mu, sd = X_train.mean(axis=0), X_train.std(axis=0)
    return (X_train - mu) / sd, y_train, (X_val - mu) / sd, y_val


def eval_mlp_synth(raw, seed=0) -> float:
    """Train the one-hidden-layer classifier and return its validation error.

    ``raw`` holds (learning_rate, hidden_units, l2_penalty, epochs,
    batch_size) within the bounds of :data:`MLP_SPACE`. Deterministic
    given (raw, seed); divergent training raises :class:`ObjectiveError`.
    """
    MLP_SPACE.normalize(raw)  # bounds check
    lr, hidden, l2, epochs, batch = float(raw[0]), int(raw[1]), float(raw[2]), int(raw[3]), int(raw[4])
    X_train, y_train, X_val, y_val = _two_arcs_dataset(seed)

    init_rng = np.random.default_rng([int(seed), 13])
    W1 = init_rng.normal(0.0, 1.0, (2, hidden))
    b1 = np.zeros(hidden)
    # near-zero output layer: an undertrained net stays close to chance
    W2 = init_rng.normal(0.0, 0.01, (hidden, 1))
    b2 = np.zeros(1)
    shuffle_rng = np.random.default_rng([int(seed), 17])
    n = X_train.shape[0]
    yt = y_train[:, None]

    for _ in range(epochs):
        order = shuffle_rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            Xb, yb = X_train[idx], yt[idx]
            Z1 = Xb @ W1 + b1
            A1 = np.maximum(Z1, 0.0)
            logits = A1 @ W2 + b2
            p = 1.0 / (1.0 + np.exp(-np.clip(logits, -60.0, 60.0)))
            d_logits = (p - yb) / idx.size
            dW2 = A1.T @ d_logits + 2.0 * l2 * W2
            db2 = d_logits.sum(axis=0)
            dA1 = d_logits @ W2.T
            dZ1 = dA1 * (Z1 > 0.0)
            dW1 = Xb.T @ dZ1 + 2.0 * l2 * W1
            db1 = dZ1.sum(axis=0)
            W1 -= lr * dW1
            b1 -= lr * db1
            W2 -= lr * dW2
            b2 -= lr * db2
        if not (np.all(np.isfinite(W1)) and np.all(np.isfinite(W2))):
            raise ObjectiveError("training diverged to non-finite weights", reason="diverged")

    hidden_val = np.maximum(X_val @ W1 + b1, 0.0)
    logits_val = hidden_val @ W2 + b2
    predictions = (logits_val[:, 0] >= 0.0).astype(float)
    return float(np.mean(predictions != y_val))


def mlp_synth(u: np.ndarray, seed=0) -> float:
    """Unit-cube entry point: decode through the canonical space, then train."""
    return eval_mlp_synth(MLP_SPACE.denormalize(np.asarray(u, dtype=float)), seed=seed)


# --- registry ----------------------------------------------------------------

def _unit_space(dim: int, prefix: str = "u") -> SearchSpace:
    return SearchSpace([ParamSpec(f"{prefix}{d + 1}", "continuous", 0.0, 1.0) for d in range(dim)])


BUILTINS: dict[str, dict] = {
    "sphere": {"fn": sphere, "dim": None, "default_space": lambda: _unit_space(3)},
    "rastrigin": {
        "fn": rastrigin,
        "dim": None,
        "default_space": lambda: SearchSpace(
            [ParamSpec(f"x{d + 1}", "continuous", -5.12, 5.12) for d in range(3)]
        ),
    },
    "branin": {
        "fn": branin,
        "dim": 2,
        "default_space": lambda: SearchSpace([
            ParamSpec("x1", "continuous", -5.0, 10.0),
            ParamSpec("x2", "continuous", 0.0, 15.0),
        ]),
    },
    "hartmann6": {"fn": hartmann6, "dim": 6, "default_space": lambda: _unit_space(6)},
    "mlp_synth": {"fn": mlp_synth, "dim": 5, "default_space": lambda: MLP_SPACE},
}


def eval_builtin(name: str, unit) -> float:
    """Evaluate a registered benchmark at a unit-cube point."""
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin objective {name!r}; known: {sorted(BUILTINS)}")
    unit = np.asarray(unit, dtype=float)
    required = BUILTINS[name]["dim"]
    if required is not None and unit.shape[0] != required:
        raise ValueError(f"objective {name!r} expects dimension {required}, got {unit.shape[0]}")
    return float(BUILTINS[name]["fn"](unit))


def default_space(name: str) -> SearchSpace:
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin objective {name!r}; known: {sorted(BUILTINS)}")
    return BUILTINS[name]["default_space"]()


def builtin_objective(name: str):
    """Callable Configuration -> value for the optimizer loop."""
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin objective {name!r}; known: {sorted(BUILTINS)}")

    def evaluate(config: Configuration) -> float:
        return eval_builtin(name, config.unit)

    evaluate.__name__ = f"builtin_{name}"
    return evaluate


# --- classification metrics ---------------------------------------------------

class ClassificationMetrics(NamedTuple):
    accuracy: float | None
    sensitivity: float | None
    specificity: float | None


def metrics(tp: int, fp: int, fn: int, tn: int) -> ClassificationMetrics:
    """Accuracy, sensitivity and specificity from confusion counts.

    A metric whose denominator is zero is reported as None (undefined),
    never as zero.
    """
    for name, count in (("tp", tp), ("fp", fp), ("fn", fn), ("tn", tn)):
        if count < 0:
            raise ValueError(f"count {name} must be nonnegative, got {count}")
    total = tp + fp + fn + tn
    return ClassificationMetrics(
        accuracy=(tp + tn) / total if total > 0 else None,
        sensitivity=tp / (tp + fn) if tp + fn > 0 else None,
        specificity=tn / (tn + fp) if tn + fp > 0 else None,
    )
