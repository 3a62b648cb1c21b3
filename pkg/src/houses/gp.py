"""Gaussian-process regression over the unit cube.

The model is a zero-mean GP on objective residuals (observations are
centered by their empirical mean before conditioning, so constant data
is reproduced exactly anywhere). Hyperparameters are chosen by
maximizing the log marginal likelihood with a deterministic multi-start
coordinate search in log-parameter space; the covariance functions
themselves live in :mod:`houses.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .kernels import KernelParams, build_cov_matrix, cross_cov

MAX_JITTER = 1e-4

# log-marginal-likelihood search bounds, per parameter family
FIT_BOUNDS = {
    "theta_f": (1e-4, 10.0),
    "theta_k": (1e-4, 10.0),
    "theta_c": (1e-6, 1.0),
    "theta_d": (1e-3, 10.0),
    "gamma_d": (1e-3, 10.0),
    "alpha_d": (0.1, 10.0),
    "beta_d": (0.1, 10.0),
}


class DataError(ValueError):
    """Raised for unusable training data (non-finite objective values)."""


class ConditioningError(RuntimeError):
    """Raised when the covariance cannot be factorized within the jitter cap."""


@dataclass(frozen=True)
class GPModel:
    """A fitted surrogate: data, kernel parameters and factorization.

    ``chol`` is the lower Cholesky factor of K + nugget*I, where the
    nugget is theta_c**2 plus whatever diagonal jitter was needed;
    ``weights`` solves (K + nugget*I) w = y - y_mean.
    """

    X: np.ndarray
    y: np.ndarray
    params: KernelParams
    anchor: np.ndarray | None
    y_mean: float
    chol: np.ndarray
    weights: np.ndarray
    nugget: float

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def mean_function(self):
        """Predictive-mean callable over (m, D) arrays, for marginal analysis."""

        def mean(points: np.ndarray) -> np.ndarray:
            return predict(self, np.atleast_2d(points))[0]

        return mean


def _factorize(K: np.ndarray, theta_c: float, theta_f: float) -> tuple[np.ndarray, float]:
    """Cholesky of K + (theta_c**2 + jitter) I, doubling jitter on failure."""
    base = K + theta_c**2 * np.eye(K.shape[0])
    jitter = 1e-10 * theta_f
    while True:
        try:
            L = np.linalg.cholesky(base + jitter * np.eye(K.shape[0]))
            return L, theta_c**2 + jitter
        except np.linalg.LinAlgError:
            jitter = max(2.0 * jitter, 1e-12)
            if jitter > MAX_JITTER:
                raise ConditioningError(
                    f"covariance factorization failed at jitter {jitter:.1e}"
                ) from None


def _validate_data(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} values")
    if X.shape[0] < 1:
        raise ValueError("at least one observation is required")
    if not np.all(np.isfinite(y)):
        raise DataError("objective values must be finite")
    if np.any(X < -1e-12) or np.any(X > 1.0 + 1e-12):
        raise ValueError("training inputs must lie inside the unit cube")
    return X, y


def build_model(X, y, params: KernelParams, anchor=None) -> GPModel:
    """Condition a GP with fixed kernel parameters (no hyperparameter search)."""
    X, y = _validate_data(X, y)
    K = build_cov_matrix(X, params, anchor)
    L, nugget = _factorize(K, params.theta_c, params.theta_f)
    y_mean = float(np.mean(y))
    r = y - y_mean
    weights = solve_triangular(L.T, solve_triangular(L, r, lower=True), lower=False)
    anchor_arr = None if anchor is None else np.asarray(anchor, dtype=float)
    return GPModel(
        X=X, y=y, params=params, anchor=anchor_arr, y_mean=y_mean,
        chol=L, weights=weights, nugget=nugget,
    )


def predict(model: GPModel, x_star) -> tuple:
    """Predictive mean and variance at one point or a batch of points.

    Returns floats for a single vector, arrays for an (m, D) batch; the
    variance is clamped at zero.
    """
    x = np.asarray(x_star, dtype=float)
    single = x.ndim == 1
    X_star = np.atleast_2d(x)
    if X_star.shape[1] != model.dim:
        raise ValueError(f"query dimension {X_star.shape[1]} != model dimension {model.dim}")
    K_s = cross_cov(X_star, model.X, model.params, model.anchor)
    mean = model.y_mean + K_s @ model.weights
    V = solve_triangular(model.chol, K_s.T, lower=True)
    var = np.maximum(model.params.prior_variance - np.sum(V * V, axis=0), 0.0)
    if single:
        return float(mean[0]), float(var[0])
    return mean, var


def log_marginal_likelihood(model: GPModel) -> float:
    """Gaussian log evidence of the stored (centered) data under the model."""
    r = model.y - model.y_mean
    quad = float(r @ model.weights)
    logdet_half = float(np.sum(np.log(np.diag(model.chol))))
    return -0.5 * quad - logdet_half - 0.5 * model.n * math.log(2.0 * math.pi)


# --- hyperparameter fitting ------------------------------------------------

def _param_layout(kind: str, dim: int) -> list[tuple[str, int]]:
    if kind == "houses":
        return [("theta_f", 1), ("theta_k", 1), ("theta_c", 1),
                ("theta_d", dim), ("gamma_d", dim), ("alpha_d", dim), ("beta_d", dim)]
    return [("theta_f", 1), ("theta_c", 1), ("theta_d", dim)]


_SCALAR_PARAMS = ("theta_f", "theta_k", "theta_c")


def _unpack(kind: str, dim: int, log_vec: np.ndarray) -> KernelParams:
    values = {}
    pos = 0
    for name, width in _param_layout(kind, dim):
        chunk = np.exp(log_vec[pos:pos + width])
        values[name] = float(chunk[0]) if name in _SCALAR_PARAMS else chunk
        pos += width
    if kind == "houses":
        return KernelParams(kind=kind, theta_f=values["theta_f"], theta_k=values["theta_k"],
                            theta_c=values["theta_c"], theta_d=values["theta_d"],
                            gamma_d=values["gamma_d"], alpha_d=values["alpha_d"],
                            beta_d=values["beta_d"])
    return KernelParams(kind=kind, theta_f=values["theta_f"], theta_c=values["theta_c"],
                        theta_d=values["theta_d"])


def _log_bounds(kind: str, dim: int) -> np.ndarray:
    rows = []
    for name, width in _param_layout(kind, dim):
        lo, hi = FIT_BOUNDS[name]
        rows.extend([(math.log(lo), math.log(hi))] * width)
    return np.array(rows)


def default_params(kind: str, dim: int) -> KernelParams:
    """Deterministic starting point for the search, on unit-scaled residuals."""
    scales = np.full(dim, 0.5)
    if kind == "houses":
        return KernelParams(kind=kind, theta_f=1.0, theta_k=0.5, theta_c=1e-3,
                            theta_d=scales, gamma_d=scales.copy(),
                            alpha_d=np.ones(dim), beta_d=np.ones(dim))
    return KernelParams(kind=kind, theta_f=1.0, theta_c=1e-3, theta_d=scales)


def _rescale_amplitudes(params: KernelParams, y_scale: float) -> KernelParams:
    """Undo the internal unit-variance standardization of the residuals.

    A GP fitted to residuals r/s is identical to a GP on r with the
    amplitudes multiplied by s**2 and the noise level by s, so the
    returned parameters describe the original data directly.
    """
    if y_scale == 1.0:
        return params
    kwargs = dict(kind=params.kind, theta_f=params.theta_f * y_scale**2,
                  theta_c=params.theta_c * y_scale, theta_d=params.theta_d)
    if params.kind == "houses":
        kwargs.update(theta_k=params.theta_k * y_scale**2, gamma_d=params.gamma_d,
                      alpha_d=params.alpha_d, beta_d=params.beta_d)
    return KernelParams(**kwargs)


def _pack(params: KernelParams) -> np.ndarray:
    parts = []
    for name, _ in _param_layout(params.kind, params.dim):
        value = getattr(params, name)
        parts.append(np.log(np.atleast_1d(np.asarray(value, dtype=float))))
    return np.concatenate(parts)


def _make_lml(X: np.ndarray, r: np.ndarray, kind: str, anchor) -> callable:
    """Fast marginal-likelihood evaluator reusing cached pairwise tensors.

    Works on the packed log-parameter vector directly; parameter objects
    are only materialized for the winning vector.
    """
    n, dim = X.shape
    if kind == "ard_se":
        base1, base2 = X, None
    else:
        R = np.abs(X - anchor)
        base1, base2 = R, (X if kind == "houses" else None)
    const = 0.5 * n * math.log(2.0 * math.pi)

    def scaled_sqdist(F: np.ndarray, scales: np.ndarray) -> np.ndarray:
        A = F / scales
        sq = np.sum(A * A, axis=1)
        S = sq[:, None] + sq[None, :] - 2.0 * (A @ A.T)
        return np.maximum(S, 0.0)

    def lml(log_vec: np.ndarray) -> float:
        p = np.exp(log_vec)
        if kind == "houses":
            theta_f, theta_k, theta_c = p[0], p[1], p[2]
            theta_d = p[3:3 + dim]
            gamma_d = p[3 + dim:3 + 2 * dim]
            alpha_d = p[3 + 2 * dim:3 + 3 * dim]
            beta_d = p[3 + 3 * dim:]
            F1 = 1.0 - (1.0 - base1**alpha_d) ** beta_d
            F2 = 1.0 - (1.0 - base2**alpha_d) ** beta_d
            K = theta_f * np.exp(-0.5 * scaled_sqdist(F1, theta_d))
            K += theta_k * np.exp(-0.5 * scaled_sqdist(F2, gamma_d))
        else:
            theta_f, theta_c = p[0], p[1]
            K = theta_f * np.exp(-0.5 * scaled_sqdist(base1, p[2:]))
        K = 0.5 * (K + K.T)
        try:
            L, _ = _factorize(K, float(theta_c), float(theta_f))
        except ConditioningError:
            return -math.inf
        v = solve_triangular(L, r, lower=True)
        return -0.5 * float(v @ v) - float(np.sum(np.log(np.diag(L)))) - const

    return lml


def _coordinate_search(fn, x0: np.ndarray, bounds: np.ndarray,
                       step0: float = 1.2, min_step: float = 0.15,
                       max_sweeps: int = 5) -> tuple[np.ndarray, float]:
    x = np.clip(x0, bounds[:, 0], bounds[:, 1])
    best = fn(x)
    step = step0
    for _ in range(max_sweeps):
        improved = False
        for i in range(x.size):
            for delta in (step, -step):
                trial = float(np.clip(x[i] + delta, bounds[i, 0], bounds[i, 1]))
                if trial == x[i]:
                    continue
                candidate = x.copy()
                candidate[i] = trial
                value = fn(candidate)
                if value > best + 1e-12:
                    x, best = candidate, value
                    improved = True
                    break
        if not improved:
            step *= 0.5
            if step < min_step:
                break
    return x, best


def adapt_start(params: KernelParams, kind: str, dim: int) -> KernelParams | None:
    """Reshape previously fitted parameters into a starting point for
    another kernel family (used when the surrogate graduates from the
    stationary to the anchored kernel mid-run)."""
    if params.dim != dim:
        return None
    if params.kind == kind:
        return params
    if kind == "houses" and params.kind == "ard_se":
        # with the identity warp and the stationary length scales, the
        # second term reproduces the stationary kernel exactly, so it
        # inherits most of the fitted amplitude; the anchored term
        # enters as the smaller correction
        return KernelParams(kind="houses", theta_f=0.25 * params.theta_f,
                            theta_k=0.75 * params.theta_f, theta_c=params.theta_c,
                            theta_d=params.theta_d.copy(), gamma_d=params.theta_d.copy(),
                            alpha_d=np.ones(dim), beta_d=np.ones(dim))
    if kind == "relative_distance" and params.kind == "ard_se":
        return KernelParams(kind=kind, theta_f=params.theta_f, theta_c=params.theta_c,
                            theta_d=params.theta_d.copy())
    if kind == "ard_se":
        return KernelParams(kind=kind, theta_f=params.prior_variance,
                            theta_c=params.theta_c, theta_d=params.theta_d.copy())
    return None


def fit(X, y, kind: str = "houses", anchor=None, seed=0, n_starts: int = 8,
        warm_start: KernelParams | None = None) -> GPModel:
    """Fit kernel hyperparameters by maximum marginal likelihood.

    Runs ``n_starts`` deterministic coordinate searches in log-parameter
    space (a data-scaled default, the optional warm start, and random
    restarts drawn from the seed) and conditions the model on the
    winner. A single observation skips the search and uses the defaults.
    ``warm_start`` takes parameters in original data units, e.g. the
    previous fit in a sequential loop.
    """
    X, y = _validate_data(X, y)
    n, dim = X.shape
    if kind in ("relative_distance", "houses") and anchor is None:
        raise ValueError(f"kernel {kind!r} requires an anchor point")
    anchor_arr = None if anchor is None else np.asarray(anchor, dtype=float)
    start = default_params(kind, dim)

    # standardize residuals so the search bounds suit any objective scale
    r = y - float(np.mean(y))
    y_scale = float(np.std(y))
    if not y_scale > 1e-12:
        y_scale = 1.0
    if n < 2:
        return build_model(X, y, _rescale_amplitudes(start, y_scale), anchor_arr)

    lml = _make_lml(X, r / y_scale, kind, anchor_arr)
    bounds = _log_bounds(kind, dim)
    rng = np.random.default_rng(seed)

    starts = [_pack(start)]
    if warm_start is not None:
        adapted = adapt_start(warm_start, kind, dim)
        if adapted is not None:
            descaled = _rescale_amplitudes(adapted, 1.0 / y_scale)
            starts.append(np.clip(_pack(descaled), bounds[:, 0], bounds[:, 1]))
    for _ in range(max(0, n_starts - len(starts))):
        starts.append(rng.uniform(bounds[:, 0], bounds[:, 1]))

    best_vec, best_val = None, -math.inf
    for x0 in starts:
        vec, val = _coordinate_search(lml, x0, bounds)
        if val > best_val:
            best_vec, best_val = vec, val
    if best_vec is None or not np.isfinite(best_val):
        return build_model(X, y, _rescale_amplitudes(start, y_scale), anchor_arr)
    winner = _rescale_amplitudes(_unpack(kind, dim, best_vec), y_scale)
    return build_model(X, y, winner, anchor_arr)
