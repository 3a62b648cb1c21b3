"""The sequential optimization loop and its baselines.

Strategies:

* ``houses`` -- fit the surrogate with the configured kernel (the warped
  non-stationary one by default, anchored at the incumbent best), search
  it with the importance-weighted evolutionary proposal, truly evaluate
  the winner, update the anchor.
* ``gp_stationary`` -- the identical loop with the stationary ARD kernel
  and no anchor, isolating the kernel as the only difference.
* ``random`` -- i.i.d. uniform sampling of the whole budget.

The budget counts true objective evaluations (failures included); after
``n0`` Latin-Hypercube initial points, each generation performs exactly
one true evaluation. Every stochastic choice of generation ``g`` is
drawn from a generator derived from ``(seed, g)``, so resuming from a
run log reproduces the uninterrupted trajectory exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import fanova
from .acquisition import ACQUISITION_KINDS, AcquisitionSpec
from .evolution import ESConfig, ensure_novel, grid_select, mutation_probabilities, propose
from .gp import build_model, default_params, fit
from .kernels import KERNEL_KINDS
from .objectives import BUILTINS, ObjectiveError, builtin_objective
from .runlog import EvaluationRecord, ReplayError, RunLog, read_log
from .space import SearchSpace, lhs_sample

STRATEGIES = ("houses", "gp_stationary", "random")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run besides the space and objective."""

    budget: int
    n0: int | None = None
    strategy: str = "houses"
    kernel: str = "houses"
    acquisition: str = "ucb"
    ucb_w: float = 2.0
    es: ESConfig = field(default_factory=ESConfig)
    seed: int = 0
    refit_every: int = 5
    importance_grid: int = 8
    importance_samples: int = 64

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.n0 is not None:
            if self.n0 < 2:
                raise ValueError("n0 must be >= 2")
            if self.budget < self.n0:
                raise ValueError("budget must be >= n0")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; known: {STRATEGIES}")
        if self.kernel not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.kernel!r}; known: {KERNEL_KINDS}")
        if self.acquisition not in ACQUISITION_KINDS:
            raise ValueError(f"unknown acquisition {self.acquisition!r}")
        if self.ucb_w < 0:
            raise ValueError("ucb_w must be nonnegative")
        if self.refit_every < 1:
            raise ValueError("refit_every must be >= 1")

    def resolved_n0(self, dim: int) -> int:
        return self.n0 if self.n0 is not None else max(10, 2 * dim)

    @property
    def effective_kernel(self) -> str:
        return "ard_se" if self.strategy == "gp_stationary" else self.kernel

    def to_dict(self) -> dict:
        return {
            "budget": self.budget, "n0": self.n0, "strategy": self.strategy,
            "kernel": self.kernel, "acquisition": self.acquisition, "ucb_w": self.ucb_w,
            "seed": self.seed, "refit_every": self.refit_every,
            "importance_grid": self.importance_grid, "importance_samples": self.importance_samples,
            "es": {
                "grids": self.es.grids, "offspring": self.es.offspring,
                "mutation_rate": self.es.mutation_rate, "eta": self.es.eta,
                "p_min": self.es.p_min, "p_max": self.es.p_max,
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        es = doc.get("es", {})
        return cls(
            budget=int(doc["budget"]), n0=doc.get("n0"), strategy=doc.get("strategy", "houses"),
            kernel=doc.get("kernel", "houses"), acquisition=doc.get("acquisition", "ucb"),
            ucb_w=float(doc.get("ucb_w", 2.0)), seed=int(doc.get("seed", 0)),
            refit_every=int(doc.get("refit_every", 5)),
            importance_grid=int(doc.get("importance_grid", 8)),
            importance_samples=int(doc.get("importance_samples", 64)),
            es=ESConfig(
                grids=int(es.get("grids", 5)), offspring=int(es.get("offspring", 10)),
                mutation_rate=es.get("mutation_rate"), eta=float(es.get("eta", 20.0)),
                p_min=float(es.get("p_min", 0.05)), p_max=float(es.get("p_max", 0.95)),
            ),
        )


@dataclass
class RunState:
    """Trajectory of a run: history, incumbent, anchor and counters."""

    space: SearchSpace
    config: RunConfig
    history: list
    generation: int = 0
    best_index: int | None = None

    @property
    def best_record(self) -> EvaluationRecord | None:
        return None if self.best_index is None else self.history[self.best_index]

    @property
    def best_value(self) -> float | None:
        record = self.best_record
        return None if record is None else record.value

    @property
    def best_unit(self) -> np.ndarray | None:
        record = self.best_record
        return None if record is None else np.array(record.unit)

    @property
    def anchor(self) -> np.ndarray | None:
        return self.best_unit

    def ok_records(self) -> list:
        return [r for r in self.history if r.ok]


def update_anchor(state: RunState) -> np.ndarray | None:
    """Unit vector of the incumbent minimum (ties go to the earliest)."""
    if not state.history:
        raise ValueError("cannot compute an anchor from an empty history")
    return state.best_unit


def _rng_state(rng: np.random.Generator | None):
    return None if rng is None else rng.bit_generator.state


def _evaluate(space: SearchSpace, objective, unit: np.ndarray, index: int,
              generation: int, state: RunState, log: RunLog | None,
              rng: np.random.Generator | None) -> EvaluationRecord:
    config = space.configuration(unit)
    start = time.perf_counter()
    value: float | None
    status, reason = "ok", None
    try:
        value = float(objective(config))
        if not np.isfinite(value):
            value, status, reason = None, "failed", "non_finite"
    except KeyboardInterrupt:
        raise
    except ObjectiveError as exc:
        value, status, reason = None, "failed", exc.reason
    except Exception:
        value, status, reason = None, "failed", "error"
    wall_ms = 1000.0 * (time.perf_counter() - start)

    record = EvaluationRecord(index=index, unit=tuple(config.unit), raw=tuple(config.raw),
                              value=value, status=status, wall_ms=wall_ms,
                              generation=generation, reason=reason)
    state.history.append(record)
    state.generation = generation
    if record.ok and (state.best_value is None or record.value < state.best_value):
        state.best_index = index
    if log is not None:
        log.append(record, _rng_state(rng))
    return record


def _kernel_param_count(kernel: str, dim: int) -> int:
    return 3 + 4 * dim if kernel == "houses" else 2 + dim


def _kernel_in_force(state: RunState, prefix, kernel: str) -> str:
    """Anchored kernels wait until the data can support their parameters.

    Fitting 3 + 4D hyperparameters to a dozen points steers the early
    search badly; until n_ok reaches twice the parameter count the
    stationary kernel is fitted instead.
    """
    if kernel == "ard_se":
        return kernel
    n_ok = sum(1 for r in prefix if r.ok)
    if n_ok < 2 * _kernel_param_count(kernel, state.space.dim):
        return "ard_se"
    return kernel


def _fit_generation(g: int, refit_every: int) -> int:
    """Generation whose fit is in force at generation ``g``.

    A full refit happens every ``refit_every`` generations; in between
    only the factorization and anchor are refreshed. Pure function of
    the generation index, so interrupted runs resume bit-for-bit.
    """
    return g - (g - 1) % refit_every


def _fit_params_at(state: RunState, fit_gen: int, n0: int, kernel: str, warm):
    """Execute the fit belonging to ``fit_gen`` on its history prefix."""
    config = state.config
    prefix = state.history[: n0 + fit_gen - 1]
    ok = [r for r in prefix if r.ok]
    if not ok:
        return default_params("ard_se", state.space.dim)
    kernel = _kernel_in_force(state, prefix, kernel)
    X = np.array([r.unit for r in ok])
    y = np.array([r.value for r in ok])
    anchor = None
    if kernel != "ard_se":
        best = min(ok, key=lambda r: (r.value, r.index))
        anchor = np.array(best.unit)
    model = fit(X, y, kind=kernel, anchor=anchor, seed=[config.seed, fit_gen, 1],
                warm_start=warm)
    return model.params


def _params_for_generation(state: RunState, g: int, n0: int, kernel: str, chain: dict):
    """Parameters in force at generation ``g``, warm-starting each refit
    from the previous one. The chain is replayed from the start when
    resuming, so a resumed run reproduces the uninterrupted fits."""
    needed = _fit_generation(g, state.config.refit_every)
    if needed not in chain:
        previous = None
        for fit_gen in range(1, needed + 1, state.config.refit_every):
            if fit_gen in chain:
                previous = chain[fit_gen]
                continue
            chain[fit_gen] = _fit_params_at(state, fit_gen, n0, kernel, previous)
            previous = chain[fit_gen]
    return chain[needed]


def _execute(space: SearchSpace, objective, config: RunConfig, state: RunState,
             log: RunLog | None) -> RunState:
    dim = space.dim

    if config.strategy == "random":
        while len(state.history) < config.budget:
            i = len(state.history)
            rng = np.random.default_rng([config.seed, i, 4])
            _evaluate(space, objective, rng.random(dim), i, i, state, log, rng)
        return state

    n0 = config.resolved_n0(dim)
    if config.budget < n0:
        raise ValueError(f"budget ({config.budget}) must cover the initial population ({n0})")
    kernel = config.effective_kernel

    init = lhs_sample(space, n0, config.seed)
    while len(state.history) < n0 and len(state.history) < config.budget:
        i = len(state.history)
        _evaluate(space, objective, init[i].unit, i, 0, state, log, None)

    fit_chain: dict = {}
    while len(state.history) < config.budget:
        g = len(state.history) - n0 + 1
        rng = np.random.default_rng([config.seed, g, 3])
        ok = state.ok_records()
        if not ok:
            # nothing to model yet; keep consuming budget uniformly
            candidate = rng.random(dim)
            _evaluate(space, objective, candidate, len(state.history), g, state, log, rng)
            continue

        params = _params_for_generation(state, g, n0, kernel, fit_chain)

        X = np.array([r.unit for r in ok])
        y = np.array([r.value for r in ok])
        anchor = state.best_unit if params.uses_anchor else None
        model = build_model(X, y, params, anchor)

        if len(ok) >= 2 * dim:
            report = fanova.importance(model.mean_function(), dim,
                                       grid_size=config.importance_grid,
                                       mc_samples=config.importance_samples,
                                       seed=[config.seed, g, 2])
            importances = report.importances
        else:
            importances = np.full(dim, 1.0 / dim)

        spec = AcquisitionSpec(kind=config.acquisition, f_best=float(state.best_value),
                               w=config.ucb_w)
        parents = X[grid_select(X, y, config.es.grids)]
        candidate = propose(model, spec, parents, importances, config.es, rng)
        probs = mutation_probabilities(importances, config.es)
        evaluated = np.array([r.unit for r in state.history])
        candidate = ensure_novel(candidate, evaluated, probs, config.es.eta, rng)
        _evaluate(space, objective, candidate, len(state.history), g, state, log, rng)
    return state


def _header(space: SearchSpace, config: RunConfig, objective_label: str | None) -> dict:
    return {
        "format": "houses-runlog-v1",
        "space": space.to_dict(),
        "config": config.to_dict(),
        "seed": config.seed,
        "objective": objective_label,
        "rng_state": _rng_state(np.random.default_rng(config.seed)),
    }


def run(space: SearchSpace, objective, config: RunConfig, log_path=None,
        objective_label: str | None = None) -> RunState:
    """Optimize ``objective`` over ``space`` and return the final state.

    ``objective`` is a callable taking a :class:`Configuration`; raising
    (or returning a non-finite value) marks the evaluation failed without
    stopping the run. When ``log_path`` is given every evaluation is
    appended to a JSONL run log before the loop proceeds.
    """
    if objective_label is None:
        objective_label = getattr(objective, "__name__", repr(objective))
    state = RunState(space=space, config=config, history=[])
    log = RunLog(log_path) if log_path is not None else None
    try:
        if log is not None:
            log.write_header(_header(space, config, objective_label))
        _execute(space, objective, config, state, log)
    finally:
        if log is not None:
            log.close()
    return state


def run_random(space: SearchSpace, objective, budget: int, seed, log_path=None,
               objective_label: str | None = None) -> RunState:
    """Random-search baseline: the whole budget drawn uniformly."""
    config = RunConfig(budget=budget, strategy="random", seed=seed)
    return run(space, objective, config, log_path=log_path, objective_label=objective_label)


def replay(log_path) -> RunState:
    """Reconstruct a RunState from a run log without evaluating anything."""
    header, records = read_log(log_path)
    if header is None:
        raise ReplayError(f"{log_path}: log has no header")
    space = SearchSpace.from_dict(header["space"])
    config = RunConfig.from_dict(header["config"])
    state = RunState(space=space, config=config, history=list(records))
    for record in records:
        if record.ok and (state.best_value is None or record.value < state.best_value):
            state.best_index = record.index
    state.generation = records[-1].generation if records else 0
    return state


def resume(log_path, objective=None, budget: int | None = None) -> RunState:
    """Continue an interrupted run from its log to the (possibly new) budget.

    For builtin objectives the callable is rebuilt from the header;
    anything else must be passed explicitly. The continuation matches
    what the uninterrupted run would have produced.
    """
    header, _ = read_log(log_path)
    state = replay(log_path)
    if budget is not None:
        state.config = replace(state.config, budget=budget)
    if objective is None:
        label = header.get("objective")
        if label in BUILTINS:
            objective = builtin_objective(label)
        else:
            raise ValueError(f"cannot rebuild objective {label!r} from the log; pass objective=")
    log = RunLog(log_path, append=True)
    try:
        _execute(state.space, objective, state.config, state, log)
    finally:
        log.close()
    return state
