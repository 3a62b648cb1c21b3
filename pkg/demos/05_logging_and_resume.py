"""Run logs and crash recovery.

Every true evaluation is appended to a JSONL log before the loop
proceeds, so a killed run resumes exactly where it stopped and follows
the same trajectory the uninterrupted run would have taken.
"""

import tempfile
from pathlib import Path

from houses import RunConfig, builtin_objective, default_space, read_log, resume, run

space = default_space("sphere")
objective = builtin_objective("sphere")
config = RunConfig(budget=40, n0=10, seed=5)

workdir = Path(tempfile.mkdtemp(prefix="houses-demo-"))
log_path = workdir / "run.jsonl"

# simulate a crash after 15 evaluations
calls = {"n": 0}

def crashy(cfg):
    calls["n"] += 1
    if calls["n"] > 15:
        raise KeyboardInterrupt
    return objective(cfg)

try:
    run(space, crashy, config, log_path=log_path, objective_label="sphere")
except KeyboardInterrupt:
    pass

header, records = read_log(log_path)
print(f"log after the crash: {len(records)} records (seed {header['seed']})")

state = resume(log_path)
print(f"resumed to {len(state.history)} evaluations, best {state.best_value:.6f}")

reference = run(space, objective, config)
print(f"uninterrupted best:  {reference.best_value:.6f}")
print(f"identical trajectories: "
      f"{[r.value for r in state.history] == [r.value for r in reference.history]}")
