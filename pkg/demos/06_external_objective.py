"""Tuning a program you cannot import: the external worker protocol.

The optimizer talks to a worker subprocess over stdin/stdout, one JSON
line per request and response. Any language works; here the worker is
a few lines of Python. The adapter/ package wraps arbitrary training
commands behind this same protocol.
"""

import sys
import tempfile
import textwrap
from pathlib import Path

from houses import ExternalObjective, ParamSpec, RunConfig, SearchSpace, run

WORKER = textwrap.dedent("""
    import json, sys
    for line in sys.stdin:
        req = json.loads(line)
        x, y = req["params"]["x"], req["params"]["y"]
        value = (x - 0.25) ** 2 + (y - 0.75) ** 2
        sys.stdout.write(json.dumps({"id": req["id"], "status": "ok", "objective": value}) + "\\n")
        sys.stdout.flush()
""")

space = SearchSpace([
    ParamSpec("x", "continuous", 0.0, 1.0),
    ParamSpec("y", "continuous", 0.0, 1.0),
])

worker_path = Path(tempfile.mkdtemp(prefix="houses-demo-")) / "worker.py"
worker_path.write_text(WORKER)

with ExternalObjective([sys.executable, str(worker_path)], space, timeout=30.0) as objective:
    state = run(space, objective, RunConfig(budget=40, n0=10, seed=2))

print(f"optimum of the external objective is at (0.25, 0.75)")
print(f"found {dict(zip(space.names, state.best_record.raw))}")
print(f"best value {state.best_value:.5f} after {len(state.history)} evaluations")
