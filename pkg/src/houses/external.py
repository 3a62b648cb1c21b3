"""Client side of the external-objective wire protocol.

One worker process serves many evaluations: the optimizer writes one
request line to its stdin and reads one response line from its stdout,
both UTF-8 JSON. Requests carry an id and named parameters; responses
echo the id with status "ok" (plus a float objective) or "error". A
worker that times out or exits is restarted so the run can continue;
the evaluation that hit the fault is reported as failed.
"""

from __future__ import annotations

import json
import math
import queue
import shlex
import subprocess
import threading

from .objectives import ObjectiveError, ObjectiveSpec, builtin_objective
from .space import Configuration, SearchSpace

_EOF = object()


def make_objective(spec: ObjectiveSpec, space: SearchSpace):
    """Turn an :class:`ObjectiveSpec` into the callable the optimizer takes.

    External objectives come back as an :class:`ExternalObjective`; close
    it (or use it as a context manager) when the run is over.
    """
    if spec.kind == "builtin":
        return builtin_objective(spec.name)
    return ExternalObjective(spec.command, space, timeout=spec.timeout)


def encode_request(request_id: int, params: dict) -> str:
    return json.dumps({"id": int(request_id), "params": params})


def decode_request(line: str) -> tuple[int, dict]:
    doc = json.loads(line)
    if not isinstance(doc, dict) or not isinstance(doc.get("id"), int):
        raise ValueError("request must be an object with an integer 'id'")
    params = doc.get("params")
    if not isinstance(params, dict):
        raise ValueError("request must carry a 'params' object")
    return doc["id"], params


def encode_response(request_id: int, status: str, objective=None, message=None) -> str:
    doc: dict = {"id": int(request_id), "status": status}
    if objective is not None:
        doc["objective"] = float(objective)
    if message is not None:
        doc["message"] = str(message)
    return json.dumps(doc)


def decode_response(line: str) -> dict:
    doc = json.loads(line)
    if not isinstance(doc, dict) or not isinstance(doc.get("id"), int):
        raise ValueError("response must be an object with an integer 'id'")
    status = doc.get("status")
    if status not in ("ok", "error"):
        raise ValueError(f"response status must be 'ok' or 'error', got {status!r}")
    if status == "ok":
        objective = doc.get("objective")
        if not isinstance(objective, (int, float)) or not math.isfinite(objective):
            raise ValueError("an ok response requires a finite 'objective'")
    return doc


class ExternalObjective:
    """Objective backed by a worker subprocess speaking the wire protocol."""

    def __init__(self, command, space: SearchSpace, timeout: float = 600.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.space = space
        self.timeout = timeout
        self._proc = None
        self._lines: queue.Queue = queue.Queue()
        self._next_id = 0

    # -- process management ------------------------------------------------

    def _start(self) -> None:
        self._lines = queue.Queue()
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            self._proc = None
            raise ObjectiveError(f"cannot start worker {self.command!r}: {exc}", reason="spawn") from exc
        thread = threading.Thread(target=self._pump, args=(self._proc,), daemon=True)
        thread.start()

    def _pump(self, proc) -> None:
        for line in proc.stdout:
            self._lines.put(line)
        self._lines.put(_EOF)

    def _ensure_running(self) -> None:
        if self._proc is None or self._proc.poll() is not None:
            self._start()

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5.0)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        self._proc = None

    def _abort(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()
        self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- evaluation ----------------------------------------------------------

    def __call__(self, config: Configuration) -> float:
        self._ensure_running()
        request_id = self._next_id
        self._next_id += 1
        params = dict(zip(self.space.names, config.raw))
        try:
            self._proc.stdin.write(encode_request(request_id, params) + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            self._abort()
            raise ObjectiveError(f"cannot reach worker: {exc}", reason="exit") from exc

        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self._abort()
            raise ObjectiveError(f"worker exceeded {self.timeout:.0f} s timeout", reason="timeout") from None
        if line is _EOF:
            code = self._proc.poll()
            self._abort()
            raise ObjectiveError(f"worker exited (code {code}) before responding", reason="exit")

        try:
            response = decode_response(line)
        except (json.JSONDecodeError, ValueError) as exc:
            self._abort()
            raise ObjectiveError(f"malformed worker response: {exc}", reason="protocol") from exc
        if response["id"] != request_id:
            self._abort()
            raise ObjectiveError(
                f"worker answered id {response['id']} to request {request_id}", reason="protocol"
            )
        if response["status"] == "error":
            raise ObjectiveError(response.get("message") or "worker reported an error",
                                 reason="worker_error")
        return float(response["objective"])
