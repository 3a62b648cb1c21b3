import json
import sys
import textwrap

import pytest

from houses.external import (
    ExternalObjective,
    decode_request,
    decode_response,
    encode_request,
    encode_response,
)
from houses.objectives import ObjectiveError
from houses.optimizer import RunConfig, run
from houses.space import ParamSpec, SearchSpace

WORKER = textwrap.dedent("""
    import json, sys, time

    mode = sys.argv[1] if len(sys.argv) > 1 else "echo"
    for line in sys.stdin:
        req = json.loads(line)
        rid = req["id"]
        params = req["params"]
        if mode == "echo":
            out = {"id": rid, "status": "ok", "objective": 0.25}
        elif mode == "sum":
            out = {"id": rid, "status": "ok", "objective": sum(params.values())}
        elif mode == "error":
            out = {"id": rid, "status": "error", "message": "deliberate failure"}
        elif mode == "flaky":
            x = params["x1"]
            if x < 0.5:
                out = {"id": rid, "status": "error", "message": "left half rejected"}
            else:
                out = {"id": rid, "status": "ok", "objective": (x - 0.7) ** 2}
        elif mode == "sleep":
            time.sleep(5)
            out = {"id": rid, "status": "ok", "objective": 0.0}
        elif mode == "garbage":
            sys.stdout.write("not json at all\\n")
            sys.stdout.flush()
            continue
        elif mode == "wrongid":
            out = {"id": rid + 1000, "status": "ok", "objective": 0.0}
        else:
            raise SystemExit(2)
        sys.stdout.write(json.dumps(out) + "\\n")
        sys.stdout.flush()
""")


@pytest.fixture
def worker_script(tmp_path):
    path = tmp_path / "worker.py"
    path.write_text(WORKER)
    return path


@pytest.fixture
def space2():
    return SearchSpace([
        ParamSpec("x1", "continuous", 0.0, 1.0),
        ParamSpec("x2", "continuous", 0.0, 1.0),
    ])


def make_objective(worker_script, space, mode, timeout=10.0):
    return ExternalObjective([sys.executable, str(worker_script), mode], space, timeout=timeout)


class TestProtocolRoundTrip:
    def test_request_identity(self):
        rid, params = 7, {"lr": 0.01, "units": 32}
        assert decode_request(encode_request(rid, params)) == (rid, params)

    def test_response_identity(self):
        line = encode_response(3, "ok", objective=0.125)
        doc = decode_response(line)
        assert doc["id"] == 3 and doc["status"] == "ok" and doc["objective"] == 0.125

    def test_error_response_identity(self):
        doc = decode_response(encode_response(9, "error", message="nope"))
        assert doc == {"id": 9, "status": "error", "message": "nope"}

    def test_bad_status_rejected(self):
        with pytest.raises(ValueError):
            decode_response(json.dumps({"id": 1, "status": "maybe"}))

    def test_ok_requires_finite_objective(self):
        with pytest.raises(ValueError):
            decode_response(json.dumps({"id": 1, "status": "ok"}))
        with pytest.raises(ValueError):
            decode_response(json.dumps({"id": 1, "status": "ok", "objective": float("nan")}))

    def test_request_requires_params(self):
        with pytest.raises(ValueError):
            decode_request(json.dumps({"id": 1}))


class TestExternalObjective:
    def test_fixed_loopback(self, worker_script, space2):
        with make_objective(worker_script, space2, "echo") as objective:
            config = space2.configuration([0.2, 0.8])
            assert objective(config) == 0.25

    def test_named_parameters_reach_worker(self, worker_script, space2):
        with make_objective(worker_script, space2, "sum") as objective:
            config = space2.configuration([0.25, 0.5])
            assert objective(config) == pytest.approx(0.75)

    def test_many_requests_one_process(self, worker_script, space2):
        with make_objective(worker_script, space2, "sum") as objective:
            for i in range(50):
                u = (i % 10) / 10.0
                config = space2.configuration([u, u])
                assert objective(config) == pytest.approx(2 * u)

    def test_error_response_keeps_worker_alive(self, worker_script, space2):
        with make_objective(worker_script, space2, "flaky") as objective:
            with pytest.raises(ObjectiveError) as info:
                objective(space2.configuration([0.2, 0.5]))
            assert info.value.reason == "worker_error"
            assert objective(space2.configuration([0.9, 0.5])) == pytest.approx(0.04)

    def test_timeout_flagged_and_recovers(self, worker_script, space2):
        with make_objective(worker_script, space2, "sleep", timeout=0.5) as objective:
            with pytest.raises(ObjectiveError) as info:
                objective(space2.configuration([0.5, 0.5]))
            assert info.value.reason == "timeout"

    def test_malformed_response(self, worker_script, space2):
        with make_objective(worker_script, space2, "garbage") as objective:
            with pytest.raises(ObjectiveError) as info:
                objective(space2.configuration([0.5, 0.5]))
            assert info.value.reason == "protocol"

    def test_mismatched_id(self, worker_script, space2):
        with make_objective(worker_script, space2, "wrongid") as objective:
            with pytest.raises(ObjectiveError) as info:
                objective(space2.configuration([0.5, 0.5]))
            assert info.value.reason == "protocol"

    def test_dead_command(self, space2):
        objective = ExternalObjective([sys.executable, "-c", "raise SystemExit(1)"], space2,
                                      timeout=5.0)
        with pytest.raises(ObjectiveError) as info:
            objective(space2.configuration([0.5, 0.5]))
        assert info.value.reason in ("exit", "spawn")


class TestOptimizerIntegration:
    def test_failures_consume_budget_and_loop_survives(self, worker_script, space2):
        with make_objective(worker_script, space2, "flaky") as objective:
            state = run(space2, objective, RunConfig(budget=25, n0=8, seed=1))
        assert len(state.history) == 25
        statuses = {r.status for r in state.history}
        assert statuses == {"ok", "failed"}
        failed = [r for r in state.history if not r.ok]
        assert all(r.reason == "worker_error" for r in failed)
        assert state.best_value is not None
        # trainer only accepts the right half, so the best must be there
        assert state.best_record.raw[0] >= 0.5


class TestObjectiveSpec:
    def test_builtin_spec_resolves(self, space2):
        from houses.external import make_objective
        from houses.objectives import ObjectiveSpec
        spec = ObjectiveSpec(kind="builtin", name="sphere")
        objective = make_objective(spec, space2)
        assert objective(space2.configuration([0.5, 0.5])) == 0.0

    def test_external_spec_resolves(self, worker_script, space2):
        from houses.external import make_objective
        from houses.objectives import ObjectiveSpec
        spec = ObjectiveSpec(kind="external",
                             command=[sys.executable, str(worker_script), "echo"],
                             timeout=10.0)
        with make_objective(spec, space2) as objective:
            assert objective(space2.configuration([0.1, 0.2])) == 0.25

    def test_validation(self):
        from houses.objectives import ObjectiveSpec
        with pytest.raises(ValueError):
            ObjectiveSpec(kind="builtin", name="nope")
        with pytest.raises(ValueError):
            ObjectiveSpec(kind="external")
        with pytest.raises(ValueError):
            ObjectiveSpec(kind="magic", name="sphere")
        with pytest.raises(ValueError):
            ObjectiveSpec(kind="builtin", name="sphere", timeout=0.0)
