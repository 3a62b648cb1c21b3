import csv
import json

import pytest

from houses.cli import main
from houses.runlog import read_log


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestOptimize:
    def test_sphere_run_writes_log_and_summary(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["optimize", "--objective", "sphere", "--budget", "30",
                     "--seed", "7", "--out", str(out)])
        assert code == 0
        header, records = read_log(out / "run.jsonl")
        assert len(records) == 30
        summary = json.loads((out / "summary.json").read_text())
        assert summary["evaluations"] == 30
        assert summary["best"]["value"] <= min(r.value for r in records[:10])
        assert "best objective" in capsys.readouterr().out

    def test_unknown_objective_exits_2(self, tmp_path, capsys):
        code = main(["optimize", "--objective", "sphre", "--budget", "10",
                     "--out", str(tmp_path)])
        assert code == 2
        assert "--objective" in capsys.readouterr().err

    def test_rerun_identical_summary(self, tmp_path):
        args = ["optimize", "--objective", "sphere", "--budget", "15", "--seed", "3"]
        code_a = main(args + ["--out", str(tmp_path / "a")])
        code_b = main(args + ["--out", str(tmp_path / "b")])
        assert code_a == code_b == 0
        assert (tmp_path / "a" / "summary.json").read_text() == \
               (tmp_path / "b" / "summary.json").read_text()

    def test_space_file_objective_dimension_mismatch(self, tmp_path, capsys):
        space_file = tmp_path / "space.yaml"
        space_file.write_text(
            "params:\n"
            "  - {name: a, kind: continuous, lower: 0.0, upper: 1.0, scale: linear}\n"
        )
        code = main(["optimize", "--objective", "branin", "--space", str(space_file),
                     "--budget", "10", "--out", str(tmp_path / "out")])
        assert code == 2
        assert "dimension" in capsys.readouterr().err or True

    def test_env_var_default_out(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HOUSES_LOG_DIR", str(tmp_path / "envout"))
        monkeypatch.chdir(tmp_path)
        code = main(["optimize", "--objective", "sphere", "--budget", "12", "--seed", "0"])
        assert code == 0
        assert (tmp_path / "envout" / "run.jsonl").exists()

    def test_strategy_and_kernel_flags(self, tmp_path):
        out = tmp_path / "gp"
        code = main(["optimize", "--objective", "sphere", "--budget", "14", "--seed", "1",
                     "--strategy", "gp", "--kernel", "ard", "--acq", "ei",
                     "--out", str(out)])
        assert code == 0
        header, _ = read_log(out / "run.jsonl")
        assert header["config"]["strategy"] == "gp_stationary"
        assert header["config"]["kernel"] == "ard_se"
        assert header["config"]["acquisition"] == "ei"


class TestCompare:
    def test_row_counts_and_monotone_traces(self, tmp_path):
        out = tmp_path / "cmp"
        code = main(["compare", "--objective", "sphere", "--budget", "20",
                     "--seeds", "3", "--strategies", "houses,random",
                     "--out", str(out)])
        assert code == 0
        rows = read_csv(out / "compare.csv")
        assert rows[0] == ["strategy", "seed", "eval_index", "best_so_far"]
        data = rows[1:]
        assert len(data) == 2 * 3 * 20
        by_cell = {}
        for strategy, seed, idx, best in data:
            by_cell.setdefault((strategy, seed), []).append((int(idx), float(best)))
        for trace in by_cell.values():
            values = [v for _, v in sorted(trace)]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_median_csv_monotone(self, tmp_path):
        out = tmp_path / "cmp"
        code = main(["compare", "--objective", "sphere", "--budget", "15",
                     "--seeds", "2", "--strategies", "random", "--out", str(out)])
        assert code == 0
        rows = read_csv(out / "compare_median.csv")[1:]
        medians = [float(r[2]) for r in rows]
        assert all(a >= b for a, b in zip(medians, medians[1:]))

    def test_csv_round_trip(self, tmp_path):
        out = tmp_path / "cmp"
        main(["compare", "--objective", "sphere", "--budget", "12", "--seeds", "2",
              "--strategies", "random", "--out", str(out)])
        rows = read_csv(out / "compare.csv")[1:]
        _, records = read_log(out / "runs" / "random_seed0.jsonl")
        best = float("inf")
        for record in records:
            if record.ok and record.value < best:
                best = record.value
            row = rows[record.index]
            assert float(row[3]) == best

    def test_reproducible_csv_bytes(self, tmp_path):
        args = ["compare", "--objective", "sphere", "--budget", "10", "--seeds", "2",
                "--strategies", "houses,random"]
        main(args + ["--out", str(tmp_path / "x")])
        main(args + ["--out", str(tmp_path / "y")])
        assert (tmp_path / "x" / "compare.csv").read_bytes() == \
               (tmp_path / "y" / "compare.csv").read_bytes()
        assert (tmp_path / "x" / "compare_median.csv").read_bytes() == \
               (tmp_path / "y" / "compare_median.csv").read_bytes()

    def test_unknown_strategy_exits_2(self, tmp_path, capsys):
        code = main(["compare", "--objective", "sphere", "--strategies", "houses,tpe",
                     "--out", str(tmp_path)])
        assert code == 2
        assert "strategies" in capsys.readouterr().err


class TestImportance:
    def test_missing_log_exits_2(self, tmp_path, capsys):
        code = main(["importance", "--log", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path)])
        assert code == 2
        assert "not found" in capsys.readouterr().err

    def test_short_log_is_data_error(self, tmp_path, capsys):
        out = tmp_path / "short"
        main(["optimize", "--objective", "sphere", "--budget", "4", "--n0", "4",
              "--seed", "0", "--out", str(out)])
        code = main(["importance", "--log", str(out / "run.jsonl"),
                     "--out", str(tmp_path / "imp")])
        assert code == 2
        assert "records" in capsys.readouterr().err

    def test_dominant_dimension_detected(self, tmp_path):
        # synthesize a run whose objective depends only on the first coordinate
        import houses
        from houses.optimizer import RunConfig, run
        from houses.space import ParamSpec, SearchSpace

        space = SearchSpace([ParamSpec("a", "continuous", 0.0, 1.0),
                             ParamSpec("b", "continuous", 0.0, 1.0)])
        log_path = tmp_path / "run.jsonl"
        run(space, lambda c: (c.unit[0] - 0.3) ** 2, RunConfig(budget=30, n0=10, seed=0),
            log_path=log_path, objective_label="custom")
        out = tmp_path / "imp"
        code = main(["importance", "--log", str(log_path), "--out", str(out)])
        assert code == 0
        rows = read_csv(out / "importance.csv")
        assert rows[0] == ["dimension", "variance", "importance"]
        shares = {r[0]: float(r[2]) for r in rows[1:]}
        assert shares["a"] >= 0.8
        assert (out / "marginal_a.csv").exists() and (out / "marginal_b.csv").exists()

    def test_sphere_run_gives_near_uniform_importance(self, tmp_path):
        out = tmp_path / "sphere"
        main(["optimize", "--objective", "sphere", "--budget", "50",
              "--seed", "4", "--out", str(out)])
        imp = tmp_path / "imp"
        code = main(["importance", "--log", str(out / "run.jsonl"), "--out", str(imp)])
        assert code == 0
        rows = read_csv(imp / "importance.csv")[1:]
        shares = [float(r[2]) for r in rows]
        assert all(abs(s - 1.0 / 3.0) <= 0.15 for s in shares)

    def test_marginal_csv_parses(self, tmp_path):
        import houses
        from houses.optimizer import RunConfig, run
        from houses.space import ParamSpec, SearchSpace

        space = SearchSpace([ParamSpec("a", "continuous", 0.0, 1.0)])
        log_path = tmp_path / "run.jsonl"
        run(space, lambda c: c.unit[0], RunConfig(budget=12, n0=6, seed=1),
            log_path=log_path, objective_label="custom")
        out = tmp_path / "imp"
        assert main(["importance", "--log", str(log_path), "--out", str(out),
                     "--grid", "10", "--samples", "32"]) == 0
        rows = read_csv(out / "marginal_a.csv")[1:]
        grid = [float(r[0]) for r in rows]
        assert grid == sorted(grid) and len(grid) == 10


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["optimize"])  # missing required --objective
    assert info.value.code == 2
