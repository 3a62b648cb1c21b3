import numpy as np
import pytest

from houses.space import ParamSpec, SearchSpace, lhs_sample, load_space, save_space


@pytest.fixture
def mixed_space():
    return SearchSpace([
        ParamSpec("width", "continuous", 0.0, 10.0),
        ParamSpec("rate", "continuous", 1e-4, 1e-1, "logarithmic"),
        ParamSpec("layers", "integer", 1, 5),
    ])


class TestNormalize:
    def test_linear_midpoint(self, mixed_space):
        assert mixed_space.params[0].to_unit(5.0) == 0.5

    def test_log_scale(self, mixed_space):
        assert mixed_space.params[1].to_unit(1e-2) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_integer_upper_bound(self, mixed_space):
        assert mixed_space.params[2].to_unit(5) == 1.0

    def test_out_of_bounds_names_parameter(self, mixed_space):
        with pytest.raises(ValueError, match="width"):
            mixed_space.normalize([11.0, 1e-2, 3])

    def test_full_vector(self, mixed_space):
        u = mixed_space.normalize([5.0, 1e-2, 5])
        assert u == pytest.approx([0.5, 2.0 / 3.0, 1.0])


class TestDenormalize:
    def test_linear_midpoint(self, mixed_space):
        assert mixed_space.params[0].from_unit(0.5) == 5.0

    def test_integer_rounding(self):
        p = ParamSpec("k", "integer", 1, 5)
        # 1 + 0.49 * 4 = 2.96 rounds to 3
        assert p.from_unit(0.49) == 3
        assert isinstance(p.from_unit(0.49), int)

    def test_log_endpoint(self, mixed_space):
        assert mixed_space.params[1].from_unit(1.0) == pytest.approx(1e-1, rel=1e-12)

    def test_outside_unit_interval(self, mixed_space):
        with pytest.raises(ValueError, match="rate"):
            mixed_space.denormalize([0.5, 1.2, 0.5])

    def test_continuous_round_trip(self, mixed_space):
        rng = np.random.default_rng(0)
        for u in rng.random(200):
            for p in mixed_space.params[:2]:
                assert abs(p.to_unit(p.from_unit(u)) - u) <= 1e-12

    def test_integer_round_trip(self, mixed_space):
        p = mixed_space.params[2]
        for raw in range(1, 6):
            assert p.from_unit(p.to_unit(raw)) == raw


class TestValidation:
    def test_bounds_order(self):
        with pytest.raises(ValueError, match="lower"):
            ParamSpec("a", "continuous", 2.0, 1.0)

    def test_log_requires_positive(self):
        with pytest.raises(ValueError, match="logarithmic"):
            ParamSpec("a", "continuous", 0.0, 1.0, "logarithmic")

    def test_integer_bounds_must_be_integers(self):
        with pytest.raises(ValueError, match="integer"):
            ParamSpec("a", "integer", 0.5, 4.0)

    def test_integer_needs_width(self):
        with pytest.raises(ValueError):
            ParamSpec("a", "integer", 3, 3)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            ParamSpec("a", "categorical", 0, 1)

    def test_duplicate_names(self):
        with pytest.raises(ValueError, match="duplicate"):
            SearchSpace([ParamSpec("a", "continuous", 0, 1), ParamSpec("a", "continuous", 0, 1)])

    def test_empty_space(self):
        with pytest.raises(ValueError):
            SearchSpace([])


class TestLhs:
    def test_single_sample_in_cube(self, mixed_space):
        (config,) = lhs_sample(mixed_space, 1, seed=0)
        assert np.all(config.unit >= 0.0) and np.all(config.unit < 1.0)

    @pytest.mark.parametrize("n", [4, 7, 16])
    def test_stratification(self, mixed_space, n):
        configs = lhs_sample(mixed_space, n, seed=42)
        units = np.array([c.unit for c in configs])
        for d in range(mixed_space.dim):
            bins = np.minimum(np.floor(n * units[:, d]).astype(int), n - 1)
            assert sorted(bins) == list(range(n))

    def test_seed_determinism(self, mixed_space):
        a = lhs_sample(mixed_space, 8, seed=9)
        b = lhs_sample(mixed_space, 8, seed=9)
        assert all((x.unit == y.unit).all() for x, y in zip(a, b))

    def test_different_seeds_differ(self, mixed_space):
        a = lhs_sample(mixed_space, 8, seed=1)
        b = lhs_sample(mixed_space, 8, seed=2)
        assert not all((x.unit == y.unit).all() for x, y in zip(a, b))

    def test_zero_samples_rejected(self, mixed_space):
        with pytest.raises(ValueError):
            lhs_sample(mixed_space, 0, seed=0)

    def test_raw_values_within_bounds(self, mixed_space):
        for config in lhs_sample(mixed_space, 20, seed=3):
            for p, v in zip(mixed_space.params, config.raw):
                assert p.lower <= v <= p.upper


class TestSpaceFile:
    def test_round_trip(self, tmp_path, mixed_space):
        path = tmp_path / "space.yaml"
        save_space(mixed_space, path)
        loaded = load_space(path)
        assert loaded == mixed_space

    def test_field_names(self, tmp_path):
        path = tmp_path / "space.yaml"
        path.write_text(
            "params:\n"
            "  - name: lr\n"
            "    kind: continuous\n"
            "    lower: 1.0e-3\n"
            "    upper: 1.0\n"
            "    scale: logarithmic\n"
        )
        space = load_space(path)
        assert space.names == ["lr"]
        assert space.params[0].scale == "logarithmic"

    def test_missing_params_key(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("not_params: []\n")
        with pytest.raises(ValueError, match="params"):
            load_space(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("params:\n  - name: a\n    kind: continuous\n    lower: 0\n")
        with pytest.raises(ValueError, match="upper"):
            load_space(path)
