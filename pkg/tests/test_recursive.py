import numpy as np
import pytest

from lsekit.batch import Dataset, Sample, solve_batch
from lsekit.errors import ConfigError, DegeneracyError, EmptyInputError, ShapeError, SingularUpdateError
from lsekit.linalg import sherman_morrison_update
from lsekit.recursive import (
    EstimatorState,
    ForgettingConfig,
    gain_trace,
    init,
    iter_run,
    predict,
    run,
    step,
)


def reference_rls(samples, f0, theta0):
    """Plain-numpy recursion without forgetting, written out term by term."""
    f = np.array(f0, dtype=float)
    theta = np.array(theta0, dtype=float)
    states = []
    for s in samples:
        phi = np.asarray(s.regressor)
        y_pred = phi @ theta
        e = s.output - y_pred
        f = f - (f @ np.outer(phi, phi) @ f) / (1.0 + phi @ f @ phi)
        theta = theta + f @ phi * e
        states.append((theta.copy(), f.copy(), y_pred, e))
    return states


def random_stream(rng, n, k, noise=0.0):
    x = rng.standard_normal((k, n))
    theta = rng.standard_normal(n)
    return Dataset.from_arrays(x, x @ theta + noise * rng.standard_normal(k)), theta


class TestConfig:
    @pytest.mark.parametrize("kwargs", [{"lam": 0.0}, {"lam": 1.01}, {"f0_scale": 0.0}, {"denominator_floor": -1.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            ForgettingConfig(**kwargs)

    def test_defaults(self):
        cfg = ForgettingConfig()
        assert (cfg.lam, cfg.f0_scale, cfg.theta0, cfg.denominator_floor) == (1.0, 1e6, None, 1e-12)


class TestInit:
    def test_construction(self):
        s = init(2, ForgettingConfig(f0_scale=100.0))
        np.testing.assert_array_equal(s.gain, np.diag([100.0, 100.0]))
        np.testing.assert_array_equal(s.theta_hat, [0.0, 0.0])
        assert s.step == 0

    def test_scalar(self):
        np.testing.assert_array_equal(init(1, ForgettingConfig(f0_scale=1.0)).gain, [[1.0]])

    def test_positive_definite(self):
        for dim in (1, 3, 6):
            np.linalg.cholesky(init(dim).gain)

    def test_theta0(self):
        s = init(2, ForgettingConfig(theta0=[1.0, -1.0]))
        np.testing.assert_array_equal(s.theta_hat, [1.0, -1.0])

    def test_theta0_mismatch(self):
        with pytest.raises(ConfigError):
            init(3, ForgettingConfig(theta0=[1.0, -1.0]))

    def test_bad_dim(self):
        with pytest.raises(ConfigError):
            init(0)


class TestPredict:
    def test_zero_parameters(self):
        assert predict(init(2), [3.0, -7.0]) == 0.0

    def test_scalar(self):
        assert predict(init(1, ForgettingConfig(theta0=[2.0])), [3.0]) == 6.0

    def test_orthogonal(self):
        assert predict(init(2, ForgettingConfig(theta0=[1.0, -1.0])), [2.0, 2.0]) == 0.0

    def test_dim_mismatch(self):
        with pytest.raises(ShapeError):
            predict(init(2), [1.0])


class TestStep:
    def test_hand_recursion(self):
        cfg = ForgettingConfig(f0_scale=100.0)
        s = step(init(1, cfg), Sample([1.0], 2.0), cfg)
        assert s.last_prediction == 0.0 and s.last_innovation == 2.0
        assert s.gain[0, 0] == pytest.approx(100.0 - 10000.0 / 101.0, abs=1e-13)
        assert s.gain[0, 0] == pytest.approx(100.0 / 101.0, abs=1e-13)
        assert s.theta_hat[0] == pytest.approx(200.0 / 101.0, abs=1e-13)
        assert s.step == 1

    def test_forgetting_gain(self):
        cfg = ForgettingConfig(lam=0.5, f0_scale=1.0)
        s = step(init(1, cfg), Sample([1.0], 17.0), cfg)
        assert s.gain[0, 0] == pytest.approx(2.0 * (1.0 - 1.0 / 1.5), abs=1e-15)
        assert s.gain[0, 0] == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_zero_regressor_is_no_op(self, rng):
        cfg = ForgettingConfig(f0_scale=5.0)
        state, _ = run(random_stream(rng, 3, 10)[0], cfg)
        nxt = step(state, Sample(np.zeros(3), 4.0), cfg)
        np.testing.assert_array_equal(nxt.gain, state.gain)
        np.testing.assert_array_equal(nxt.theta_hat, state.theta_hat)

    def test_does_not_mutate_input(self, rng):
        cfg = ForgettingConfig(lam=0.9)
        state = init(3, cfg)
        gain, theta = state.gain.copy(), state.theta_hat.copy()
        step(state, Sample(rng.standard_normal(3), 1.0), cfg)
        np.testing.assert_array_equal(state.gain, gain)
        np.testing.assert_array_equal(state.theta_hat, theta)
        assert state.step == 0
        with pytest.raises(ValueError):
            state.gain[0, 0] = 1.0

    def test_dim_mismatch(self):
        with pytest.raises(ShapeError):
            step(init(2), Sample([1.0], 1.0))

    def test_denominator_floor(self):
        cfg = ForgettingConfig(lam=1e-13)
        with pytest.raises(SingularUpdateError):
            step(init(1, cfg), Sample([0.0], 1.0), cfg)

    def test_non_positive_definite_gain(self):
        state = EstimatorState(theta_hat=np.zeros(2), gain=-np.eye(2))
        with pytest.raises(DegeneracyError):
            step(state, Sample([0.0, 0.0], 1.0))

    def test_sherman_morrison_consistency(self, rng):
        cfg = ForgettingConfig(f0_scale=10.0)
        state = init(4, cfg)
        for _ in range(30):
            phi = rng.standard_normal(4)
            nxt = step(state, Sample(phi, rng.standard_normal()), cfg)
            expected = sherman_morrison_update(state.gain, phi, phi)
            assert np.max(np.abs(nxt.gain - expected)) <= 1e-10
            state = nxt


class TestGainTrace:
    def test_diagonal(self):
        assert gain_trace(init(2, ForgettingConfig(f0_scale=100.0))) == 200.0

    def test_after_step(self):
        cfg = ForgettingConfig(f0_scale=100.0)
        s = step(init(1, cfg), Sample([1.0], 2.0), cfg)
        assert gain_trace(s) == pytest.approx(100.0 / 101.0, abs=1e-13)

    def test_non_increasing_without_forgetting(self, rng):
        cfg = ForgettingConfig(f0_scale=1e3)
        _, records = run(random_stream(rng, 3, 50)[0], cfg)
        traces = [3e3] + [r.gain_trace for r in records]
        assert all(b <= a + 1e-12 for a, b in zip(traces, traces[1:]))


class TestRun:
    def test_single_sample_equals_step(self):
        cfg = ForgettingConfig(lam=0.8, f0_scale=3.0)
        sample = Sample([1.5, -2.0], 0.7)
        state, records = run(Dataset((sample,)), cfg)
        direct = step(init(2, cfg), sample, cfg)
        np.testing.assert_array_equal(state.theta_hat, direct.theta_hat)
        np.testing.assert_array_equal(state.gain, direct.gain)
        assert len(records) == 1 and records[0].step == 1

    def test_records(self, rng):
        ds, _ = random_stream(rng, 2, 12, noise=0.1)
        state, records = run(ds)
        assert [r.step for r in records] == list(range(1, 13))
        np.testing.assert_array_equal(records[-1].theta_hat, state.theta_hat)
        assert records[-1].gain_trace == gain_trace(state)

    def test_matches_batch(self, rng):
        ds, _ = random_stream(rng, 3, 50, noise=0.2)
        state, _ = run(ds, ForgettingConfig(f0_scale=1e8))
        np.testing.assert_allclose(state.theta_hat, solve_batch(ds).theta_hat, atol=1e-4, rtol=0)

    def test_innovations_vanish_on_noiseless_stream(self, rng):
        ds, _ = random_stream(rng, 3, 50)
        _, records = run(ds)
        assert abs(records[-1].innovation) <= 1e-6

    def test_matches_reference_recursion(self, rng):
        ds, _ = random_stream(rng, 3, 100, noise=0.5)
        _, records = run(ds, ForgettingConfig(f0_scale=100.0))
        ref = reference_rls(ds, 100.0 * np.eye(3), np.zeros(3))
        for rec, (theta, _, y_pred, e) in zip(records, ref):
            np.testing.assert_allclose(rec.theta_hat, theta, atol=1e-12, rtol=0)
            assert rec.prediction == pytest.approx(y_pred, abs=1e-12)
            assert rec.innovation == pytest.approx(e, abs=1e-12)

    def test_error_carries_step_index(self):
        # the zero regressor leaves lam + phi^T F phi = 1e-13, under the floor
        cfg = ForgettingConfig(lam=1e-13, f0_scale=1.0)
        ds = Dataset.from_arrays([[1.0], [0.0]], [1.0, 1.0])
        with pytest.raises(SingularUpdateError, match="^step 2: ") as info:
            run(ds, cfg)
        assert info.value.step == 2

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            run(Dataset(()))

    def test_iter_run_is_lazy(self):
        pulled = []

        def source():
            for j in range(5):
                pulled.append(j)
                yield Sample([1.0], float(j))

        it = iter_run(source())
        next(it)
        assert pulled == [0]

    def test_gain_inverse_consistency_with_forgetting(self, rng):
        for lam in (0.9, 0.95, 1.0):
            cfg = ForgettingConfig(lam=lam, f0_scale=1.0)
            state = init(3, cfg)
            for _ in range(100):
                phi = rng.standard_normal(3)
                nxt = step(state, Sample(phi, rng.standard_normal()), cfg)
                target = lam * np.linalg.inv(state.gain) + np.outer(phi, phi)
                assert np.max(np.abs(nxt.gain @ target - np.eye(3))) <= 1e-6
                assert np.array_equal(nxt.gain, nxt.gain.T)
                state = nxt
