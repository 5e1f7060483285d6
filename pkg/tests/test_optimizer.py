"""Adam update rules, the training loop, and the repeated-seed summary."""

import numpy as np
import pytest

from mixedpinn import autodiff as ad
from mixedpinn.autodiff import Tape
from mixedpinn.optimizer import (CompiledLoss, TERMS, TrainingError, adam_init,
                                 adam_step, repeat_runs, train)


class TestAdamStep:
    def test_zero_gradient_keeps_params(self):
        state = adam_init(3)
        params = np.array([1.0, -2.0, 0.5])
        new, state = adam_step(params, np.zeros(3), state)
        assert np.array_equal(new, params)
        assert state.t == 1

    def test_single_step_closed_form(self):
        # bias correction makes m_hat = g and v_hat = g^2 at t=1, so the
        # update is -alpha g / (|g| + eps)
        state = adam_init(1, alpha=1e-3, eps=1e-8)
        new, _ = adam_step(np.array([0.0]), np.array([0.5]), state)
        assert new[0] == pytest.approx(-9.99999980e-4, rel=1e-9)

    def test_two_identical_gradients_step_bounded(self):
        state = adam_init(1, alpha=1e-3)
        p = np.array([0.0])
        for _ in range(2):
            prev = p.copy()
            p, state = adam_step(p, np.array([0.3]), state)
            step = abs(p[0] - prev[0])
            assert 0.0 < step <= 1e-3 + 1e-12

    def test_scale_awareness(self):
        # doubling alpha exactly doubles the first step
        s1 = adam_init(1, alpha=1e-3)
        s2 = adam_init(1, alpha=2e-3)
        p1, _ = adam_step(np.array([0.0]), np.array([0.7]), s1)
        p2, _ = adam_step(np.array([0.0]), np.array([0.7]), s2)
        assert p2[0] == 2.0 * p1[0]

    def test_non_finite_gradient_raises(self):
        state = adam_init(2)
        with pytest.raises(TrainingError):
            adam_step(np.zeros(2), np.array([1.0, np.nan]), state)

    def test_length_mismatch(self):
        with pytest.raises(TrainingError):
            adam_step(np.zeros(2), np.zeros(3), adam_init(2))


def constant_fit_loss(target=0.5, start=0.0):
    """1-parameter model fitted to a constant by squared error."""
    tape = Tape()
    w = tape.param(np.array([start]))
    loss = ad.vmean(ad.square(ad.sub(w, target)))
    return CompiledLoss(tape, {"DBC": loss}, loss)


class TestTrain:
    def test_convex_toy_converges(self):
        loss = constant_fit_loss()
        theta, record = train(loss, epochs=5000)
        assert record.total[-1] < record.total[0]
        assert record.total[-1] < 1e-10
        assert abs(theta[0] - 0.5) < 1e-4

    def test_zero_epoch_budget(self):
        loss = constant_fit_loss()
        theta, record = train(loss, epochs=0)
        assert record.n_epochs == 0
        assert np.array_equal(theta, np.array([0.0]))

    def test_stopping_value_triggers(self):
        loss = constant_fit_loss(target=0.0, start=1e-8)
        _, record = train(loss, epochs=1000, stopping=1e-12)
        assert record.stopped_early
        assert record.n_epochs < 1000
        assert record.total[-1] < 1e-12

    def test_total_is_sum_of_components(self):
        tape = Tape()
        w = tape.param(np.array([0.3]))
        t1 = ad.vmean(ad.square(ad.sub(w, 1.0)))
        t2 = ad.vmean(ad.square(w))
        loss = CompiledLoss(tape, {"DBC": t1, "SF": t2}, ad.add(t1, t2))
        _, record = train(loss, epochs=50)
        total = sum(record.components[t] for t in TERMS)
        assert np.array_equal(record.total, total)

    def test_determinism(self):
        run1 = train(constant_fit_loss(), epochs=200)
        run2 = train(constant_fit_loss(), epochs=200)
        assert np.array_equal(run1[0], run2[0])
        assert np.array_equal(run1[1].total, run2[1].total)

    def test_abort_on_non_finite_loss_restores_last_finite(self):
        tape = Tape()
        w = tape.param(np.array([2.0]))
        loss_var = ad.vsum(ad.exp(ad.exp(w)))
        loss = CompiledLoss(tape, {"EF": loss_var}, loss_var)
        # negative learning rate turns the step into ascent; exp(exp(w))
        # overflows within a couple of steps and the loop must bail out,
        # restoring the last parameters whose loss was finite
        with np.errstate(over="ignore"):
            theta, record = train(loss, epochs=100, learning_rate=-5.0)
        assert record.aborted
        assert np.isfinite(theta[0])
        assert np.all(np.isfinite(record.total))

    def test_csv_export_schema(self, tmp_path):
        loss = constant_fit_loss()
        _, record = train(loss, epochs=20)
        path = tmp_path / "history.csv"
        record.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "epoch,L_EF,L_DBC,L_cnc,L_SF,L_NBC,L_total"
        assert len(lines) == 21
        first = lines[1].split(",")
        assert float(first[6]) == pytest.approx(0.25)

    def test_csv_decimation_above_10k(self, tmp_path):
        loss = constant_fit_loss()
        _, record = train(loss, epochs=10050, stopping=0.0)
        path = tmp_path / "history.csv"
        record.to_csv(path)
        lines = path.read_text().strip().splitlines()
        epochs = [int(row.split(",")[0]) for row in lines[1:]]
        assert epochs[0] == 0 and epochs[-1] == 10049
        assert all(e % 10 == 0 for e in epochs[:-1])


class TestRepeatRuns:
    def run_for_seed(self, seed):
        rng = np.random.default_rng(seed)
        loss = constant_fit_loss(start=float(rng.uniform(-1, 1)))
        return train(loss, epochs=100)[1]

    def test_identical_seeds_zero_width_band(self):
        summary = repeat_runs(lambda s: self.run_for_seed(0), [0, 0])
        assert np.array_equal(summary.lower, summary.upper)
        assert np.array_equal(summary.mean, summary.lower)

    def test_distinct_seeds_band_nonnegative(self):
        summary = repeat_runs(self.run_for_seed, [0, 1, 2, 3, 4])
        assert np.all(summary.upper >= summary.lower)
        assert np.all(summary.upper >= summary.mean)

    def test_constant_objective_zero_band(self):
        # loss does not depend on the parameter: every history is identical
        def run(seed):
            tape = Tape()
            tape.param(np.array([float(seed)]))
            const = ad.vmean(ad.square(tape.const(np.array([3.0]))))
            return train(CompiledLoss(tape, {"EF": const}, const),
                         epochs=30)[1]

        summary = repeat_runs(run, [1, 2, 3])
        assert np.allclose(summary.mean, 9.0)
        assert np.array_equal(summary.lower, summary.upper)

    def test_needs_two_seeds(self):
        with pytest.raises(ValueError):
            repeat_runs(self.run_for_seed, [0])
