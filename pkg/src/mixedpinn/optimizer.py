"""Adam optimizer and the full-batch training loop.

The whole collocation set is fed every epoch: the energy term is a single
global sum over all interior points, so there is no meaningful way to split
it into mini-batches.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad

TERMS = ("EF", "DBC", "cnc", "SF", "NBC")
CSV_HEADER = ["epoch", "L_EF", "L_DBC", "L_cnc", "L_SF", "L_NBC", "L_total"]


class TrainingError(Exception):
    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


@dataclass
class AdamState:
    """First/second moment accumulators plus the usual knobs."""

    t: int
    m: np.ndarray
    v: np.ndarray
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(n, alpha=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
    return AdamState(0, np.zeros(n), np.zeros(n), alpha, beta1, beta2, eps)


def adam_step(params, grad, state):
    """One bias-corrected Adam update; returns (new params, new state)."""
    if len(params) != len(grad) or len(params) != len(state.m):
        raise TrainingError("parameter/gradient/state length mismatch")
    if not np.all(np.isfinite(grad)):
        raise TrainingError("non-finite gradient component")
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    new = params - state.alpha * m_hat / (np.sqrt(v_hat) + state.eps)
    return new, AdamState(t, m, v, state.alpha, state.beta1, state.beta2,
                          state.eps)


class CompiledLoss:
    """A recorded loss graph: total plus named components on one tape.

    Components absent for the chosen model variant are ``None``; the values
    reported for them are exact zeros so the equal-weight identity
    ``total = EF + DBC + cnc + SF + NBC`` holds at every epoch.
    """

    def __init__(self, tape, terms, total):
        self.tape = tape
        self.terms = terms
        self.total = total

    def component_values(self):
        out = {}
        for name in TERMS:
            term = self.terms.get(name)
            out[name] = _scalar(term) if term is not None else 0.0
        out["total"] = _scalar(self.total)
        return out


def _scalar(term):
    v = ad.value_of(term)
    return float(np.ravel(v)[0]) if isinstance(v, np.ndarray) else float(v)


@dataclass
class TrainRecord:
    """Per-epoch loss components, totals, and wall-clock times."""

    seed: object
    components: dict = field(default_factory=dict)   # term -> array
    total: np.ndarray = None
    wall: np.ndarray = None
    stopped_early: bool = False
    aborted: bool = False

    @property
    def n_epochs(self):
        return 0 if self.total is None else len(self.total)

    def to_csv(self, path):
        """Write the history; above 10^4 epochs only every 10th row is kept."""
        n = self.n_epochs
        if n > 10_000:
            keep = [e for e in range(n) if e % 10 == 0]
            if keep and keep[-1] != n - 1:
                keep.append(n - 1)
        else:
            keep = range(n)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for e in keep:
                row = [e] + [f"{self.components[t][e]:.17g}" for t in TERMS]
                row.append(f"{self.total[e]:.17g}")
                writer.writerow(row)


def train(loss, epochs, learning_rate=1e-3, beta1=0.9, beta2=0.999,
          eps=1e-8, stopping=1e-12, seed=None):
    """Minimize a compiled loss with full-batch Adam.

    Runs until the epoch budget is exhausted or the total drops below the
    stopping value.  A non-finite total aborts the run and restores the last
    parameter vector that produced a finite loss; a non-finite gradient is an
    error carrying the epoch index.

    Returns (final parameter vector, TrainRecord).  The tape's parameters are
    left at the returned vector.
    """
    tape = loss.tape
    theta = tape.param_vector()
    state = adam_init(len(theta), learning_rate, beta1, beta2, eps)
    comps = {t: [] for t in TERMS}
    totals, walls = [], []
    stopped, aborted = False, False
    prev_theta = theta
    t_last = time.perf_counter()
    for epoch in range(int(epochs)):
        if epoch > 0:
            tape.forward()
        values = loss.component_values()
        total = values["total"]
        if not np.isfinite(total):
            aborted = True
            theta = prev_theta
            tape.set_param_vector(theta)
            break
        for t in TERMS:
            comps[t].append(values[t])
        totals.append(total)
        now = time.perf_counter()
        walls.append(now - t_last)
        t_last = now
        if total < stopping:
            stopped = True
            break
        grad = tape.gradient_vector(loss.total)
        prev_theta = theta
        try:
            theta, state = adam_step(theta, grad, state)
        except TrainingError as err:
            raise TrainingError(str(err), epoch=epoch) from None
        tape.set_param_vector(theta)
    record = TrainRecord(seed,
                         {t: np.array(comps[t]) for t in TERMS},
                         np.array(totals), np.array(walls),
                         stopped, aborted)
    return theta, record


@dataclass
class RepeatSummary:
    """Mean total-loss history across seeds with a 95 % confidence band."""

    seeds: list
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    records: list


def repeat_runs(train_once, seeds):
    """Train once per seed and aggregate the total-loss histories.

    ``train_once(seed)`` must return a TrainRecord.  Histories are truncated
    to the shortest run before aggregating; the band is mean +/- 1.96 times
    the standard error across seeds.
    """
    seeds = list(seeds)
    if len(seeds) < 2:
        raise ValueError("repeat_runs needs at least 2 seeds")
    records = [train_once(s) for s in seeds]
    n = min(r.n_epochs for r in records)
    stack = np.stack([r.total[:n] for r in records])
    mean = stack.mean(axis=0)
    stderr = stack.std(axis=0, ddof=1) / np.sqrt(len(seeds))
    half = 1.96 * stderr
    return RepeatSummary(seeds, mean, mean - half, mean + half, records)
