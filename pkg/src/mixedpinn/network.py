"""Feed-forward networks and the five solver-head layouts.

Hidden layers use tanh; the output layer is affine.  Stress and flux heads
must reach arbitrary magnitudes, so a bounded output activation would be
unable to represent them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import Dual2, dual_tanh


class NetworkError(Exception):
    pass


# counts forward passes that propagate second-order spatial channels;
# lets tests assert which model variants actually request them
_second_order_forwards = 0


def reset_second_order_count():
    global _second_order_forwards
    _second_order_forwards = 0


def second_order_count():
    return _second_order_forwards


@dataclass
class Mlp:
    """Fully connected network: weights[l] has shape (N_l, N_{l-1})."""

    layer_sizes: list
    weights: list = field(repr=False)
    biases: list = field(repr=False)

    @property
    def n_params(self):
        return sum(n_out * n_in + n_out for n_in, n_out
                   in zip(self.layer_sizes[:-1], self.layer_sizes[1:]))

    @property
    def n_inputs(self):
        return self.layer_sizes[0]

    @property
    def n_outputs(self):
        return self.layer_sizes[-1]


def init_params(layer_sizes, seed):
    """Glorot-style uniform weights (fan scaled), zero biases.

    Deterministic per seed; the same seed yields bit-identical parameters.
    """
    sizes = [int(n) for n in layer_sizes]
    if len(sizes) < 2:
        raise NetworkError("need at least an input and an output layer")
    if any(n <= 0 for n in sizes):
        raise NetworkError(f"layer sizes must be positive, got {sizes}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (n_in + n_out))
        weights.append(rng.uniform(-limit, limit, size=(n_out, n_in)))
        biases.append(np.zeros((n_out, 1)))
    return Mlp(sizes, weights, biases)


def forward(net, inputs):
    """Evaluate the network on dual inputs; returns one Dual2 per output.

    ``inputs`` is a sequence of Dual2 (x and y for PDE problems, a single
    coordinate for the ODE benchmark) whose value channels are ``(1, n)``
    batches.  Derivative channels propagate through every layer; the output
    layer applies no activation.

    First-order duals run in a fused layout: the three channels are column
    blocks of one matrix, so each layer is a single matmul plus one fused
    tanh op.  Second-order duals propagate channel by channel.
    """
    global _second_order_forwards
    if len(inputs) != net.n_inputs:
        raise NetworkError(
            f"network expects {net.n_inputs} inputs, got {len(inputs)}")
    second = inputs[0].d_xx is not None
    if second:
        _second_order_forwards += 1
        return _forward_channelwise(net, inputs)
    return _forward_blocked(net, inputs)


def _forward_blocked(net, inputs):
    n = int(np.shape(ad.value_of(inputs[0].value))[-1])
    k = len(inputs)
    h = np.empty((3, k, n))
    for c, channel in enumerate(("value", "d_x", "d_y")):
        for i, x in enumerate(inputs):
            h[c, i, :] = ad.value_of(getattr(x, channel))
    n_layers = len(net.weights)
    for l in range(n_layers):
        h = ad.affine_block(net.weights[l], h, net.biases[l])
        if l < n_layers - 1:
            h = ad.tanh_block(h)
    return [Dual2(ad.channel(h, 0, r), ad.channel(h, 1, r), ad.channel(h, 2, r))
            for r in range(net.n_outputs)]


def _forward_channelwise(net, inputs):
    second = inputs[0].d_xx is not None
    h = _affine_inputs(net.weights[0], net.biases[0], inputs, second)
    n_layers = len(net.weights)
    for l in range(1, n_layers):
        h = dual_tanh(h)
        h = _affine(net.weights[l], net.biases[l], h, second)
    outs = []
    for r in range(net.n_outputs):
        if net.n_outputs == 1:
            outs.append(h)
        else:
            outs.append(_take_row(h, r, second))
    return outs


def _affine_inputs(w, b, inputs, second):
    """First layer: per-input weight columns; scalar channels stay skinny."""
    channels = ["value", "d_x", "d_y"]
    if second:
        channels += ["d_xx", "d_xy", "d_yy"]
    acc = {c: 0.0 for c in channels}
    for i, x in enumerate(inputs):
        col = ad.cols(w, i, i + 1)
        for c in channels:
            ch = getattr(x, c)
            if isinstance(ch, (int, float)):
                term = ad.mul(col, float(ch))
            else:
                term = ad.matmul(col, ch)
            acc[c] = ad.add(acc[c], term)
    acc["value"] = ad.add(acc["value"], b)
    if second:
        return Dual2(acc["value"], acc["d_x"], acc["d_y"],
                     acc["d_xx"], acc["d_xy"], acc["d_yy"])
    return Dual2(acc["value"], acc["d_x"], acc["d_y"])


def _affine(w, b, h, second):
    val = ad.add(ad.matmul(w, h.value), b)
    dx = ad.matmul(w, h.d_x)
    dy = ad.matmul(w, h.d_y)
    if second:
        return Dual2(val, dx, dy, ad.matmul(w, h.d_xx),
                     ad.matmul(w, h.d_xy), ad.matmul(w, h.d_yy))
    return Dual2(val, dx, dy)


def _take_row(h, r, second):
    if second:
        return Dual2(ad.rows(h.value, r, r + 1), ad.rows(h.d_x, r, r + 1),
                     ad.rows(h.d_y, r, r + 1), ad.rows(h.d_xx, r, r + 1),
                     ad.rows(h.d_xy, r, r + 1), ad.rows(h.d_yy, r, r + 1))
    return Dual2(ad.rows(h.value, r, r + 1), ad.rows(h.d_x, r, r + 1),
                 ad.rows(h.d_y, r, r + 1))


# ----------------------------------------------------------------------
# model variants
@dataclass(frozen=True)
class ModelVariant:
    """Which outputs exist, how they are wired, and which losses train them.

    ``sf_source``/``nbc_source`` say whether the strong-form and Neumann
    residuals act on the gradient-variable heads or on derivatives of the
    primary variable; ``second_order`` marks the variants whose losses need
    second spatial derivatives.
    """

    tag: str
    separated: bool
    stress_heads: bool
    terms: tuple
    second_order: bool
    sf_source: str = None
    nbc_source: str = None
    neumann_via_energy: bool = False


VARIANTS = {
    "A": ModelVariant("A", True, False, ("DBC", "SF", "NBC"), True,
                      sf_source="primary", nbc_source="primary"),
    "B": ModelVariant("B", True, False, ("EF", "DBC"), False,
                      neumann_via_energy=True),
    "C": ModelVariant("C", False, True, ("EF", "DBC", "cnc", "SF", "NBC"),
                      False, sf_source="heads", nbc_source="heads"),
    "D": ModelVariant("D", True, True, ("DBC", "cnc", "SF", "NBC"), True,
                      sf_source="primary", nbc_source="heads"),
    "E": ModelVariant("E", True, True, ("EF", "DBC", "cnc", "SF", "NBC"),
                      False, sf_source="heads", nbc_source="heads"),
}

ELASTIC_OUTPUTS = ("u_x", "u_y", "sig_x", "sig_y", "sig_xy")
THERMAL_OUTPUTS = ("T", "q_x", "q_y")


@dataclass
class SolverHeads:
    """Networks realizing one model variant for one problem type."""

    variant: ModelVariant
    problem: str
    nets: dict                      # name -> Mlp ("combined" for variant C)
    outputs: tuple                  # active output names in canonical order
    output_of: dict                 # output name -> (net name, output row)

    @property
    def primary_outputs(self):
        return self.outputs[:2] if self.problem == "elastic" else self.outputs[:1]

    def bind(self, tape):
        """Copy with weights/biases registered as tape parameters."""
        nets = {}
        for name, net in self.nets.items():
            nets[name] = Mlp(net.layer_sizes,
                             [tape.param(w) for w in net.weights],
                             [tape.param(b) for b in net.biases])
        return SolverHeads(self.variant, self.problem, nets,
                           self.outputs, self.output_of)

    def evaluate(self, x, y):
        """Forward every net once; returns {output name: Dual2}."""
        per_net = {name: forward(net, (x, y)) for name, net in self.nets.items()}
        return {out: per_net[net_name][row]
                for out, (net_name, row) in self.output_of.items()}

    def pull_values(self):
        """Plain-numpy copy of the current weights (after tape training)."""
        nets = {}
        for name, net in self.nets.items():
            nets[name] = Mlp(net.layer_sizes,
                             [np.array(ad.value_of(w)) for w in net.weights],
                             [np.array(ad.value_of(b)) for b in net.biases])
        return SolverHeads(self.variant, self.problem, nets,
                           self.outputs, self.output_of)


def assemble_variant(variant, problem, hidden_layers=5, neurons=40, seed=0):
    """Create the networks and output wiring for a model variant.

    Separated variants get one network per output; variant C shares a single
    network with one output neuron per quantity.  Per-head seeds are spawned
    from ``seed`` so heads are independent but the whole set is reproducible.
    """
    if isinstance(variant, ModelVariant):
        spec = variant
    else:
        try:
            spec = VARIANTS[str(variant).upper()]
        except KeyError:
            raise NetworkError(f"unknown model variant {variant!r}") from None
    if problem not in ("elastic", "thermal"):
        raise NetworkError(f"unknown problem type {problem!r}")

    all_outputs = ELASTIC_OUTPUTS if problem == "elastic" else THERMAL_OUTPUTS
    n_primary = 2 if problem == "elastic" else 1
    outputs = all_outputs if spec.stress_heads else all_outputs[:n_primary]

    hidden = [int(neurons)] * int(hidden_layers)
    seeds = np.random.SeedSequence(seed).spawn(len(outputs))
    nets, output_of = {}, {}
    if spec.separated:
        for i, name in enumerate(outputs):
            nets[name] = init_params([2] + hidden + [1], seeds[i])
            output_of[name] = (name, 0)
    else:
        nets["combined"] = init_params([2] + hidden + [len(outputs)], seeds[0])
        for i, name in enumerate(outputs):
            output_of[name] = ("combined", i)
    return SolverHeads(spec, problem, nets, tuple(outputs), output_of)


# ----------------------------------------------------------------------
# parameter snapshots
def save_params(nets, path):
    """Write named networks as a text snapshot (sizes header + row-major arrays)."""
    with open(path, "w") as fh:
        fh.write("mixedpinn-params 1\n")
        for name, net in nets.items():
            sizes = " ".join(str(n) for n in net.layer_sizes)
            fh.write(f"head {name} {sizes}\n")
            for w, b in zip(net.weights, net.biases):
                for row in np.asarray(w):
                    fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
                fh.write(" ".join(f"{v:.17g}" for v in np.ravel(b)) + "\n")


def load_params(path):
    """Inverse of :func:`save_params`; returns {name: Mlp}."""
    with open(path) as fh:
        magic = fh.readline().split()
        if magic[:1] != ["mixedpinn-params"]:
            raise NetworkError(f"{path}: not a parameter snapshot")
        nets = {}
        line = fh.readline()
        while line:
            parts = line.split()
            if not parts:
                line = fh.readline()
                continue
            if parts[0] != "head":
                raise NetworkError(f"{path}: expected head record, got {line!r}")
            name, sizes = parts[1], [int(n) for n in parts[2:]]
            weights, biases = [], []
            for n_in, n_out in zip(sizes[:-1], sizes[1:]):
                w = np.array([[float(v) for v in fh.readline().split()]
                              for _ in range(n_out)])
                if w.shape != (n_out, n_in):
                    raise NetworkError(f"{path}: bad weight block for {name}")
                b = np.array([float(v) for v in fh.readline().split()])
                weights.append(w)
                biases.append(b.reshape(n_out, 1))
            nets[name] = Mlp(sizes, weights, biases)
            line = fh.readline()
    return nets
