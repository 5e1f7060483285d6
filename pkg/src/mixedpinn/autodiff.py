"""Automatic differentiation engine.

Two mechanisms cooperate here:

* ``Dual2`` carries a value together with its first (and optionally second)
  derivatives with respect to the two spatial coordinates.  Propagation is
  forward mode: arithmetic on ``Dual2`` applies the chain/product rules
  channel by channel.
* ``Tape`` records every elementary operation performed on its ``Var``
  handles so that one reverse sweep yields the gradient of a scalar with
  respect to all registered parameters.

The two compose naturally: during training the channels of a ``Dual2`` are
``Var`` handles, so spatial derivatives of network outputs are themselves
differentiable with respect to the network parameters.

The graph of a full-batch training loss is static, so the tape re-executes
it in place every epoch and the backward sweep recycles adjoint buffers
through an arena; steady-state training allocates almost nothing.

Values are 64-bit floats throughout; loss magnitudes in the energy terms are
far too small for single precision.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass

import numpy as np


class AutodiffError(Exception):
    """Structural misuse of the tape (wrong tape, non-scalar loss, ...)."""


def _as_value(x):
    if isinstance(x, np.ndarray):
        return x.astype(float, copy=False)
    return float(x)


class Var:
    """Handle to one node of a :class:`Tape`."""

    __slots__ = ("tape", "idx")
    # keep numpy from absorbing us into object arrays; reflected ops run instead
    __array_ufunc__ = None

    def __init__(self, tape, idx):
        self.tape = tape
        self.idx = idx

    @property
    def value(self):
        return self.tape._values[self.idx]

    @property
    def shape(self):
        v = self.value
        return v.shape if isinstance(v, np.ndarray) else ()

    def _lift(self, other):
        if isinstance(other, Var):
            if other.tape is not self.tape:
                raise AutodiffError("operands recorded on different tapes")
            return other
        return self.tape.const(other)

    def __add__(self, other):
        return self.tape._emit("add", (self, self._lift(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self.tape._emit("sub", (self, self._lift(other)))

    def __rsub__(self, other):
        return self.tape._emit("sub", (self._lift(other), self))

    def __mul__(self, other):
        return self.tape._emit("mul", (self, self._lift(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return self.tape._emit("neg", (self,))

    def __repr__(self):
        return f"Var(idx={self.idx}, value={self.value!r})"


def _unbroadcast(grad, shape):
    """Reduce ``grad`` back to ``shape`` after a broadcast forward op."""
    if not isinstance(grad, np.ndarray):
        return grad if shape == () else np.full(shape, grad)
    if grad.shape == shape:
        return grad
    if shape == ():
        return float(grad.sum())
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


class _Arena:
    """Shape-keyed free list so backward sweeps reuse their buffers."""

    def __init__(self):
        self._pool = {}

    def take(self, shape):
        stack = self._pool.get(shape)
        if stack:
            return stack.pop()
        return np.empty(shape)

    def give(self, arr):
        self._pool.setdefault(arr.shape, []).append(arr)


class Tape:
    """Record of elementary operations for one reverse-mode sweep.

    The graph is append-only: recording happens once, after which
    :meth:`forward` re-executes the same operations in place (parameters are
    leaves whose arrays the optimizer mutates) and :meth:`backward` replays
    the adjoint sweep.  Neither method mutates the node list, so repeated
    backward passes return identical values.
    """

    def __init__(self):
        self._ops = []          # (opcode, out_idx, in_idxs, aux)
        self._values = []
        self._needs_grad = []
        self._params = []       # indices of trainable leaves, registration order
        self._const_cache = {}
        self._arena = _Arena()

    # ------------------------------------------------------------------
    # leaves
    def const(self, value):
        if isinstance(value, numbers.Real) and not isinstance(value, bool):
            key = float(value)
            hit = self._const_cache.get(key)
            if hit is not None:
                return hit
            var = self._leaf(key, False)
            self._const_cache[key] = var
            return var
        return self._leaf(value, False)

    def param(self, value):
        var = self._leaf(np.array(value, dtype=float), True)
        self._params.append(var.idx)
        return var

    def _leaf(self, value, needs_grad):
        idx = len(self._values)
        self._values.append(_as_value(value))
        self._needs_grad.append(needs_grad)
        return Var(self, idx)

    @property
    def params(self):
        return [Var(self, i) for i in self._params]

    @property
    def n_nodes(self):
        return len(self._values)

    # ------------------------------------------------------------------
    # recording
    def _emit(self, op, inputs, aux=None):
        vals = [self._values[v.idx] for v in inputs]
        out = _FORWARD[op](vals, aux)
        idx = len(self._values)
        self._values.append(out)
        self._needs_grad.append(any(self._needs_grad[v.idx] for v in inputs))
        self._ops.append((op, idx, tuple(v.idx for v in inputs), aux))
        return Var(self, idx)

    # ------------------------------------------------------------------
    # replay
    def forward(self):
        """Re-execute all recorded operations against current leaf values."""
        values = self._values
        for op, idx, ins, aux in self._ops:
            vals = [values[i] for i in ins]
            out = values[idx]
            fn = _INPLACE.get(op)
            if fn is not None and isinstance(out, np.ndarray):
                fn(vals, aux, out)
            else:
                values[idx] = _FORWARD[op](vals, aux)

    def backward(self, loss):
        """Adjoint sweep from ``loss``; returns adjoints indexed by node.

        Entries are ``None`` for nodes the loss does not depend on (and for
        all pure constants).  Calling backward twice yields identical values.
        """
        return self._backward(loss, recycle=False)

    # ------------------------------------------------------------------
    # parameter vector plumbing
    def param_vector(self):
        if not self._params:
            return np.zeros(0)
        return np.concatenate([np.ravel(self._values[i]) for i in self._params])

    def set_param_vector(self, theta):
        pos = 0
        for i in self._params:
            v = self._values[i]
            n = v.size
            v.flat[:] = theta[pos:pos + n]
            pos += n
        if pos != len(theta):
            raise AutodiffError(f"parameter vector length {len(theta)} != {pos}")

    def gradient_vector(self, loss):
        adj = self._backward(loss, recycle=True)
        arena = self._arena
        parts = []
        for i in self._params:
            g = adj[i]
            if g is None:
                parts.append(np.zeros(np.size(self._values[i])))
            else:
                parts.append(np.ravel(_unbroadcast(np.asarray(g, dtype=float),
                                                   np.shape(self._values[i]))).copy())
                if isinstance(g, np.ndarray):
                    arena.give(g)
                    adj[i] = None
        return np.concatenate(parts) if parts else np.zeros(0)

    # ------------------------------------------------------------------
    def _backward(self, loss, recycle):
        if not isinstance(loss, Var) or loss.tape is not self:
            raise AutodiffError("loss is not a node of this tape")
        lval = self._values[loss.idx]
        if isinstance(lval, np.ndarray) and lval.size != 1:
            raise AutodiffError("loss must be scalar")
        values = self._values
        needs = self._needs_grad
        arena = self._arena if recycle else _Arena()
        adj = [None] * len(values)
        adj[loss.idx] = np.ones(lval.shape) if isinstance(lval, np.ndarray) \
            else 1.0

        def acc_view(i, g):
            """Accumulate a contribution we do not own."""
            a = adj[i]
            if a is None:
                if isinstance(g, np.ndarray):
                    buf = arena.take(g.shape)
                    np.copyto(buf, g)
                    adj[i] = buf
                else:
                    adj[i] = float(g)
            elif isinstance(a, np.ndarray):
                a += g
            else:
                adj[i] = a + float(g)

        def acc_owned(i, buf):
            """Accumulate an arena buffer we own (same shape as the value)."""
            a = adj[i]
            if a is None:
                adj[i] = buf
            else:
                a += buf
                arena.give(buf)

        def acc_reduced(i, full):
            """Accumulate an owned full-shape product, unbroadcasting first."""
            shape = np.shape(values[i])
            if full.shape == shape:
                acc_owned(i, full)
            else:
                acc_view(i, _unbroadcast(full, shape))
                arena.give(full)

        for op, idx, ins, aux in reversed(self._ops):
            g = adj[idx]
            if g is None:
                continue
            out = values[idx]
            big = isinstance(g, np.ndarray)

            if op == "add":
                for i in ins:
                    if needs[i]:
                        gi = _unbroadcast(g, np.shape(values[i]))
                        acc_view(i, gi)
            elif op == "sub":
                a, b = ins
                if needs[a]:
                    acc_view(a, _unbroadcast(g, np.shape(values[a])))
                if needs[b]:
                    if big:
                        buf = arena.take(g.shape)
                        np.negative(g, out=buf)
                        acc_reduced(b, buf)
                    else:
                        acc_view(b, _unbroadcast(-g, np.shape(values[b])))
            elif op == "mul":
                a, b = ins
                for i, j in ((a, b), (b, a)):
                    if not needs[i]:
                        continue
                    other = values[j]
                    if big:
                        buf = arena.take(g.shape)
                        np.multiply(g, other, out=buf)
                        acc_reduced(i, buf)
                    else:
                        acc_view(i, _unbroadcast(g * other, np.shape(values[i])))
            elif op == "neg":
                if big:
                    buf = arena.take(g.shape)
                    np.negative(g, out=buf)
                    acc_owned(ins[0], buf)
                else:
                    acc_view(ins[0], -g)
            elif op == "tanh":
                if big:
                    buf = arena.take(g.shape)
                    np.multiply(out, out, out=buf)
                    np.subtract(1.0, buf, out=buf)
                    buf *= g
                    acc_owned(ins[0], buf)
                else:
                    acc_view(ins[0], g * (1.0 - out * out))
            elif op == "exp":
                if big:
                    buf = arena.take(g.shape)
                    np.multiply(g, out, out=buf)
                    acc_owned(ins[0], buf)
                else:
                    acc_view(ins[0], g * out)
            elif op == "square":
                if big:
                    buf = arena.take(g.shape)
                    np.multiply(g, values[ins[0]], out=buf)
                    buf *= 2.0
                    acc_owned(ins[0], buf)
                else:
                    acc_view(ins[0], 2.0 * g * values[ins[0]])
            elif op == "abs":
                if big:
                    buf = arena.take(g.shape)
                    np.sign(values[ins[0]], out=buf)
                    buf *= g
                    acc_owned(ins[0], buf)
                else:
                    acc_view(ins[0], g * np.sign(values[ins[0]]))
            elif op == "matmul":
                a, b = ins
                ga = np.asarray(g)
                if needs[a]:
                    buf = arena.take(np.shape(values[a]))
                    np.matmul(ga, values[b].T, out=buf)
                    acc_owned(a, buf)
                if needs[b]:
                    buf = arena.take(np.shape(values[b]))
                    np.matmul(values[a].T, ga, out=buf)
                    acc_owned(b, buf)
            elif op == "sum":
                i = ins[0]
                a = adj[i]
                if a is None:
                    buf = arena.take(np.shape(values[i]))
                    buf.fill(g)
                    adj[i] = buf
                else:
                    a += g
            elif op == "mean":
                i = ins[0]
                share = g / np.size(values[i])
                a = adj[i]
                if a is None:
                    buf = arena.take(np.shape(values[i]))
                    buf.fill(share)
                    adj[i] = buf
                else:
                    a += share
            elif op == "rows" or op == "cols":
                i = ins[0]
                lo, hi = aux
                a = adj[i]
                if a is None:
                    a = arena.take(np.shape(values[i]))
                    a.fill(0.0)
                    adj[i] = a
                if op == "rows":
                    a[lo:hi] += g
                else:
                    a[:, lo:hi] += g
            elif op == "affine3":
                w_i, z_i, b_i = ins
                w, z = values[w_i], values[z_i]
                if needs[z_i]:
                    buf = arena.take(z.shape)
                    np.matmul(w.T, g, out=buf)
                    acc_owned(z_i, buf)
                if needs[w_i]:
                    acc_view(w_i, np.matmul(g, z.transpose(0, 2, 1)).sum(axis=0))
                if needs[b_i]:
                    acc_view(b_i, g[0].sum(axis=1, keepdims=True))
            elif op == "tanhdual3":
                z = values[ins[0]]
                t = out[0]
                dz = arena.take(z.shape)
                s = arena.take(t.shape)
                np.multiply(t, t, out=s)
                np.subtract(1.0, s, out=s)                  # s = 1 - t^2
                np.multiply(s, g[1], out=dz[1])
                np.multiply(s, g[2], out=dz[2])
                tmp = arena.take(t.shape)
                np.multiply(z[1], g[1], out=tmp)
                np.multiply(z[2], g[2], out=dz[0])
                tmp += dz[0]
                tmp *= t
                tmp *= s
                tmp *= -2.0                                 # -2 t s (zx gx + zy gy)
                np.multiply(s, g[0], out=dz[0])
                dz[0] += tmp
                arena.give(s)
                arena.give(tmp)
                acc_owned(ins[0], dz)
            elif op == "chan3":
                i = ins[0]
                c, r = aux
                a = adj[i]
                if a is None:
                    a = arena.take(np.shape(values[i]))
                    a.fill(0.0)
                    adj[i] = a
                a[c, r:r + 1, :] += g
            else:
                raise AutodiffError(f"no backward rule for op {op!r}")

            if recycle and big:
                arena.give(g)
                adj[idx] = None
        return adj


def tape_gradient(loss, tape):
    """Gradient of a recorded scalar w.r.t. every registered parameter.

    Parameters the loss does not depend on get an exact zero entry.
    """
    if not isinstance(loss, Var) or loss.tape is not tape:
        raise AutodiffError("loss is not a node of the given tape")
    return tape.gradient_vector(loss)


# ----------------------------------------------------------------------
# forward op tables
def _fw_tanhdual3(v, aux):
    out = np.empty_like(v[0])
    _ip_tanhdual3(v, aux, out)
    return out


def _ip_tanhdual3(v, aux, out):
    z = v[0]
    np.tanh(z[0], out=out[0])
    np.multiply(out[0], out[0], out=out[1])
    np.subtract(1.0, out[1], out=out[1])         # out[1] holds s = 1 - tanh^2
    np.multiply(out[1], z[2], out=out[2])
    np.multiply(out[1], z[1], out=out[1])


def _fw_affine3(v, aux):
    out = np.matmul(v[0], v[1])
    out[0] += v[2]
    return out


def _ip_affine3(v, aux, out):
    np.matmul(v[0], v[1], out=out)
    out[0] += v[2]


_FORWARD = {
    "add": lambda v, aux: v[0] + v[1],
    "sub": lambda v, aux: v[0] - v[1],
    "mul": lambda v, aux: v[0] * v[1],
    "neg": lambda v, aux: -v[0],
    "tanh": lambda v, aux: np.tanh(v[0]),
    "exp": lambda v, aux: np.exp(v[0]),
    "square": lambda v, aux: v[0] * v[0],
    "abs": lambda v, aux: abs(v[0]),
    "matmul": lambda v, aux: v[0] @ v[1],
    "sum": lambda v, aux: float(np.sum(v[0])),
    "mean": lambda v, aux: float(np.mean(v[0])),
    "rows": lambda v, aux: v[0][aux[0]:aux[1]],
    "cols": lambda v, aux: v[0][:, aux[0]:aux[1]],
    "chan3": lambda v, aux: v[0][aux[0], aux[1]:aux[1] + 1, :],
    "affine3": _fw_affine3,
    "tanhdual3": _fw_tanhdual3,
}

# in-place variants used on replay to avoid reallocating large arrays
_INPLACE = {
    "add": lambda v, aux, out: np.add(v[0], v[1], out=out),
    "sub": lambda v, aux, out: np.subtract(v[0], v[1], out=out),
    "mul": lambda v, aux, out: np.multiply(v[0], v[1], out=out),
    "neg": lambda v, aux, out: np.negative(v[0], out=out),
    "tanh": lambda v, aux, out: np.tanh(v[0], out=out),
    "exp": lambda v, aux, out: np.exp(v[0], out=out),
    "square": lambda v, aux, out: np.multiply(v[0], v[0], out=out),
    "abs": lambda v, aux, out: np.absolute(v[0], out=out),
    "matmul": lambda v, aux, out: np.matmul(v[0], v[1], out=out),
    "affine3": _ip_affine3,
    "tanhdual3": _ip_tanhdual3,
}


# ----------------------------------------------------------------------
# dispatch helpers: work on Var, ndarray and plain floats alike
def _is_zero(x):
    return isinstance(x, numbers.Real) and float(x) == 0.0


def add(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return a + b


def sub(a, b):
    if _is_zero(b):
        return a
    if _is_zero(a):
        return -b
    return a - b


def mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return 0.0
    if isinstance(a, numbers.Real) and float(a) == 1.0:
        return b
    if isinstance(b, numbers.Real) and float(b) == 1.0:
        return a
    return a * b


def tanh(x):
    if isinstance(x, Var):
        return x.tape._emit("tanh", (x,))
    return np.tanh(x)


def exp(x):
    if isinstance(x, Var):
        return x.tape._emit("exp", (x,))
    return np.exp(x)


def square(x):
    if _is_zero(x):
        return 0.0
    if isinstance(x, Var):
        return x.tape._emit("square", (x,))
    return x * x


def absval(x):
    if isinstance(x, Var):
        return x.tape._emit("abs", (x,))
    return abs(x)


def matmul(a, b):
    if isinstance(b, numbers.Real):
        return mul(a, b)
    if isinstance(a, Var):
        return a.tape._emit("matmul", (a, a._lift(b)))
    if isinstance(b, Var):
        return b.tape._emit("matmul", (b._lift(a), b))
    return a @ b


def vmean(x):
    if isinstance(x, Var):
        return x.tape._emit("mean", (x,))
    return float(np.mean(x))


def vsum(x):
    if isinstance(x, Var):
        return x.tape._emit("sum", (x,))
    return float(np.sum(x))


def rows(x, lo, hi):
    if isinstance(x, Var):
        return x.tape._emit("rows", (x,), aux=(lo, hi))
    return x[lo:hi]


def cols(x, lo, hi):
    if isinstance(x, Var):
        return x.tape._emit("cols", (x,), aux=(lo, hi))
    return x[:, lo:hi]


def affine_block(w, z, b):
    """w @ z + bias on a channel-block stack z of shape (3, width, n).

    The matmul applies to every channel; the bias only to the value block.
    """
    if isinstance(w, Var):
        return w.tape._emit("affine3", (w, w._lift(z), w._lift(b)))
    if isinstance(z, Var):
        return z.tape._emit("affine3", (z._lift(w), z, z._lift(b)))
    return _fw_affine3([w, z, b], None)


def tanh_block(z):
    """Fused tanh on a first-order channel-block stack [value, d_x, d_y].

    The value block passes through tanh; both derivative blocks are scaled by
    1 - tanh^2 (the chain rule).
    """
    if isinstance(z, Var):
        return z.tape._emit("tanhdual3", (z,))
    return _fw_tanhdual3([z], None)


def channel(z, c, r):
    """Row ``r`` of channel ``c`` from a block stack, as a (1, n) slice."""
    if isinstance(z, Var):
        return z.tape._emit("chan3", (z,), aux=(c, r))
    return z[c, r:r + 1, :]


def value_of(x):
    """Plain numeric value of a Var / array / scalar."""
    if isinstance(x, Var):
        return x.value
    return x


# ----------------------------------------------------------------------
# forward-mode duals
@dataclass
class Dual2:
    """Value with first and optional second spatial derivative channels.

    Channels hold floats, numpy arrays or tape ``Var`` handles.  Mixed-partial
    symmetry means a single ``d_xy`` channel suffices.  Second-order channels
    are ``None`` unless second-order propagation was requested, in which case
    all three are populated.
    """

    value: object
    d_x: object = 0.0
    d_y: object = 0.0
    d_xx: object = None
    d_xy: object = None
    d_yy: object = None

    @property
    def order(self):
        return 2 if self.d_xx is not None else 1

    @staticmethod
    def constant(c, second_order=False):
        if second_order:
            return Dual2(c, 0.0, 0.0, 0.0, 0.0, 0.0)
        return Dual2(c)

    def _lift(self, other):
        if isinstance(other, Dual2):
            if (other.d_xx is None) != (self.d_xx is None):
                raise AutodiffError("mixing first- and second-order duals")
            return other
        return Dual2.constant(other, second_order=self.d_xx is not None)

    def __add__(self, other):
        o = self._lift(other)
        if self.d_xx is None:
            return Dual2(add(self.value, o.value), add(self.d_x, o.d_x),
                         add(self.d_y, o.d_y))
        return Dual2(add(self.value, o.value), add(self.d_x, o.d_x),
                     add(self.d_y, o.d_y), add(self.d_xx, o.d_xx),
                     add(self.d_xy, o.d_xy), add(self.d_yy, o.d_yy))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __neg__(self):
        if self.d_xx is None:
            return Dual2(-self.value, _neg_ch(self.d_x), _neg_ch(self.d_y))
        return Dual2(-self.value, _neg_ch(self.d_x), _neg_ch(self.d_y),
                     _neg_ch(self.d_xx), _neg_ch(self.d_xy), _neg_ch(self.d_yy))

    def __mul__(self, other):
        o = self._lift(other)
        a, b = self, o
        val = mul(a.value, b.value)
        dx = add(mul(a.d_x, b.value), mul(a.value, b.d_x))
        dy = add(mul(a.d_y, b.value), mul(a.value, b.d_y))
        if a.d_xx is None:
            return Dual2(val, dx, dy)
        dxx = add(add(mul(a.d_xx, b.value), mul(2.0, mul(a.d_x, b.d_x))),
                  mul(a.value, b.d_xx))
        dyy = add(add(mul(a.d_yy, b.value), mul(2.0, mul(a.d_y, b.d_y))),
                  mul(a.value, b.d_yy))
        dxy = add(add(mul(a.d_xy, b.value), mul(a.d_x, b.d_y)),
                  add(mul(a.d_y, b.d_x), mul(a.value, b.d_xy)))
        return Dual2(val, dx, dy, dxx, dxy, dyy)

    __rmul__ = __mul__


def _neg_ch(c):
    return 0.0 if _is_zero(c) else -c


def dual_tanh(x: Dual2) -> Dual2:
    """tanh with exact first/second derivative propagation."""
    t = tanh(x.value)
    s = sub(1.0, square(t))               # tanh' = 1 - tanh^2
    dx = mul(s, x.d_x)
    dy = mul(s, x.d_y)
    if x.d_xx is None:
        return Dual2(t, dx, dy)
    c = mul(-2.0, mul(t, s))              # tanh'' = -2 tanh (1 - tanh^2)
    dxx = add(mul(c, square(x.d_x)), mul(s, x.d_xx))
    dyy = add(mul(c, square(x.d_y)), mul(s, x.d_yy))
    dxy = add(mul(c, mul(x.d_x, x.d_y)), mul(s, x.d_xy))
    return Dual2(t, dx, dy, dxx, dxy, dyy)


def dual_exp(x: Dual2) -> Dual2:
    e = exp(x.value)
    dx = mul(e, x.d_x)
    dy = mul(e, x.d_y)
    if x.d_xx is None:
        return Dual2(e, dx, dy)
    dxx = mul(e, add(square(x.d_x), x.d_xx))
    dyy = mul(e, add(square(x.d_y), x.d_yy))
    dxy = mul(e, add(mul(x.d_x, x.d_y), x.d_xy))
    return Dual2(e, dx, dy, dxx, dxy, dyy)


def spatial_inputs(xs, ys, second_order=False):
    """Dual pair (x, y) for a batch of points.

    ``xs``/``ys`` are 1-D arrays; the value channels become ``(1, n)`` rows so
    that network layers can matrix-multiply them directly.
    """
    xr = np.atleast_2d(np.asarray(xs, dtype=float))
    yr = np.atleast_2d(np.asarray(ys, dtype=float))
    if second_order:
        return (Dual2(xr, 1.0, 0.0, 0.0, 0.0, 0.0),
                Dual2(yr, 0.0, 1.0, 0.0, 0.0, 0.0))
    return Dual2(xr, 1.0, 0.0), Dual2(yr, 0.0, 1.0)


def line_input(xs, second_order=False):
    """Dual for a 1-D coordinate batch (the ODE benchmark input)."""
    xr = np.atleast_2d(np.asarray(xs, dtype=float))
    if second_order:
        return Dual2(xr, 1.0, 0.0, 0.0, 0.0, 0.0)
    return Dual2(xr, 1.0, 0.0)
