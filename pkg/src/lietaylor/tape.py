"""Code lists for vector fields and the Taylor-coefficient generator.

:func:`record` runs a vector field once on tracing scalars and stores the
straight-line program it executes as a :class:`CodeList`.  The interpreter
turns every instruction into an incremental kernel from
:mod:`lietaylor.series` and walks the list once per order:

* ODE mode (:func:`taylcoeffs`): after pass ``k`` the new solution coefficient
  is ``x_{k+1} = f_k / (k + 1)``;
* algebraic mode (:meth:`CodeList.evaluate_series`): all input coefficients
  are known up front.

Jacobians come from running the same kernels on :class:`~lietaylor.scalars.Dual`
coefficients (value plus dense gradient), which is exactly the
gradient-augmented form of every recurrence.

Operand encoding: ``i >= 0`` is value-table slot ``i`` (slots ``0..n-1`` are
the inputs); ``i < 0`` is constant ``-i - 1`` of the pool.
"""

from typing import NamedTuple

import mpmath
import numpy as np

from .array import TaylorArray
from .errors import DomainError, NonFiniteCoefficient, ShapeMismatch, UnsupportedOperation
from .report import OracleReport
from .scalars import Dual, is_finite, machine_eps, value_of
from .series import (
    CATALOG, PAIRS, Atan2, Composite, Const, Kernel, Neg, _binary_kernel, power_kernel,
)

__all__ = ["Tracer", "Instruction", "CodeList", "record", "taylcoeffs", "jacobian_series",
           "finite_difference_jacobian_check"]

_BINARY = ("add", "sub", "mul", "div")


class Instruction(NamedTuple):
    op: str
    args: tuple
    param: object = None


class _Recorder:
    def __init__(self, n):
        self.n = n
        self.constants = []
        self._const_index = {}
        self.instructions = []

    def const(self, c):
        c = float(c)
        key = c.hex()
        if key not in self._const_index:
            self._const_index[key] = len(self.constants)
            self.constants.append(c)
        return -self._const_index[key] - 1

    def ref(self, x):
        if isinstance(x, Tracer):
            if x._rec is not self:
                raise ValueError("tracers from different recordings cannot be mixed")
            return x._ref
        if isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool):
            return self.const(x)
        return None

    def emit(self, op, args, param=None):
        self.instructions.append(Instruction(op, tuple(args), param))
        return Tracer(self, self.n + len(self.instructions) - 1)


def _refuse(name):
    def method(self, *args):
        raise UnsupportedOperation(name)

    method.__name__ = name
    return method


class Tracer:
    """Placeholder scalar that records every operation applied to it."""

    __slots__ = ("_rec", "_ref")
    _is_tracer = True
    _priority = 3

    def __init__(self, rec, ref):
        self._rec = rec
        self._ref = ref

    def __repr__(self):
        return f"Tracer(v{self._ref})"

    def _bin(self, other, op, reflected=False):
        o = self._rec.ref(other)
        if o is None:
            return NotImplemented
        args = (o, self._ref) if reflected else (self._ref, o)
        return self._rec.emit(op, args)

    def __add__(self, o):
        return self._bin(o, "add")

    def __radd__(self, o):
        return self._bin(o, "add", True)

    def __sub__(self, o):
        return self._bin(o, "sub")

    def __rsub__(self, o):
        return self._bin(o, "sub", True)

    def __mul__(self, o):
        return self._bin(o, "mul")

    def __rmul__(self, o):
        return self._bin(o, "mul", True)

    def __truediv__(self, o):
        return self._bin(o, "div")

    def __rtruediv__(self, o):
        return self._bin(o, "div", True)

    def __neg__(self):
        return self._rec.emit("neg", (self._ref,))

    def __pos__(self):
        return self

    def __pow__(self, c):
        if isinstance(c, Tracer):
            from .series import exp, log

            return exp(c * log(self))
        if self._rec.ref(c) is None:
            return NotImplemented
        return self._rec.emit("pow", (self._ref,), float(c))

    def __rpow__(self, base):
        from .series import exp
        from .scalars import elementary

        return exp(self * elementary("log", float(base)))

    def _elementary(self, name, *params):
        return self._rec.emit(name, (self._ref,), params[0] if params else None)

    @staticmethod
    def _atan2_impl(y, x):
        rec = y._rec if isinstance(y, Tracer) else x._rec
        ry, rx = rec.ref(y), rec.ref(x)
        if ry is None or rx is None:
            raise UnsupportedOperation("atan2 with non-numeric operand")
        return rec.emit("atan2", (ry, rx))

    __bool__ = _refuse("bool")
    __lt__ = _refuse("<")
    __le__ = _refuse("<=")
    __gt__ = _refuse(">")
    __ge__ = _refuse(">=")
    __eq__ = _refuse("==")
    __ne__ = _refuse("!=")
    __abs__ = _refuse("abs")
    __float__ = _refuse("float")
    __int__ = _refuse("int")
    __index__ = _refuse("index")
    __round__ = _refuse("round")
    __trunc__ = _refuse("trunc")
    __floor__ = _refuse("floor")
    __ceil__ = _refuse("ceil")
    __mod__ = _refuse("%")
    __floordiv__ = _refuse("//")
    __hash__ = object.__hash__


def _flatten_outputs(out):
    if isinstance(out, (list, tuple)):
        return [leaf for item in out for leaf in _flatten_outputs(item)]
    if isinstance(out, np.ndarray):
        return list(out.ravel())
    return [out]


class CodeList:
    """Recorded straight-line program for a vector field ``f: R^n -> R^n``.

    Immutable after recording; interpretation keeps its scratch state in
    fresh kernel objects, so one CodeList can be shared between threads.
    """

    __slots__ = ("n_inputs", "constants", "instructions", "outputs")

    def __init__(self, n_inputs, constants, instructions, outputs):
        self.n_inputs = n_inputs
        self.constants = tuple(constants)
        self.instructions = tuple(instructions)
        self.outputs = tuple(outputs)
        self._validate()

    def _validate(self):
        n = self.n_inputs
        for idx, ins in enumerate(self.instructions):
            if ins.op not in _BINARY + ("neg", "pow", "atan2") and ins.op not in CATALOG:
                raise ValueError(f"instruction {idx}: unknown opcode {ins.op!r}")
            for a in ins.args:
                if a >= n + idx or -a - 1 >= len(self.constants):
                    raise ValueError(f"instruction {idx} references a later value or missing constant")
        if len(self.outputs) != n:
            raise ShapeMismatch(f"field has {len(self.outputs)} outputs for {n} inputs")

    @property
    def n_values(self):
        return self.n_inputs + len(self.instructions)

    def __repr__(self):
        return (f"CodeList(n_inputs={self.n_inputs}, constants={len(self.constants)}, "
                f"instructions={len(self.instructions)})")

    def _name(self, ref):
        return f"v{ref}" if ref >= 0 else f"c{-ref - 1}"

    def listing(self):
        """Human-readable dump, one instruction per line."""
        lines = [f"# inputs v0..v{self.n_inputs - 1}"]
        for j, c in enumerate(self.constants):
            lines.append(f"# c{j} = {c!r}")
        for idx, ins in enumerate(self.instructions):
            ops = " ".join(self._name(a) for a in ins.args)
            extra = f" [{ins.param!r}]" if ins.param is not None else ""
            lines.append(f"{idx:4d}  v{self.n_inputs + idx:<4d} {ins.op:<8s} {ops}{extra}")
        lines.append("# outputs " + " ".join(self._name(o) for o in self.outputs))
        return "\n".join(lines)

    # interpretation ------------------------------------------------------

    def _build(self, inputs):
        """Kernels (in execution order) and the output coefficient lists."""
        values = list(inputs)
        consts = self.constants
        kernels = []
        pairs = {}

        def operand(ref, pre):
            if ref >= 0:
                return values[ref]
            k = Const(consts[-ref - 1])
            pre.append(k)
            return k.w

        for ins in self.instructions:
            op, args = ins.op, ins.args
            if op in _BINARY:
                a, b = args
                if a < 0:
                    kern = _binary_kernel(op, [consts[-a - 1]], values[b], True, False)
                elif b < 0:
                    kern = _binary_kernel(op, values[a], [consts[-b - 1]], False, True)
                else:
                    kern = _binary_kernel(op, values[a], values[b], False, False)
            elif op == "neg":
                kern = Neg(values[args[0]])
            elif op == "pow":
                kern = power_kernel(values[args[0]], ins.param)
            elif op == "atan2":
                pre = []
                y, x = operand(args[0], pre), operand(args[1], pre)
                kern = Atan2(y, x)
                if pre:
                    kern = Composite(pre + [kern])
            elif op in PAIRS:
                key = (PAIRS[op], args[0])
                cls = CATALOG[op]
                if key in pairs:
                    kern = _View(pairs[key].v[cls.select])
                else:
                    kern = cls(values[args[0]])
                    pairs[key] = kern
            else:
                params = () if ins.param is None else (ins.param,)
                kern = CATALOG[op](values[args[0]], *params)
            kernels.append(kern)
            values.append(kern.w)
        outs = []
        for ref in self.outputs:
            if ref >= 0:
                outs.append(values[ref])
            else:
                k = Const(consts[-ref - 1])
                kernels.append(k)
                outs.append(k.w)
        return kernels, outs

    @staticmethod
    def _pass(kernels, k):
        idx = 0
        try:
            for idx, kern in enumerate(kernels):
                kern.step(k)
        except DomainError as exc:
            raise DomainError(exc.function, exc.value, idx) from None

    def evaluate_series(self, inputs, order):
        """Algebraic mode: output coefficient lists for known input series.

        ``inputs`` is a sequence of ``n`` coefficient sequences of length at
        least ``order + 1``.
        """
        if len(inputs) != self.n_inputs:
            raise ShapeMismatch(f"expected {self.n_inputs} inputs, got {len(inputs)}")
        kernels, outs = self._build([list(u) for u in inputs])
        for k in range(order + 1):
            self._pass(kernels, k)
        return [list(o[:order + 1]) for o in outs]

    def __call__(self, x):
        """Evaluate on a numeric n-vector or on a TaylorArray of shape (n,)."""
        if isinstance(x, TaylorArray):
            if x.shape != (self.n_inputs,):
                raise ShapeMismatch(f"expected shape ({self.n_inputs},), got {x.shape}")
            outs = self.evaluate_series([x.coeffs[:, i].tolist() for i in range(self.n_inputs)],
                                        x.order)
            return TaylorArray(np.array(outs, dtype=x.dtype).T)
        xs = list(x)
        outs = self.evaluate_series([[xi] for xi in xs], 0)
        vals = [o[0] for o in outs]
        return np.array(vals, dtype=object if any(isinstance(v, mpmath.mpf) for v in vals) else float)


class _View(Kernel):
    """Second consumer of a shared sin/cos or sinh/cosh pair kernel."""

    __slots__ = ()

    def __init__(self, w):
        self.w = w

    def step(self, k):
        pass


def record(f, n):
    """Record ``f`` (callable on an n-sequence of scalars) as a CodeList.

    Raises :class:`UnsupportedOperation` if ``f`` branches on, compares,
    or takes ``abs``/``min``/``max`` of a traced value.
    """
    rec = _Recorder(n)
    xs = [Tracer(rec, i) for i in range(n)]
    out = _flatten_outputs(f(xs))
    refs = []
    for item in out:
        r = rec.ref(item)
        if r is None:
            raise UnsupportedOperation(f"field output of type {type(item).__name__}")
        refs.append(r)
    if len(refs) != n:
        raise ShapeMismatch(f"field returned {len(refs)} components for a {n}-dimensional state")
    return CodeList(n, rec.constants, rec.instructions, refs)


def as_codelist(f, n):
    return f if isinstance(f, CodeList) else record(f, n)


def _unit_gradients(x0):
    n = len(x0)
    if any(isinstance(v, mpmath.mpf) for v in x0):
        eye = np.empty((n, n), dtype=object)
        eye[...] = mpmath.mpf(0)
        for i in range(n):
            eye[i, i] = mpmath.mpf(1)
    else:
        eye = np.eye(n)
    return [eye[i].copy() for i in range(n)]


def _check_finite(k, coeffs):
    for c in coeffs:
        if not is_finite(c):
            raise NonFiniteCoefficient(f"solution coefficient {k} overflowed")


def _scalars(x0):
    out = []
    for v in x0:
        if isinstance(v, mpmath.mpf):
            out.append(v)
        else:
            out.append(float(v))
    return out


def taylcoeffs(f, x0, p, want_jacobian=False):
    """Taylor coefficients of the solution of ``x' = f(x), x(0) = x0``.

    Parameters
    ----------
    f : CodeList or callable
        The vector field; callables are recorded first.
    x0 : sequence of float (or mpmath.mpf for extended precision)
    p : int
        Expansion order.
    want_jacobian : bool
        Also return the coefficients of ``J(t) = dx(t)/dx0``.

    Returns
    -------
    x : TaylorArray, shape (n,)
    J : TaylorArray, shape (n, n), or None
        ``J.gettc(k)[i, j] = d x_k[i] / d x0[j]``; ``J.gettc(0)`` is the identity.
    """
    if p < 0:
        raise ValueError(f"order must be nonnegative, got {p}")
    x0 = _scalars(x0)
    n = len(x0)
    code = as_codelist(f, n)
    if want_jacobian:
        grads = _unit_gradients(x0)
        xs = [[Dual(v, g)] for v, g in zip(x0, grads)]
    else:
        xs = [[v] for v in x0]
    _check_finite(0, [value_of(v[0]) for v in xs])
    kernels, outs = code._build(xs)
    for k in range(p):
        code._pass(kernels, k)
        scale = k + 1
        for xi, fi in zip(xs, outs):
            xi.append(fi[k] / scale)
        _check_finite(k + 1, [xi[k + 1] for xi in xs])
    return _split(xs, p, want_jacobian)


def _split(xs, p, want_jacobian):
    n = len(xs)
    vals = [[value_of(xi[k]) for xi in xs] for k in range(p + 1)]
    dtype = object if any(isinstance(v, mpmath.mpf) for v in vals[0]) else np.float64
    x = TaylorArray(np.array(vals, dtype=dtype))
    if not want_jacobian:
        return x, None
    J = np.zeros((p + 1, n, n), dtype=dtype)
    if dtype is object:
        J[...] = mpmath.mpf(0)
    for k in range(p + 1):
        for i, xi in enumerate(xs):
            c = xi[k]
            if isinstance(c, Dual):
                J[k, i, :] = c.g
    return x, TaylorArray(J)


def jacobian_series(f, x):
    """Taylor coefficients ``A_k`` of ``f'(x(t))`` for a given series ``x``.

    Forward mode: the constant terms of the inputs carry unit gradients, so
    the gradient of output coefficient ``k`` is row ``i`` of ``A_k``.
    Returns a TaylorArray of shape (n, n).
    """
    n = x.shape[0]
    code = as_codelist(f, n)
    c = x.coeffs
    x0 = [c[0, i] for i in range(n)]
    grads = _unit_gradients(x0)
    inputs = [[Dual(c[0, i], grads[i])] + c[1:, i].tolist() for i in range(n)]
    outs = code.evaluate_series(inputs, x.order)
    dtype = x.dtype
    A = np.zeros((x.order + 1, n, n), dtype=dtype)
    if dtype == object:
        A[...] = mpmath.mpf(0)
    for i, fi in enumerate(outs):
        for k, ck in enumerate(fi):
            if isinstance(ck, Dual):
                A[k, i, :] = ck.g
    return TaylorArray(A)


def finite_difference_jacobian_check(f, x0, p, tolerance=1e-6):
    """Compare propagated ``dx_k/dx0`` against central differences.

    Step for component ``j``: ``eps**(1/3) * (1 + |x0_j|)``, rounded so that
    ``x0_j + h`` is exact.  The report lists normwise relative discrepancies
    per order; ``detail["abs"]`` holds the per-(k, i, j) absolute differences.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    code = as_codelist(f, n)
    _, J = taylcoeffs(code, x0, p, want_jacobian=True)
    fd = np.zeros((p + 1, n, n))
    base = machine_eps() ** (1.0 / 3.0)
    for j in range(n):
        h = base * (1.0 + abs(x0[j]))
        xp, xm = x0.copy(), x0.copy()
        xp[j] = x0[j] + h
        xm[j] = x0[j] - h
        step = xp[j] - xm[j]
        cp, _ = taylcoeffs(code, xp, p)
        cm, _ = taylcoeffs(code, xm, p)
        fd[:, :, j] = (cp.coeffs - cm.coeffs) / step
    Jc = J.coeffs.astype(float)
    return OracleReport.compare("jacobian-fd", list(Jc), list(fd), tolerance,
                                abs=np.abs(Jc - fd))
