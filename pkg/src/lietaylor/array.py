"""N-dimensional arrays of truncated Taylor series.

A :class:`TaylorArray` of shape ``s`` and order ``p`` stores its
coefficients as one numpy array of shape ``(p + 1,) + s``; ``gettc(k)`` is a
plain slice.  Elementwise arithmetic reuses the kernels from
:mod:`lietaylor.series` with whole coefficient arrays as the "scalars", so a
stacked family is computed with exactly the operations of its members.

Matrix products and the series linear solve accumulate dot products in a
fixed order (coefficient index, then inner index) with elementwise numpy
operations only, so results do not depend on how many rows or columns are
stacked together.
"""

import math
from numbers import Real

import mpmath
import numpy as np

from .errors import IndexOutOfBounds, NonFiniteCoefficient, ShapeMismatch, SingularConstantTerm
from .scalars import is_finite, machine_eps
from .series import (
    Atan2, Neg, TaylorScalar, _binary_kernel, function_kernel, result_order, run,
)

__all__ = ["TaylorArray", "tarray", "concat", "stack", "matmul", "solve", "lu_factor", "lu_solve"]


def _dtype_of(values):
    for v in values:
        if isinstance(v, np.ndarray):
            if v.dtype == object:
                return object
        elif isinstance(v, mpmath.mpf):
            return object
    return np.float64


def _assemble(coeffs, shape):
    dtype = _dtype_of(coeffs)
    return np.stack([np.broadcast_to(np.asarray(c, dtype=dtype), shape) for c in coeffs])


class TaylorArray:
    """Array of Taylor series that all share one order.

    Parameters
    ----------
    coeffs : array_like, shape (p + 1, *shape)
        ``coeffs[k]`` holds the k-th Taylor coefficient of every element.
    """

    __slots__ = ("_c",)
    __array_ufunc__ = None

    def __init__(self, coeffs):
        c = np.asarray(coeffs)
        if c.dtype != object:
            c = c.astype(np.float64, copy=True)
        else:
            c = c.copy()
        if c.ndim == 0 or c.shape[0] == 0:
            raise ValueError("coefficient array needs a leading order axis of length >= 1")
        if not is_finite(c):
            raise NonFiniteCoefficient("TaylorArray has non-finite coefficients")
        c.flags.writeable = False
        self._c = c

    # construction --------------------------------------------------------

    @classmethod
    def constant(cls, values, order=0):
        v = np.asarray(values)
        dtype = object if v.dtype == object else np.float64
        c = np.zeros((order + 1,) + v.shape, dtype=dtype)
        if dtype is object:
            c[...] = 0.0
        c[0] = v
        return cls(c)

    @classmethod
    def variable(cls, x0, order):
        """Independent variables ``x0 + t`` (elementwise)."""
        v = np.asarray(x0)
        c = np.zeros((order + 1,) + v.shape, dtype=object if v.dtype == object else np.float64)
        if c.dtype == object:
            c[...] = 0.0
        c[0] = v
        if order:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def identity(cls, n, order=0):
        return cls.constant(np.eye(n), order)

    # metadata -----------------------------------------------------------

    @property
    def order(self):
        return self._c.shape[0] - 1

    @property
    def shape(self):
        return self._c.shape[1:]

    @property
    def ndim(self):
        return self._c.ndim - 1

    @property
    def size(self):
        return math.prod(self.shape)

    @property
    def dtype(self):
        return self._c.dtype

    @property
    def coeffs(self):
        """Read-only coefficient array of shape ``(p + 1,) + shape``."""
        return self._c

    def gettc(self, k):
        """Coefficient array ``k`` (a copy, same shape as the TaylorArray)."""
        return self._c[k].copy()

    def derivatives(self):
        """Array of ``k! * coeffs[k]``; factorials in binary64 (exact to k = 18)."""
        fact = np.array([float(math.factorial(k)) for k in range(self.order + 1)])
        return self._c * fact.reshape((-1,) + (1,) * self.ndim)

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot truncate order {self.order} array to order {order}")
        return TaylorArray(self._c[:order + 1])

    def __len__(self):
        if not self.shape:
            raise TypeError("len() of a 0-d TaylorArray")
        return self.shape[0]

    def __repr__(self):
        return f"TaylorArray(shape={self.shape}, order={self.order})"

    def tolist(self):
        """Nested list of TaylorScalars."""
        flat = [TaylorScalar(self._c[(slice(None),) + idx].tolist())
                for idx in np.ndindex(*self.shape)] if self.shape else [self._scalar(())]
        if not self.shape:
            return flat[0]
        return np.array(flat, dtype=object).reshape(self.shape).tolist()

    def _scalar(self, idx):
        return TaylorScalar(self._c[(slice(None),) + idx].tolist())

    # structure ops ------------------------------------------------------

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        try:
            sub = self._c[(slice(None),) + idx]
        except IndexError as exc:
            raise IndexOutOfBounds(str(exc)) from None
        if sub.ndim == 1:
            return TaylorScalar(sub.tolist())
        return TaylorArray(sub)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        try:
            return TaylorArray(self._c.reshape((self.order + 1,) + tuple(shape)))
        except ValueError as exc:
            raise ShapeMismatch(str(exc)) from None

    def ravel(self):
        return self.reshape(self.size)

    def transpose(self, axes=None):
        if axes is None:
            axes = tuple(range(self.ndim))[::-1]
        if sorted(axes) != list(range(self.ndim)):
            raise ShapeMismatch(f"invalid axes {axes} for ndim {self.ndim}")
        return TaylorArray(self._c.transpose((0,) + tuple(a + 1 for a in axes)))

    @property
    def T(self):
        return self.transpose()

    # arithmetic ---------------------------------------------------------

    def _lists(self):
        return [self._c[k] for k in range(self.order + 1)]

    def _binary(self, other, op, reflected=False):
        ob = _operand(other)
        if ob is None:
            return NotImplemented
        olists, oshape = ob
        a, b = (olists, self._lists()) if reflected else (self._lists(), olists)
        sa, sb = (oshape, self.shape) if reflected else (self.shape, oshape)
        try:
            shape = np.broadcast_shapes(sa, sb)
        except ValueError:
            raise ShapeMismatch(f"shapes {sa} and {sb} do not broadcast") from None
        p = result_order(len(a) - 1, len(b) - 1)
        k = _binary_kernel(op, a, b, len(a) == 1 and p > 0, len(b) == 1 and p > 0)
        return TaylorArray(_assemble(run(k, p), shape))

    def __add__(self, o):
        return self._binary(o, "add")

    def __radd__(self, o):
        return self._binary(o, "add", True)

    def __sub__(self, o):
        return self._binary(o, "sub")

    def __rsub__(self, o):
        return self._binary(o, "sub", True)

    def __mul__(self, o):
        return self._binary(o, "mul")

    def __rmul__(self, o):
        return self._binary(o, "mul", True)

    def __truediv__(self, o):
        return self._binary(o, "div")

    def __rtruediv__(self, o):
        return self._binary(o, "div", True)

    def __neg__(self):
        return TaylorArray(_assemble(run(Neg(self._lists()), self.order), self.shape))

    def __pos__(self):
        return self

    def __pow__(self, c):
        if isinstance(c, (TaylorArray, TaylorScalar)):
            from .series import exp, log

            return exp(c * log(self))
        return self._elementary("pow", c)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def _elementary(self, name, *params):
        return TaylorArray(_assemble(run(function_kernel(name, self._lists(), *params), self.order),
                                     self.shape))

    _priority = 2

    @staticmethod
    def _atan2_impl(y, x):
        yl, ys = _operand(y)
        xl, xs = _operand(x)
        try:
            shape = np.broadcast_shapes(ys, xs)
        except ValueError:
            raise ShapeMismatch(f"shapes {ys} and {xs} do not broadcast") from None
        p = result_order(len(yl) - 1, len(xl) - 1)
        yl = list(yl) + [0.0] * (p + 1 - len(yl))
        xl = list(xl) + [0.0] * (p + 1 - len(xl))
        return TaylorArray(_assemble(run(Atan2(yl, xl), p), shape))


def _operand(x):
    """Coefficient lists and element shape of an arithmetic operand."""
    if isinstance(x, TaylorArray):
        return x._lists(), x.shape
    if isinstance(x, TaylorScalar):
        return list(x.coeffs), ()
    if isinstance(x, (Real, mpmath.mpf)):
        return [x], ()
    if isinstance(x, np.ndarray):
        if x.dtype != object:
            x = x.astype(np.float64)
        return [x], x.shape
    return None


# --------------------------------------------------------------------------
# construction helpers


def _flatten(nested):
    if isinstance(nested, (list, tuple)):
        items = [_flatten(e) for e in nested]
        shapes = {s for _, s in items}
        if len(shapes) > 1:
            raise ShapeMismatch(f"ragged nested sequence with sub-shapes {sorted(shapes)}")
        inner = shapes.pop() if shapes else ()
        leaves = [leaf for lv, _ in items for leaf in lv]
        return leaves, (len(nested),) + inner
    if isinstance(nested, np.ndarray) and nested.dtype != object:
        return list(nested.ravel()), nested.shape
    if isinstance(nested, TaylorArray):
        return nested.ravel().tolist(), nested.shape
    return [nested], ()


def tarray(nested):
    """Build an array from nested sequences of series and numbers.

    Returns a :class:`TaylorArray` when any leaf is a series (numbers are
    promoted to constant series of the common order), a float/object numpy
    array when every leaf is a number, and the nested sequence unchanged when
    it holds code-list tracers (so fields can be recorded).
    """
    leaves, shape = _flatten(nested)
    if any(getattr(leaf, "_is_tracer", False) for leaf in leaves):
        return nested
    series = [leaf for leaf in leaves if isinstance(leaf, TaylorScalar)]
    if not series:
        arr = np.empty(len(leaves), dtype=_dtype_of(leaves))
        arr[:] = leaves
        return arr.reshape(shape)
    p = 0
    for s in series:
        p = result_order(p, s.order) if p else s.order
    cols = []
    for leaf in leaves:
        if isinstance(leaf, TaylorScalar):
            c = list(leaf.coeffs)
            if len(c) == 1 and p > 0:
                c += [0.0] * p
            elif len(c) != p + 1:
                result_order(p, len(c) - 1)
        else:
            c = [leaf] + [0.0] * p
        cols.append(c)
    dtype = _dtype_of([x for col in cols for x in col])
    data = np.empty((p + 1, len(leaves)), dtype=dtype)
    for j, col in enumerate(cols):
        data[:, j] = col
    return TaylorArray(data.reshape((p + 1,) + shape))


def _as_array(x):
    if isinstance(x, TaylorArray):
        return x
    if isinstance(x, TaylorScalar):
        return TaylorArray(np.asarray(x.coeffs, dtype=_dtype_of(x.coeffs)))
    return TaylorArray.constant(np.asarray(x))


def _common_order(arrays):
    p = 0
    for a in arrays:
        p = result_order(p, a.order) if p else a.order
    return p


def _padded(a, p):
    if a.order == p:
        return a._c
    c = np.zeros((p + 1,) + a.shape, dtype=a.dtype)
    if a.dtype == object:
        c[...] = 0.0
    c[0] = a._c[0]
    return c


def concat(arrays, axis=0):
    """Concatenate arrays along an existing ``axis``."""
    arrays = [_as_array(a) for a in arrays]
    p = _common_order(arrays)
    try:
        return TaylorArray(np.concatenate([_padded(a, p) for a in arrays], axis=axis + 1))
    except (ValueError, np.exceptions.AxisError) as exc:
        raise ShapeMismatch(str(exc)) from None


def stack(arrays, axis=0):
    """Stack same-shape arrays or series along a new ``axis``."""
    arrays = [_as_array(a) for a in arrays]
    p = _common_order(arrays)
    try:
        return TaylorArray(np.stack([_padded(a, p) for a in arrays], axis=axis + 1))
    except (ValueError, np.exceptions.AxisError) as exc:
        raise ShapeMismatch(str(exc)) from None


# --------------------------------------------------------------------------
# matrix product and linear solve


def _as_matrix_lists(x):
    x = _as_array(x)
    return [x._c[k] for k in range(x.order + 1)], x.shape


def _accumulate(acc, A, X):
    """``acc + A @ X`` summed as rank-1 updates in inner-index order."""
    for r in range(A.shape[1]):
        term = A[:, r:r + 1] * X[r:r + 1, :]
        acc = term if acc is None else acc + term
    return acc


def matmul(A, B):
    """Truncated Taylor expansion of the matrix product ``A(t) B(t)``.

    1-D operands are treated as a row (left) or column (right) and the unit
    axis is dropped from the result, as in numpy.
    """
    al, ash = _as_matrix_lists(A)
    bl, bsh = _as_matrix_lists(B)
    if len(ash) not in (1, 2) or len(bsh) not in (1, 2):
        raise ShapeMismatch(f"matmul needs 1-D or 2-D operands, got {ash} and {bsh}")
    a_vec, b_vec = len(ash) == 1, len(bsh) == 1
    if a_vec:
        al = [a.reshape(1, -1) for a in al]
    if b_vec:
        bl = [b.reshape(-1, 1) for b in bl]
    m, r = al[0].shape
    r2, n = bl[0].shape
    if r != r2:
        raise ShapeMismatch(f"inner dimensions differ: {ash} @ {bsh}")
    p = result_order(len(al) - 1, len(bl) - 1)
    dtype = _dtype_of([al[0], bl[0]])
    out = []
    for k in range(p + 1):
        acc = None
        for i in range(k + 1):
            if i < len(al) and k - i < len(bl):
                acc = _accumulate(acc, al[i], bl[k - i])
        if acc is None:
            acc = np.zeros((m, n), dtype=dtype)
            if dtype is object:
                acc[...] = 0.0
        out.append(acc)
    res = np.stack(out)
    if a_vec and b_vec:
        res = res.reshape(p + 1)
    elif a_vec:
        res = res.reshape(p + 1, n)
    elif b_vec:
        res = res.reshape(p + 1, m)
    return TaylorArray(res)


def lu_factor(A0):
    """LU factorization with partial pivoting, generic over the scalar type.

    Returns ``(LU, piv)`` with the unit-lower and upper factors packed in
    ``LU`` and ``piv`` the row permutation.  A pivot of magnitude at most
    ``n * eps * max|A0|`` raises :class:`SingularConstantTerm`.
    """
    LU = np.array(A0, copy=True)
    if LU.ndim != 2 or LU.shape[0] != LU.shape[1]:
        raise ShapeMismatch(f"constant-term matrix must be square, got {LU.shape}")
    n = LU.shape[0]
    piv = list(range(n))
    scale = max((abs(e) for e in LU.ravel()), default=0)
    tol = n * machine_eps(LU.ravel()[0] if n else None) * scale
    for col in range(n):
        prow = max(range(col, n), key=lambda i: abs(LU[i, col]))
        if abs(LU[prow, col]) <= tol:
            raise SingularConstantTerm(f"pivot {col} is below {tol!r}; constant term is singular")
        if prow != col:
            LU[[col, prow]] = LU[[prow, col]]
            piv[col], piv[prow] = piv[prow], piv[col]
        for i in range(col + 1, n):
            LU[i, col] = LU[i, col] / LU[col, col]
            LU[i, col + 1:] = LU[i, col + 1:] - LU[i, col] * LU[col, col + 1:]
    return LU, piv


def lu_solve(LU, piv, B):
    """Solve ``A0 X = B`` for 2-D ``B`` using :func:`lu_factor` output."""
    n = LU.shape[0]
    y = np.array(B[piv], copy=True)
    for i in range(n):
        for j in range(i):
            y[i] = y[i] - LU[i, j] * y[j]
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            y[i] = y[i] - LU[i, j] * y[j]
        y[i] = y[i] / LU[i, i]
    return y


def solve(A, B):
    """Series ``X(t)`` with ``A(t) X(t) = B(t)`` to the common order.

    ``A`` must be square with a nonsingular constant term; ``A_0`` is
    factorized once and each coefficient follows from
    ``X_k = A_0^{-1} (B_k - sum_{i=1..k} A_i X_{k-i})``.
    """
    al, ash = _as_matrix_lists(A)
    bl, bsh = _as_matrix_lists(B)
    if len(ash) != 2 or ash[0] != ash[1]:
        raise ShapeMismatch(f"solve needs a square matrix, got {ash}")
    if len(bsh) not in (1, 2) or bsh[0] != ash[0]:
        raise ShapeMismatch(f"right-hand side {bsh} does not match {ash}")
    b_vec = len(bsh) == 1
    if b_vec:
        bl = [b.reshape(-1, 1) for b in bl]
    p = result_order(len(al) - 1, len(bl) - 1)
    LU, piv = lu_factor(al[0])
    xs = []
    for k in range(p + 1):
        rhs = bl[k] if k < len(bl) else None
        acc = None
        for i in range(1, min(k, len(al) - 1) + 1):
            acc = _accumulate(acc, al[i], xs[k - i])
        if rhs is None:
            rhs = -acc
        elif acc is not None:
            rhs = rhs - acc
        xs.append(lu_solve(LU, piv, rhs))
    res = np.stack(xs)
    if b_vec:
        res = res.reshape(p + 1, bsh[0])
    return TaylorArray(res)
