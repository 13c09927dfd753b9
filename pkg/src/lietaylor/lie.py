"""Lie coefficients ``(1/k!) L_f^k X(x0)`` from Taylor coefficients.

With ``x(t)`` the flow of ``f`` through ``x0`` and ``J(t) = dx(t)/dx0``:

* scalar fields:   coefficients of ``h(x(t))``
* vector fields:   coefficients of ``J(t)^{-1} g(x(t))`` (iterated brackets)
* covector fields: coefficients of ``w(x(t)) J(t)``

Fields are plain callables evaluated directly in series arithmetic; only
``f`` is recorded on a code list.  Stacked families (arrays of scalar fields,
``n x m`` vector fields, ``m x n`` covector fields) go through the same code.

``lie_vector_zrec`` and ``lie_covector_jrec`` recompute the vector and
covector cases from the coefficients ``A_k`` of ``f'(x(t))`` with the
recurrences for ``Z = J^{-1}`` and ``J``; they exist as cross-checks.
"""

import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .array import TaylorArray, matmul, solve
from .errors import ShapeError, SingularConstantTerm
from .series import TaylorScalar
from .tape import as_codelist, jacobian_series, taylcoeffs

__all__ = ["FieldKind", "LieResult", "lie_scalar", "lie_vector", "lie_covector",
           "lie_vector_zrec", "lie_covector_jrec", "z_series", "j_series_recurrence", "lie"]


class FieldKind(enum.Enum):
    SCALAR = "scalar"
    VECTOR = "vector"
    COVECTOR = "covector"


@dataclass(frozen=True)
class LieResult:
    """Lie coefficients of a field (or family) along ``f`` at ``x0``.

    ``coeffs.gettc(k)`` has the field's shape and equals ``(1/k!) L_f^k X(x0)``.
    """

    kind: FieldKind
    coeffs: TaylorArray

    @property
    def order(self):
        return self.coeffs.order

    @property
    def shape(self):
        return self.coeffs.shape

    def get_tc(self, k):
        return self.coeffs.gettc(k)

    def get_derivative(self, k):
        """``L_f^k X(x0) = k! * get_tc(k)`` (factorial in binary64)."""
        return self.coeffs.gettc(k) * float(math.factorial(k))

    def tcs(self):
        return [self.get_tc(k) for k in range(self.order + 1)]

    def derivatives(self):
        return [self.get_derivative(k) for k in range(self.order + 1)]


def _state(x0):
    vals = [v if isinstance(v, mpmath.mpf) else float(v) for v in x0]
    if any(isinstance(v, mpmath.mpf) for v in vals):
        return np.array(vals, dtype=object)
    return np.array(vals, dtype=float)


def _as_series(value, order):
    """Coerce a field value to a TaylorArray of the given order."""
    if isinstance(value, TaylorArray):
        arr = value
    elif isinstance(value, TaylorScalar):
        arr = TaylorArray(np.array(value.coeffs, dtype=object if value.coeffs and
                                   isinstance(value.coeffs[0], mpmath.mpf) else float))
    else:
        arr = TaylorArray.constant(np.asarray(value))
    if arr.order == order:
        return arr
    if arr.order == 0:
        c = np.zeros((order + 1,) + arr.shape, dtype=arr.dtype)
        if arr.dtype == object:
            c[...] = 0.0
        c[0] = arr.coeffs[0]
        return TaylorArray(c)
    raise ShapeError(f"field returned order {arr.order}, expected {order}")


def _field_shape(X, x0):
    return np.shape(np.asarray(_direct(X, x0)))


def _direct(X, x0):
    val = X(x0)
    if isinstance(val, (TaylorArray, TaylorScalar)):
        raise ShapeError("field evaluated on numbers returned a series")
    return val


def _check_kind(kind, shape, n):
    if kind is FieldKind.VECTOR and (len(shape) not in (1, 2) or shape[0] != n):
        raise ShapeError(f"vector field must have {n} rows, got shape {shape}")
    if kind is FieldKind.COVECTOR and (len(shape) not in (1, 2) or shape[-1] != n):
        raise ShapeError(f"covector field must have {n} columns, got shape {shape}")


def _field_on(X, x, kind, n, x0):
    value = _as_series(X(x), x.order)
    expected = _field_shape(X, x0)
    if value.shape != expected:
        raise ShapeError(f"field shape {value.shape} on series differs from {expected} on numbers")
    _check_kind(kind, value.shape, n)
    return value


def lie_scalar(f, h, x0, p):
    """Lie coefficients of the scalar field (or array of fields) ``h``."""
    x0 = _state(x0)
    n = x0.size
    x, _ = taylcoeffs(as_codelist(f, n), x0, p)
    return LieResult(FieldKind.SCALAR, _field_on(h, x, FieldKind.SCALAR, n, x0))


def lie_vector(f, g, x0, p):
    """Iterated Lie brackets ``(1/k!) ad_f^k g(x0)``; ``g`` is n or n x m."""
    x0 = _state(x0)
    n = x0.size
    x, J = taylcoeffs(as_codelist(f, n), x0, p, want_jacobian=True)
    G = _field_on(g, x, FieldKind.VECTOR, n, x0)
    try:
        L = solve(J, G)
    except SingularConstantTerm as exc:  # J(0) = I, so this is a bug
        raise RuntimeError("variational matrix has a singular constant term") from exc
    return LieResult(FieldKind.VECTOR, L)


def lie_covector(f, w, x0, p):
    """Lie coefficients of the covector field ``w`` (row n, or m x n)."""
    x0 = _state(x0)
    n = x0.size
    x, J = taylcoeffs(as_codelist(f, n), x0, p, want_jacobian=True)
    W = _field_on(w, x, FieldKind.COVECTOR, n, x0)
    return LieResult(FieldKind.COVECTOR, matmul(W, J))


def lie(kind, f, X, x0, p):
    """Dispatch on ``kind`` (a FieldKind or its string value)."""
    kind = FieldKind(kind)
    return {FieldKind.SCALAR: lie_scalar, FieldKind.VECTOR: lie_vector,
            FieldKind.COVECTOR: lie_covector}[kind](f, X, x0, p)


# ---------------------------------------------------------------------------
# cross-check recurrences on the Jacobian coefficients A_k of f'(x(t))


def _flow_and_jacobian_coeffs(f, x0, p):
    n = x0.size
    code = as_codelist(f, n)
    x, _ = taylcoeffs(code, x0, p)
    A = jacobian_series(code, x)
    return code, x, [A.coeffs[k] for k in range(p + 1)]


def _identity_like(A0):
    n = A0.shape[0]
    if A0.dtype == object:
        eye = np.empty((n, n), dtype=object)
        eye[...] = mpmath.mpf(0)
        for i in range(n):
            eye[i, i] = mpmath.mpf(1)
        return eye
    return np.eye(n)


def _z_coeffs(A, p):
    Z = [_identity_like(A[0])]
    for k in range(p):
        acc = Z[0] @ A[k]
        for i in range(1, k + 1):
            acc = acc + Z[i] @ A[k - i]
        Z.append(-acc / (k + 1))
    return Z


def _j_coeffs(A, p):
    J = [_identity_like(A[0])]
    for k in range(p):
        acc = A[k] @ J[0]
        for i in range(1, k + 1):
            acc = acc + A[k - i] @ J[i]
        J.append(acc / (k + 1))
    return J


def z_series(f, x0, p):
    """Coefficients of ``Z(t) = J(t)^{-1}`` from ``Z' = -Z f'(x(t))``."""
    _, _, A = _flow_and_jacobian_coeffs(f, _state(x0), p)
    return TaylorArray(np.stack(_z_coeffs(A, p)))


def j_series_recurrence(f, x0, p):
    """Coefficients of ``J(t)`` from ``J' = f'(x(t)) J`` with forward-mode ``A_k``."""
    _, _, A = _flow_and_jacobian_coeffs(f, _state(x0), p)
    return TaylorArray(np.stack(_j_coeffs(A, p)))


def _column_coeffs(G):
    c = [G.coeffs[k] for k in range(G.order + 1)]
    if G.ndim == 1:
        c = [ck.reshape(-1, 1) for ck in c]
    return c


def lie_vector_zrec(f, g, x0, p):
    """Vector-field Lie coefficients as coefficients of ``Z(t) g(x(t))``."""
    x0 = _state(x0)
    n = x0.size
    code, x, A = _flow_and_jacobian_coeffs(f, x0, p)
    G = _field_on(g, x, FieldKind.VECTOR, n, x0)
    Z = _z_coeffs(A, p)
    gk = _column_coeffs(G)
    out = []
    for k in range(p + 1):
        acc = Z[0] @ gk[k]
        for i in range(1, k + 1):
            acc = acc + Z[i] @ gk[k - i]
        out.append(acc.reshape(G.shape))
    return LieResult(FieldKind.VECTOR, TaylorArray(np.stack(out)))


def lie_covector_jrec(f, w, x0, p):
    """Covector-field Lie coefficients as coefficients of ``w(x(t)) J(t)``
    with ``J`` from its own recurrence."""
    x0 = _state(x0)
    n = x0.size
    code, x, A = _flow_and_jacobian_coeffs(f, x0, p)
    W = _field_on(w, x, FieldKind.COVECTOR, n, x0)
    J = _j_coeffs(A, p)
    wk = [W.coeffs[k] for k in range(p + 1)]
    if W.ndim == 1:
        wk = [c.reshape(1, -1) for c in wk]
    out = []
    for k in range(p + 1):
        acc = wk[0] @ J[k]
        for i in range(1, k + 1):
            acc = acc + wk[i] @ J[k - i]
        out.append(acc.reshape(W.shape))
    return LieResult(FieldKind.COVECTOR, TaylorArray(np.stack(out)))
