"""Independent references for the Lie-coefficient computations.

* central finite differences on plain float evaluations of the fields,
* a nested oracle that applies ``L_f h = h' f`` literally ``k`` times,
* the first-order definitions of the scalar, vector and covector Lie
  derivatives, evaluated with finite-difference Jacobians,
* an extended-precision run (mpmath) of the very same Lie drivers, used to
  measure how rounding error grows with the order in binary64.
"""

import math

import mpmath
import numpy as np

from .lie import FieldKind, LieResult, lie
from .report import OracleReport
from .scalars import machine_eps

__all__ = [
    "fd_jacobian", "lie_scalar_nested_oracle", "nested_oracle_report",
    "definition_check", "extended_precision_reference", "relative_errors", "error_growth",
]

EPS = machine_eps()


def _eval(func, x):
    return np.asarray(func(x), dtype=float)


def fd_jacobian(func, x, rel_step):
    """Central-difference Jacobian of ``func`` at ``x``.

    Returns an array of shape ``func(x).shape + (n,)``.  The step for
    coordinate ``j`` is ``rel_step * (1 + |x_j|)``, adjusted so that the
    perturbed points are exactly representable.
    """
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        h = rel_step * (1.0 + abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        cols.append((_eval(func, xp) - _eval(func, xm)) / (xp[j] - xm[j]))
    return np.stack(cols, axis=-1)


def _nested(f, h, k, rel_step):
    if k == 0:
        return lambda x: _eval(h, x)
    prev = _nested(f, h, k - 1, rel_step)

    def lk(x):
        return fd_jacobian(prev, x, rel_step) @ _eval(f, x)

    return lk


def lie_scalar_nested_oracle(f, h, x0, kmax):
    """``[L_f^k h(x0) for k in 0..kmax]`` by iterated finite differences.

    Each ``L_f^k`` differentiates ``L_f^{k-1}`` (itself a finite-difference
    approximation) with step ``eps**(1/(2+k)) * (1 + |x_j|)`` at every level.
    Cost grows like ``(2n)^k`` evaluations; intended for ``kmax <= 4``.
    """
    x0 = np.asarray(x0, dtype=float)
    out = [_eval(h, x0)]
    for k in range(1, kmax + 1):
        out.append(_nested(f, h, k, EPS ** (1.0 / (2 + k)))(x0))
    return out


def nested_oracle_report(f, h, x0, result, kmax=3, tolerance=1e-5):
    """Compare ``result`` (a scalar LieResult) with the nested oracle."""
    ref = lie_scalar_nested_oracle(f, h, x0, kmax)
    got = [np.asarray(result.get_derivative(k), dtype=float).reshape(np.shape(ref[k]))
           for k in range(kmax + 1)]
    return OracleReport.compare("nested-fd", got, ref, tolerance)


def definition_check(kind, f, X, x0, result, tolerance=1e-6):
    """First Lie derivative from its definition, with FD Jacobians.

    scalar:   h' f
    vector:   g' f - f' g
    covector: (w' f)^T + w f'
    """
    kind = FieldKind(kind)
    x0 = np.asarray(x0, dtype=float)
    step = EPS ** (1.0 / 3.0)
    fx = _eval(f, x0)
    Xd = fd_jacobian(X, x0, step)
    dX_f = Xd @ fx
    if kind is FieldKind.SCALAR:
        ref = dX_f
    elif kind is FieldKind.VECTOR:
        fd = fd_jacobian(f, x0, step)
        ref = dX_f - fd @ _eval(X, x0)
    else:
        fd = fd_jacobian(f, x0, step)
        ref = dX_f + _eval(X, x0) @ fd
    got = np.asarray(result.get_derivative(1), dtype=float).reshape(ref.shape)
    return OracleReport.compare(f"definition-{kind.value}", [got], [ref], tolerance, orders=[1])


def extended_precision_reference(f, X, x0, p, kind="scalar", dps=40):
    """Run the Lie driver for ``kind`` in ``dps``-digit arithmetic.

    ``x0`` and every binary64 constant in ``f`` and ``X`` enter exactly, so
    the difference from a binary64 run isolates rounding error.
    """
    with mpmath.workdps(dps):
        x0m = [mpmath.mpf(float(v)) if not isinstance(v, mpmath.mpf) else v for v in x0]
        res = lie(kind, f, X, x0m, p)
        # Materialize while the precision context is active.
        return LieResult(res.kind, res.coeffs)


def relative_errors(result, reference):
    """Normwise relative error ``||d_k - r_k|| / ||r_k||`` per order ``k``.

    Errors are measured on the Lie coefficients; the factorial scaling cancels.
    Orders where the reference vanishes report the absolute error.
    """
    errs = []
    for k in range(result.order + 1):
        r = np.asarray(reference.get_tc(k))
        d = np.asarray(result.get_tc(k), dtype=object)
        diff = max((abs(mpmath.mpf(a) - b) for a, b in zip(d.ravel(), r.ravel())), default=0)
        scale = max((abs(b) for b in r.ravel()), default=0)
        errs.append(float(diff / scale) if scale else float(diff))
    return errs


def error_growth(errs, first=1, last=None):
    """Ratio of the error at order ``last`` to the error at ``first``.

    The denominator is floored at machine epsilon so an exactly rounded
    first order does not make the ratio meaningless.
    """
    last = len(errs) - 1 if last is None else last
    return errs[last] / max(errs[first], EPS)


def factorial(k):
    return float(math.factorial(k))
