"""Scalar backends for the coefficient recurrences.

Every recurrence in :mod:`lietaylor.series` is written against plain
``+ - * /``.  The only place a coefficient needs anything else is the seed
``psi(u0)`` of a sub-ODE, which is routed through :func:`elementary`.  That
function dispatches on the coefficient type, so the same kernels run on

* Python / numpy floats (binary64),
* ``mpmath.mpf`` (extended precision reference),
* numpy arrays, float or object dtype (TaylorArray coefficients),
* :class:`Dual` (coefficient plus dense gradient, used for Jacobians).
"""

import math

import mpmath
import numpy as np

__all__ = ["Dual", "elementary", "value_of", "is_finite", "machine_eps", "FUNCTIONS"]


class Dual:
    """A value paired with its dense gradient with respect to the initial state.

    Arithmetic follows the product and quotient rules, so running a Taylor
    recurrence on Duals yields the gradient-augmented recurrence.
    """

    __slots__ = ("v", "g")

    def __init__(self, v, g):
        self.v = v
        self.g = g

    def __repr__(self):
        return f"Dual({self.v!r}, {self.g!r})"

    def __neg__(self):
        return Dual(-self.v, -self.g)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v + other.v, self.g + other.g)
        return Dual(self.v + other, self.g)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v - other.v, self.g - other.g)
        return Dual(self.v - other, self.g)

    def __rsub__(self, other):
        return Dual(other - self.v, -self.g)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v * other.v, self.g * other.v + self.v * other.g)
        return Dual(self.v * other, self.g * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            q = self.v / other.v
            return Dual(q, (self.g - q * other.g) / other.v)
        return Dual(self.v / other, self.g / other)

    def __rtruediv__(self, other):
        q = other / self.v
        return Dual(q, -(q * self.g) / self.v)


def value_of(x):
    """Strip a Dual down to its value; other scalars pass through."""
    return x.v if isinstance(x, Dual) else x


def _nthroot_float(x, n):
    return math.copysign(abs(x) ** (1.0 / n), x)


def _nthroot_mp(x, n):
    r = mpmath.root(abs(x), n)
    return -r if x < 0 else r


_MATH = {
    "exp": math.exp, "log": math.log, "expm1": math.expm1, "log1p": math.log1p,
    "sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "asin": math.asin, "acos": math.acos, "atan": math.atan,
    "sinh": math.sinh, "cosh": math.cosh, "tanh": math.tanh,
    "asinh": math.asinh, "acosh": math.acosh, "atanh": math.atanh,
    "pow": lambda x, c: x ** c, "nthroot": _nthroot_float, "atan2": math.atan2,
}

_MPMATH = {
    "exp": mpmath.exp, "log": mpmath.log, "expm1": mpmath.expm1, "log1p": mpmath.log1p,
    "sqrt": mpmath.sqrt, "sin": mpmath.sin, "cos": mpmath.cos, "tan": mpmath.tan,
    "asin": mpmath.asin, "acos": mpmath.acos, "atan": mpmath.atan,
    "sinh": mpmath.sinh, "cosh": mpmath.cosh, "tanh": mpmath.tanh,
    "asinh": mpmath.asinh, "acosh": mpmath.acosh, "atanh": mpmath.atanh,
    "pow": mpmath.power, "nthroot": _nthroot_mp, "atan2": mpmath.atan2,
}


def _math_elementwise(fn, *arrays):
    # libm per element, so array and scalar evaluations round identically.
    return np.vectorize(fn, otypes=[np.float64])(*arrays)


FUNCTIONS = frozenset(_MATH)


def _dual_rule(name, x, params):
    a = x.v
    g = x.g
    f = lambda nm, *args: elementary(nm, *args)  # noqa: E731
    if name == "exp":
        e = f("exp", a)
        return Dual(e, e * g)
    if name == "expm1":
        return Dual(f("expm1", a), f("exp", a) * g)
    if name == "log":
        return Dual(f("log", a), g / a)
    if name == "log1p":
        return Dual(f("log1p", a), g / (1 + a))
    if name == "sqrt":
        s = f("sqrt", a)
        return Dual(s, g / (2 * s))
    if name == "pow":
        (c,) = params
        return Dual(f("pow", a, c), c * f("pow", a, c - 1) * g)
    if name == "nthroot":
        (n,) = params
        r = f("nthroot", a, n)
        return Dual(r, r / (n * a) * g)
    if name == "sin":
        return Dual(f("sin", a), f("cos", a) * g)
    if name == "cos":
        return Dual(f("cos", a), -f("sin", a) * g)
    if name == "tan":
        t = f("tan", a)
        return Dual(t, (1 + t * t) * g)
    if name == "asin":
        return Dual(f("asin", a), g / f("sqrt", 1 - a * a))
    if name == "acos":
        return Dual(f("acos", a), -g / f("sqrt", 1 - a * a))
    if name == "atan":
        return Dual(f("atan", a), g / (1 + a * a))
    if name == "sinh":
        return Dual(f("sinh", a), f("cosh", a) * g)
    if name == "cosh":
        return Dual(f("cosh", a), f("sinh", a) * g)
    if name == "tanh":
        t = f("tanh", a)
        return Dual(t, (1 - t * t) * g)
    if name == "asinh":
        return Dual(f("asinh", a), g / f("sqrt", 1 + a * a))
    if name == "acosh":
        return Dual(f("acosh", a), g / f("sqrt", a * a - 1))
    if name == "atanh":
        return Dual(f("atanh", a), g / (1 - a * a))
    raise KeyError(name)


def _dual_atan2(y, x):
    yv, xv = value_of(y), value_of(x)
    r2 = xv * xv + yv * yv
    grad = 0
    if isinstance(y, Dual):
        grad = grad + (xv / r2) * y.g
    if isinstance(x, Dual):
        grad = grad - (yv / r2) * x.g
    return Dual(elementary("atan2", yv, xv), grad)


def elementary(name, x, *params):
    """Evaluate elementary function ``name`` on a single coefficient.

    ``atan2`` takes the second argument in ``params``.
    """
    if name == "atan2":
        (xx,) = params
        y = x
        if isinstance(y, Dual) or isinstance(xx, Dual):
            return _dual_atan2(y, xx)
        if isinstance(y, np.ndarray) or isinstance(xx, np.ndarray):
            y, xx = np.broadcast_arrays(np.asarray(y), np.asarray(xx))
            if y.dtype == object or xx.dtype == object:
                return np.frompyfunc(lambda a, b: elementary("atan2", a, b), 2, 1)(y, xx)
            return _math_elementwise(math.atan2, y, xx)
        if isinstance(y, mpmath.mpf) or isinstance(xx, mpmath.mpf):
            return mpmath.atan2(y, xx)
        if hasattr(y, "__elementary__"):
            return y.__elementary__(name, xx)
        return math.atan2(y, xx)
    if isinstance(x, (float, int)):
        return _MATH[name](x, *params)
    if isinstance(x, Dual):
        return _dual_rule(name, x, params)
    if isinstance(x, np.ndarray):
        if x.dtype == object:
            return np.frompyfunc(lambda e: elementary(name, e, *params), 1, 1)(x)
        return _math_elementwise(lambda e: _MATH[name](float(e), *params), x)
    if isinstance(x, mpmath.mpf):
        return _MPMATH[name](x, *params)
    if hasattr(x, "__elementary__"):
        return x.__elementary__(name, *params)
    raise TypeError(f"no elementary-function backend for {type(x).__name__}")


def is_finite(x):
    """True when every component of ``x`` (value and gradient) is finite."""
    if isinstance(x, Dual):
        return is_finite(x.v) and bool(np.all([is_finite(e) for e in np.ravel(x.g)]))
    if isinstance(x, (float, int)):
        return math.isfinite(x)
    if isinstance(x, mpmath.mpf):
        return bool(mpmath.isfinite(x))
    if isinstance(x, np.ndarray):
        if x.dtype == object:
            return all(is_finite(e) for e in x.ravel())
        return bool(np.all(np.isfinite(x)))
    return True


def machine_eps(x=None):
    """Unit roundoff spacing at 1.0 for the scalar type of ``x``."""
    x = value_of(x)
    if isinstance(x, np.ndarray) and x.dtype == object and x.size:
        x = x.flat[0]
    if isinstance(x, mpmath.mpf):
        return mpmath.mp.eps
    return np.finfo(np.float64).eps
