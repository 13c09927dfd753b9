"""Running-error magnitudes for series identities.

``Mag`` carries a value together with a magnitude that bounds the sum of the
absolute values of everything that went into it.  Fed through the same
coefficient kernels, the magnitude is the natural scale for rounding error:
a computation with ``m`` rounding steps is off by at most about
``m * eps * magnitude``.
"""

import sys

from lietaylor.scalars import Dual, elementary


class Mag:
    __slots__ = ("v", "m")

    def __init__(self, v, m=None):
        self.v = float(v)
        self.m = abs(self.v) if m is None else m

    @staticmethod
    def lift(x):
        return x if isinstance(x, Mag) else Mag(x)

    def __add__(self, o):
        o = Mag.lift(o)
        return Mag(self.v + o.v, self.m + o.m)

    __radd__ = __add__

    def __sub__(self, o):
        o = Mag.lift(o)
        return Mag(self.v - o.v, self.m + o.m)

    def __rsub__(self, o):
        return Mag.lift(o) - self

    def __mul__(self, o):
        o = Mag.lift(o)
        return Mag(self.v * o.v, self.m * o.m)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = Mag.lift(o)
        return Mag(self.v / o.v, self.m / abs(o.v))

    def __rtruediv__(self, o):
        return Mag.lift(o) / self

    def __neg__(self):
        return Mag(-self.v, self.m)

    def __pos__(self):
        return self

    def __eq__(self, o):
        return self.v == Mag.lift(o).v

    def __lt__(self, o):
        return self.v < Mag.lift(o).v

    def __le__(self, o):
        return self.v <= Mag.lift(o).v

    def __gt__(self, o):
        return self.v > Mag.lift(o).v

    def __ge__(self, o):
        return self.v >= Mag.lift(o).v

    __hash__ = None

    def __abs__(self):
        return Mag(abs(self.v), self.m)

    def __float__(self):
        return self.v

    def __elementary__(self, name, *params):
        d = elementary(name, Dual(self.v, 1.0), *params)
        return Mag(d.v, abs(d.v) + abs(d.g) * self.m)


def split(series):
    """``(values, magnitudes)`` of a series with Mag coefficients."""
    return [float(c) for c in series.coeffs], [Mag.lift(c).m for c in series.coeffs]


def ulp_ratio(lhs, rhs):
    """Largest ``|lhs_k - rhs_k| / (eps * scale_k + eta)`` over the coefficients.

    ``eta`` (the smallest normal double) absorbs underflow, where rounding
    error is absolute rather than relative.
    """
    lv, lm = split(lhs)
    rv, rm = split(rhs)
    eps = 2.0 ** -52
    eta = sys.float_info.min
    return max((abs(a - b) / (eps * max(ma, mb) + eta)
                for a, b, ma, mb in zip(lv, rv, lm, rm)), default=0.0)
