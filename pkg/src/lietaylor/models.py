"""Benchmark systems.

Each model bundles a drift field ``f``, an input field ``g`` (n x 1), an
output map ``h`` and its differential ``dh`` (a covector family).  All field
functions take a state ``x`` that may be a float sequence, a TaylorArray of
shape (n,), or a list of code-list tracers, and use only the arithmetic and
catalog functions from :mod:`lietaylor.series`.
"""

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .array import tarray
from .series import cos, sin

__all__ = ["GantryParams", "Model", "gantry_f", "gantry_g", "gantry_h", "gantry_dh",
           "linear_model", "get_model", "MODELS", "GANTRY_X0"]

GANTRY_X0 = (1.0, 0.2, -0.5, -0.4)


@dataclass(frozen=True)
class GantryParams:
    """Cart mass ``M``, load mass ``m``, cable length ``ell``, gravity ``G``."""

    M: float = 1.0
    m: float = 1.0
    ell: float = 1.0
    G: float = 9.81

    def __post_init__(self):
        if not (self.M > 0 and self.m >= 0 and self.ell > 0):
            raise ValueError(f"need M > 0, m >= 0, ell > 0; got {self}")


def gantry_f(x, params=GantryParams()):
    """Drift field; state ``x = (z, phi, z', phi')``."""
    M, m, ell, G = params.M, params.m, params.ell, params.G
    s, c = sin(x[1]), cos(x[1])
    den = m * s * s + M
    w2 = x[3] * x[3]
    a3 = (m * ell * w2 * s + m * G * s * c) / den
    a4 = -(m * ell * w2 * s * c + (m + M) * G * s) / (ell * den)
    return tarray([x[2], x[3], a3, a4])


def gantry_g(x, params=GantryParams()):
    """Input field as a 4 x 1 column."""
    M, m, ell = params.M, params.m, params.ell
    s, c = sin(x[1]), cos(x[1])
    den = m * s * s + M
    return tarray([[0.0], [0.0], [1.0 / den], [-c / (ell * den)]])


def gantry_h(x, params=GantryParams()):
    """Cartesian load position as a 2 x 1 column."""
    ell = params.ell
    return tarray([[ell * sin(x[1]) + x[0]], [ell * cos(x[1])]])


def gantry_dh(x, params=GantryParams()):
    """Differential of :func:`gantry_h`: two covector rows (2 x 4)."""
    ell = params.ell
    return tarray([[1.0, ell * cos(x[1]), 0.0, 0.0],
                   [0.0, -ell * sin(x[1]), 0.0, 0.0]])


def _lincomb(row, x):
    terms = [x[j] if a == 1.0 else a * x[j] for j, a in enumerate(row) if a != 0.0]
    if not terms:
        return 0.0
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc


def linear_model(A, b, c):
    """``f(x) = A x``, constant ``g = b`` (n x 1), ``h = c x``, ``dh = c``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.atleast_2d(np.asarray(c, dtype=float))

    def f(x):
        return tarray([_lincomb(row, x) for row in A])

    def g(x):
        return tarray([[bi] for bi in b])

    def h(x):
        return tarray([[_lincomb(row, x)] for row in c])

    def dh(x):
        return c.copy()

    return f, g, h, dh


@dataclass
class Model:
    """Named system with default state, parameter vector and fields."""

    name: str
    n: int
    x0: tuple
    params: tuple
    build: object = field(repr=False)

    def fields(self, params=None):
        """``{"f": f, "g": g, "h": h, "w": dh}`` for the given parameters."""
        return self.build(self.params if params is None else tuple(params))


def _gantry_fields(params):
    p = GantryParams(*params)
    return {"f": partial(gantry_f, params=p), "g": partial(gantry_g, params=p),
            "h": partial(gantry_h, params=p), "w": partial(gantry_dh, params=p)}


def _nilpotent_fields(params):
    f, g, h, dh = linear_model([[0.0, 1.0], [0.0, 0.0]], [0.0, 1.0], [list(params)])
    return {"f": f, "g": g, "h": h, "w": dh}


def _oscillator_fields(params):
    (omega,) = params
    f, g, h, dh = linear_model([[0.0, 1.0], [-omega * omega, 0.0]], [0.0, 1.0], [[1.0, 0.0]])
    return {"f": f, "g": g, "h": h, "w": dh}


MODELS = {
    "gantry": Model("gantry", 4, GANTRY_X0, (1.0, 1.0, 1.0, 9.81), _gantry_fields),
    "nilpotent": Model("nilpotent", 2, (0.5, -1.5), (1.0, 2.0), _nilpotent_fields),
    "oscillator": Model("oscillator", 2, (1.0, 0.0), (1.0,), _oscillator_fields),
}


def get_model(name):
    try:
        return MODELS[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
