"""Comparison reports shared by the tape checks, the oracles and the CLI."""

from dataclasses import dataclass, field

import numpy as np


def normwise_error(value, reference):
    """``(abs, rel)`` with ``abs = ||value - reference||_inf`` and
    ``rel = abs / max(1, ||reference||_inf)``."""
    v = np.asarray(value, dtype=float)
    r = np.asarray(reference, dtype=float)
    err = float(np.max(np.abs(v - r))) if v.size else 0.0
    scale = float(np.max(np.abs(r))) if r.size else 0.0
    return err, err / max(1.0, scale)


@dataclass
class OracleReport:
    """Per-order discrepancies between a computed series and a reference.

    ``orders`` lists every compared order; ``abs_err`` and ``rel_err`` are
    aligned with it.
    """

    name: str
    orders: list
    abs_err: list
    rel_err: list
    tolerance: float
    detail: dict = field(default_factory=dict)

    @property
    def max_order(self):
        return max(self.orders) if self.orders else -1

    @property
    def max_rel(self):
        return max(self.rel_err, default=0.0)

    @property
    def passed(self):
        return all(e <= self.tolerance for e in self.rel_err)

    @classmethod
    def compare(cls, name, values, references, tolerance, orders=None, **detail):
        """Build a report from per-order value/reference pairs."""
        orders = list(range(len(values))) if orders is None else list(orders)
        abs_err, rel_err = [], []
        for v, r in zip(values, references):
            a, e = normwise_error(v, r)
            abs_err.append(a)
            rel_err.append(e)
        return cls(name, orders, abs_err, rel_err, tolerance, detail)

    def as_dict(self):
        return {
            "name": self.name,
            "orders": list(self.orders),
            "abs_err": [float(e) for e in self.abs_err],
            "rel_err": [float(e) for e in self.rel_err],
            "max_rel": float(self.max_rel),
            "tolerance": float(self.tolerance),
            "passed": self.passed,
        }
