"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``
to see the lines; a full pytest run repeats them in the terminal summary.
"""

import sys
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lietaylor import series as S  # noqa: E402
from lietaylor.array import TaylorArray, matmul, tarray  # noqa: E402
from lietaylor.cli import bench_scaling  # noqa: E402
from lietaylor.lie import (lie_covector, lie_covector_jrec, lie_scalar, lie_vector,  # noqa: E402
                           lie_vector_zrec, j_series_recurrence, z_series)
from lietaylor.models import GANTRY_X0, get_model, linear_model  # noqa: E402
from lietaylor.oracle import (definition_check, error_growth,  # noqa: E402
                              extended_precision_reference, nested_oracle_report,
                              relative_errors)
from lietaylor.series import TaylorScalar  # noqa: E402
from lietaylor.tape import finite_difference_jacobian_check, taylcoeffs  # noqa: E402

from magnitude import Mag, ulp_ratio  # noqa: E402

EPS = np.finfo(float).eps
RESULTS = []

FIELDS = get_model("gantry").fields()
F, G, H, W = FIELDS["f"], FIELDS["g"], FIELDS["h"], FIELDS["w"]
X0 = GANTRY_X0


def rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))


def report(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert passed, line


def test_01_series_algebra():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst, count = {}, 0
    for _ in range(1000):
        p = int(rng.integers(0, 21))

        def draw():
            return TaylorScalar([Mag(c) for c in rng.uniform(-2, 2, p + 1)])

        u, v, w = draw(), draw(), draw()
        one = TaylorScalar([Mag(1.0)] + [Mag(0.0)] * p)
        checks = {
            "add-comm": (u + v, v + u), "add-assoc": ((u + v) + w, u + (v + w)),
            "mul-comm": (u * v, v * u), "mul-assoc": ((u * v) * w, u * (v * w)),
            "distributive": (u * (v + w), u * v + u * w),
            "mul/div": ((u * v) / v, u), "div*mul": ((u / v) * v, u),
            "log(exp)": (S.log(S.exp(u)), u),
            "sin^2+cos^2": (S.sin(u) * S.sin(u) + S.cos(u) * S.cos(u), one),
        }
        for name, (lhs, rhs) in checks.items():
            worst[name] = max(worst.get(name, 0.0), ulp_ratio(lhs, rhs))
        count += 1
    elapsed = time.perf_counter() - start
    top = max(worst.values())
    report(1, "series algebra", top <= 8.0 and elapsed < 10.0,
           f"{count} random triples, worst {top:.2f} ulp*scale (<= 8), {elapsed:.1f} s (< 10 s)")


def test_02_stepping_residual():
    p = 10
    x, _ = taylcoeffs(F, X0, p)
    fx = F(x)
    worst = max(rel(fx.gettc(k), (k + 1) * x.gettc(k + 1)) for k in range(p))
    report(2, "ODE stepping residual", worst <= 1e-13,
           f"max normwise rel {worst:.2e} (<= 1e-13), k = 0..{p - 1}")


def test_03_jacobian():
    fd = finite_difference_jacobian_check(F, X0, 5, tolerance=1e-6)
    _, J = taylcoeffs(F, X0, 10, want_jacobian=True)
    Jr = j_series_recurrence(F, X0, 10)
    rec = max(rel(J.gettc(k), Jr.gettc(k)) for k in range(11))
    report(3, "Jacobian coefficients", fd.passed and rec <= 1e-12,
           f"FD max rel {fd.max_rel:.2e} (<= 1e-6, k <= 5); recurrence max rel {rec:.2e} "
           f"(<= 1e-12, k <= 10)")


def test_04_definitions():
    p = 3
    reps = [definition_check("scalar", F, H, X0, lie_scalar(F, H, X0, p)),
            definition_check("vector", F, G, X0, lie_vector(F, G, X0, p)),
            definition_check("covector", F, W, X0, lie_covector(F, W, X0, p))]
    detail = ", ".join(f"{r.name.split('-')[1]} {r.max_rel:.1e}" for r in reps)
    report(4, "first-order definitions", all(r.passed for r in reps), f"{detail} (<= 1e-6)")


def zj_defect(Z, J, p, exact=False):
    """Per-order ``max |trunc(Z J) - I|``; ``exact`` multiplies the binary64
    coefficients without rounding (50-digit arithmetic)."""
    if exact:
        with mpmath.workdps(50):
            Zm = np.vectorize(mpmath.mpf, otypes=[object])(np.asarray(Z, float))
            Jm = np.vectorize(mpmath.mpf, otypes=[object])(np.asarray(J, float))
            out = []
            for k in range(p + 1):
                s = sum(Zm[i].dot(Jm[k - i]) for i in range(k + 1)) - (np.eye(4) if k == 0 else 0)
                out.append(float(max(abs(v) for v in s.ravel())))
            return out
    ZJ = matmul(TaylorArray(Z), TaylorArray(J)).coeffs.copy()
    ZJ[0] -= np.eye(4)
    return [float(np.abs(ZJ[k]).max()) for k in range(p + 1)]


def test_05_cross_paths():
    p = 10
    v1, v2 = lie_vector(F, G, X0, p), lie_vector_zrec(F, G, X0, p)
    c1, c2 = lie_covector(F, W, X0, p), lie_covector_jrec(F, W, X0, p)
    ev = max(rel(v1.get_tc(k), v2.get_tc(k)) for k in range(p + 1))
    ec = max(rel(c1.get_tc(k), c2.get_tc(k)) for k in range(p + 1))
    _, J = taylcoeffs(F, X0, p, want_jacobian=True)
    defect = zj_defect(z_series(F, X0, p).coeffs, J.coeffs, p)
    # Floor: Z and J from a 40-digit run, correctly rounded to binary64, multiplied exactly.
    with mpmath.workdps(40):
        x0m = [mpmath.mpf(v) for v in X0]
        Zr = np.asarray(z_series(F, x0m, p).coeffs, float)
        Jr = np.asarray(taylcoeffs(F, x0m, p, want_jacobian=True)[1].coeffs, float)
    floor = zj_defect(Zr, Jr, p, exact=True)
    over = [k for k in range(p + 1) if defect[k] > 1e-13]
    report(5, "cross-path equivalence", max(ev, ec) <= 1e-12 and not over,
           f"vector {ev:.1e}, covector {ec:.1e} (<= 1e-12); max |trunc(ZJ) - I| "
           f"{max(defect):.1e} (<= 1e-13){'; exceeded at k=' + str(over) if over else ''}; "
           f"binary64 floor (correctly rounded Z, J, exact product) {max(floor):.1e}")


def test_06_nested_oracle():
    rep = nested_oracle_report(F, H, X0, lie_scalar(F, H, X0, 3), kmax=3, tolerance=1e-5)
    detail = ", ".join(f"k={k} {e:.1e}" for k, e in zip(rep.orders, rep.rel_err))
    report(6, "nested FD oracle", rep.passed, f"{detail} (<= 1e-5)")


def test_07_linear_closed_forms():
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    b = np.array([0.5, -1.0, 2.0])
    c = np.array([[1.0, -2.0, 3.0], [0.25, 0.0, -1.0]])
    f, g, _, dh = linear_model(A, b, c)
    x0 = [1.0, -0.5, 0.25]
    p = 6
    vec, cov = lie_vector(f, g, x0, p), lie_covector(f, dh, x0, p)
    worst = 0.0
    for k in range(p + 1):
        ad = np.linalg.matrix_power(-A, k) @ b.reshape(-1, 1)
        la = c @ np.linalg.matrix_power(A, k)
        worst = max(worst, np.abs(vec.get_derivative(k) - ad).max() / EPS,
                    np.abs(cov.get_derivative(k) - la).max() / EPS)
    report(7, "nilpotent closed forms", worst <= 4, f"max error {worst:.1f} ulp (<= 4), k <= {p}")


def test_08_error_growth():
    p = 10
    es = relative_errors(lie_scalar(F, H, X0, p), extended_precision_reference(F, H, X0, p))
    ev = relative_errors(lie_vector(F, G, X0, p),
                         extended_precision_reference(F, G, X0, p, "vector"))
    gs, gv = error_growth(es), error_growth(ev)
    report(8, "error growth vs 40-digit reference", gs <= 10 and gv <= 1e4,
           f"scalar h: k=1 {es[1]:.1e}, k=10 {es[10]:.1e}, ratio {gs:.1f} (<= 10); "
           f"vector g: k=1 {ev[1]:.1e}, k=10 {ev[10]:.1e}, ratio {gv:.1f} (<= 1e4)")


def test_09_runtime_scaling():
    low = bench_scaling("gantry", "g", kmax=10, reps=7)
    high = bench_scaling("gantry", "g", kmin=30, kmax=60, step=5, reps=7)
    ok = low["exponent"] <= 1.6 and 1.5 <= high["exponent"] <= 2.5
    h_low = bench_scaling("gantry", "h", kmax=10, reps=7)["exponent"]
    h_high = bench_scaling("gantry", "h", kmin=30, kmax=60, step=5, reps=7)["exponent"]
    report(9, "runtime scaling", ok,
           f"ad_f^k g exponent k<=10 {low['exponent']:.2f} (<= 1.6), k in [30,60] "
           f"{high['exponent']:.2f} (in [1.5, 2.5]); tape share {low['tape_fraction'][0]:.0%} "
           f"at k=1, {high['tape_fraction'][-1]:.1%} at k=60; L^k h (informational) "
           f"{h_low:.2f} / {h_high:.2f}")


def random_family(rng, m=3):
    a = rng.uniform(-1, 1, (m, 4))

    def h(i):
        return lambda x: a[i, 0] * S.sin(x[1]) * x[0] + a[i, 1] * x[3] * x[3] + a[i, 2] * x[2]

    def g(i):
        return lambda x: [a[i, 0] * x[2], a[i, 1] * S.cos(x[1]), a[i, 2] * x[0] * x[3],
                          a[i, 3] + 0.0 * x[1]]

    def w(i):
        return lambda x: [a[i, 0] * x[1], a[i, 1] * S.sin(x[0]), a[i, 2] * x[3],
                          a[i, 3] * S.cos(x[2])]

    return [h(i) for i in range(m)], [g(i) for i in range(m)], [w(i) for i in range(m)]


def test_10_family_consistency():
    hs, gs, ws = random_family(np.random.default_rng(10))
    p = 10
    Hs = lie_scalar(F, lambda x: tarray([h(x) for h in hs]), X0, p).coeffs.coeffs
    Gs = lie_vector(F, lambda x: tarray([[g(x)[i] for g in gs] for i in range(4)]), X0,
                    p).coeffs.coeffs
    Ws = lie_covector(F, lambda x: tarray([w(x) for w in ws]), X0, p).coeffs.coeffs
    same = all(np.array_equal(Hs[:, i], lie_scalar(F, h, X0, p).coeffs.coeffs)
               for i, h in enumerate(hs))
    same &= all(np.array_equal(Gs[:, :, j], lie_vector(F, lambda x, g=g: tarray(g(x)), X0,
                                                       p).coeffs.coeffs)
                for j, g in enumerate(gs))
    same &= all(np.array_equal(Ws[:, i], lie_covector(F, lambda x, w=w: tarray(w(x)), X0,
                                                      p).coeffs.coeffs)
                for i, w in enumerate(ws))
    report(10, "family consistency", same,
           f"3 scalar, 3 vector (4x3), 3 covector (3x4) fields, k <= {p}: "
           f"{'bit-identical' if same else 'MISMATCH'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
