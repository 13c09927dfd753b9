import math

import numpy as np
import pytest

from lietaylor import series as S
from lietaylor.array import TaylorArray
from lietaylor.errors import (DomainError, NonFiniteCoefficient, ShapeMismatch,
                              UnsupportedOperation)
from lietaylor.lie import j_series_recurrence
from lietaylor.models import gantry_f
from lietaylor.tape import (CodeList, Instruction, as_codelist, finite_difference_jacobian_check,
                            jacobian_series, record, taylcoeffs)


def rotation(x):
    return [x[1], -x[0]]


# -- recording and interpretation ------------------------------------------

def test_record_rotation():
    code = record(rotation, 2)
    assert [ins.op for ins in code.instructions] == ["neg"]
    assert len(code.outputs) == 2
    np.testing.assert_array_equal(code([3.0, 4.0]), [4.0, -3.0])


def test_gantry_interpretation_matches_direct_evaluation(gantry):
    f, _, _, _, x0 = gantry
    code = record(f, 4)
    np.testing.assert_allclose(code(list(x0)), f(list(x0)), rtol=1e-15, atol=0)
    assert {ins.op for ins in code.instructions} <= {"add", "sub", "mul", "div", "neg", "sin",
                                                      "cos"}


def test_sin_and_cos_share_one_kernel(gantry):
    code = record(gantry[0], 4)
    ops = [ins.op for ins in code.instructions]
    assert ops.count("sin") == 1 and ops.count("cos") == 1


def test_constants_are_pooled():
    code = record(lambda x: [2.0 * x[0] + 2.0, 2.0 * x[1]], 2)
    assert list(code.constants) == [2.0]


@pytest.mark.parametrize("field", [
    lambda x: [x[0] if x[0] > 0 else x[1], x[1]],
    lambda x: [abs(x[0]), x[1]],
    lambda x: [max(x[0], x[1]), x[1]],
    lambda x: [x[0], x[1]] if x[0] == 1.0 else [x[1], x[0]],
    lambda x: [float(x[0]), x[1]],
])
def test_branching_fields_are_rejected(field):
    with pytest.raises(UnsupportedOperation):
        record(field, 2)


def test_wrong_number_of_outputs():
    with pytest.raises(ShapeMismatch):
        record(lambda x: [x[0]], 2)


def test_invalid_code_list_is_rejected():
    with pytest.raises(ValueError):
        CodeList(1, (), (Instruction("add", (0, 5), None),), (1,))
    with pytest.raises(ValueError):
        CodeList(1, (), (Instruction("bogus", (0,), None),), (1,))


def test_listing_mentions_every_instruction(gantry):
    code = record(gantry[0], 4)
    text = code.listing()
    assert text.count("\n") >= len(code.instructions)
    assert "sin" in text and "div" in text


def test_as_codelist_passes_through():
    code = record(rotation, 2)
    assert as_codelist(code, 2) is code


# -- taylcoeffs -------------------------------------------------------

def test_exp_flow():
    c = 1.7
    x, J = taylcoeffs(lambda x: [x[0]], [c], 4, want_jacobian=True)
    inv_fact = [1 / math.factorial(k) for k in range(5)]
    np.testing.assert_allclose(x.coeffs[:, 0], [c * v for v in inv_fact], rtol=1e-16)
    np.testing.assert_allclose(J.coeffs[:, 0, 0], inv_fact, rtol=1e-16)


def test_harmonic_oscillator():
    x, J = taylcoeffs(rotation, [1.0, 0.0], 3, want_jacobian=True)
    np.testing.assert_array_equal(x.coeffs[:, 0], [1.0, 0.0, -0.5, 0.0])
    rot = [np.eye(2), np.array([[0, 1], [-1, 0]]), -np.eye(2) / 2, -np.array([[0, 1], [-1, 0]]) / 6]
    for k in range(4):
        np.testing.assert_allclose(J.gettc(k), rot[k], atol=1e-16)


def test_square_closed_form():
    # x' = x^2 gives x(t) = c/(1 - c t): x_k = c^{k+1}, dx_k/dc = (k+1) c^k.
    c = 0.6
    x, J = taylcoeffs(lambda x: [x[0] * x[0]], [c], 8, want_jacobian=True)
    np.testing.assert_allclose(x.coeffs[:, 0], [c ** (k + 1) for k in range(9)], rtol=1e-14)
    np.testing.assert_allclose(J.coeffs[:, 0, 0], [(k + 1) * c ** k for k in range(9)],
                               rtol=1e-14)


def test_residual_of_stepping_rule(gantry):
    f, _, _, _, x0 = gantry
    p = 10
    x, _ = taylcoeffs(f, x0, p)
    fx = f(x)
    for k in range(p):
        lhs, rhs = fx.gettc(k), (k + 1) * x.gettc(k + 1)
        assert np.abs(lhs - rhs).max() <= 1e-13 * max(1.0, np.abs(rhs).max())


def test_truncation_consistency(gantry):
    f, _, _, _, x0 = gantry
    xp, Jp = taylcoeffs(f, x0, 9, want_jacobian=True)
    for q in (0, 3, 6):
        xq, Jq = taylcoeffs(f, x0, q, want_jacobian=True)
        np.testing.assert_array_equal(xp.truncate(q).coeffs, xq.coeffs)
        np.testing.assert_array_equal(Jp.truncate(q).coeffs, Jq.coeffs)


def test_determinism(gantry):
    code = record(gantry[0], 4)
    a = taylcoeffs(code, gantry[4], 8, want_jacobian=True)
    b = taylcoeffs(code, gantry[4], 8, want_jacobian=True)
    np.testing.assert_array_equal(a[0].coeffs, b[0].coeffs)
    np.testing.assert_array_equal(a[1].coeffs, b[1].coeffs)


def test_jacobian_constant_term_is_identity(gantry):
    _, J = taylcoeffs(gantry[0], gantry[4], 5, want_jacobian=True)
    np.testing.assert_array_equal(J.gettc(0), np.eye(4))


def test_values_do_not_depend_on_jacobian_flag(gantry):
    x1, _ = taylcoeffs(gantry[0], gantry[4], 7)
    x2, _ = taylcoeffs(gantry[0], gantry[4], 7, want_jacobian=True)
    np.testing.assert_array_equal(x1.coeffs, x2.coeffs)


def test_order_zero_and_negative():
    x, J = taylcoeffs(rotation, [1.0, 2.0], 0, want_jacobian=True)
    assert x.order == 0 and J.order == 0
    with pytest.raises(ValueError):
        taylcoeffs(rotation, [1.0, 2.0], -1)


def test_domain_error_reports_instruction():
    with pytest.raises(DomainError) as info:
        taylcoeffs(lambda x: [S.log(x[0] - 2.0)], [1.0], 3)
    assert info.value.instruction is not None


def test_overflow_is_reported():
    with pytest.raises(NonFiniteCoefficient):
        taylcoeffs(lambda x: [x[0] * x[0]], [1e200], 3)


# -- Jacobian oracles ------------------------------------------------------

def test_fd_check_linear_field():
    rep = finite_difference_jacobian_check(lambda x: [x[0] + 2.0 * x[1], -3.0 * x[0]],
                                           [0.3, -0.7], 6)
    assert rep.passed and rep.max_rel < 1e-9
    assert rep.orders == list(range(7))


def test_fd_check_gantry(gantry):
    rep = finite_difference_jacobian_check(gantry[0], gantry[4], 5)
    assert rep.passed, rep.rel_err
    assert rep.detail["abs"].shape == (6, 4, 4)


def test_jacobian_matches_variational_recurrence(gantry):
    f, x0 = gantry[0], gantry[4]
    _, J = taylcoeffs(f, x0, 10, want_jacobian=True)
    Jr = j_series_recurrence(f, x0, 10)
    for k in range(11):
        ref = Jr.gettc(k)
        assert np.abs(J.gettc(k) - ref).max() <= 1e-12 * max(1.0, np.abs(ref).max())


def test_jacobian_series_of_linear_field_is_constant():
    A = np.array([[0.0, 1.0], [-4.0, 0.0]])
    x, _ = taylcoeffs(lambda x: [x[1], -4.0 * x[0]], [1.0, 0.5], 4)
    Ak = jacobian_series(lambda x: [x[1], -4.0 * x[0]], x)
    np.testing.assert_array_equal(Ak.gettc(0), A)
    assert not Ak.coeffs[1:].any()


def test_interpretation_on_taylor_array(gantry):
    f, x0 = gantry[0], gantry[4]
    x, _ = taylcoeffs(f, x0, 6)
    code = record(f, 4)
    np.testing.assert_array_equal(code(x).coeffs, f(x).coeffs)
    assert isinstance(code(x), TaylorArray)


def test_gantry_equilibrium_is_fixed_point():
    x, _ = taylcoeffs(gantry_f, [0.0] * 4, 5)
    assert not x.coeffs.any()
