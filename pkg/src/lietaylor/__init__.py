"""Truncated Taylor arithmetic, code lists, and Lie derivatives along flows."""

from .array import TaylorArray, concat, lu_factor, lu_solve, matmul, solve, stack, tarray
from .errors import (DivisionByZeroConstantTerm, DomainError, IndexOutOfBounds,
                     NonFiniteCoefficient, OrderMismatch, ShapeError, ShapeMismatch,
                     SingularConstantTerm, TaylorError, UnsupportedOperation)
from .lie import (FieldKind, LieResult, j_series_recurrence, lie, lie_covector,
                  lie_covector_jrec, lie_scalar, lie_vector, lie_vector_zrec, z_series)
from .models import GANTRY_X0, GantryParams, gantry_dh, gantry_f, gantry_g, gantry_h, get_model
from .report import OracleReport
from .series import (TaylorScalar, acos, acosh, asin, asinh, atan, atan2, atanh, cos, cosh,
                     exp, expm1, log, log1p, nthroot, power, sin, sinh, sqrt, tan, tanh)
from .tape import CodeList, as_codelist, jacobian_series, record, taylcoeffs

__version__ = "0.1.0"
