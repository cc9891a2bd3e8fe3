"""Quaternion matrix algebra and coupled four-term Sylvester-type systems.

The real-linear oracle in :mod:`quatsylv.oracle` is a testing device and
is deliberately not re-exported here.
"""
from .errors import (
    BadWindow,
    FormatError,
    InconsistentEquation,
    InconsistentSystem,
    InvalidAxis,
    NonSquare,
    QuatSylvError,
    ShapeError,
)
from .phi_systems import (
    PhiEquation,
    PhiSolution,
    PhiSystem,
    check_phi_system,
    phi_hermitian_check,
    solve_phi_system,
    to_general_system,
)
from .quat_core import Involution, Quaternion, involution_from_axis, phi_apply, qconj, qmul
from .quat_linalg import (
    Decomposition,
    Projectors,
    RankResult,
    complex_adjoint,
    marsaglia_styan_check,
    pinv,
    projectors,
    rank,
)
from .quat_matrix import (
    BlockSpec,
    QuatMatrix,
    Signed,
    Zero,
    assemble_block,
    conj_transpose,
    identity,
    matmul,
    phi_transpose,
    split_block,
    zeros,
)
from .sylvester import (
    ConsistencyReport,
    Family,
    FourTermEquation,
    RankCondition,
    SylvesterSystem,
    SystemSolution,
    check_system,
    lemma1_aux,
    lemma1_consistent,
    lemma1_solve,
    reduce_system,
    residuals,
    solve_system,
)

__version__ = "0.1.0"
