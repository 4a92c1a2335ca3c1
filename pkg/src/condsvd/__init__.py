"""Conditional singular value decomposition of a matrix relative to another."""

__version__ = "0.1.0"

from .conditional import (
    Case,
    ConditionalFactors,
    FeasibilityReport,
    ScalingFactors,
    SpecialFactors,
    VerificationReport,
    build_scaling,
    check_conditions,
    conditional_svd,
    residual_tail,
    scaling_diagonal,
    sigma_decompose,
    special_case,
    verify_factors,
)
from .errors import (
    CondSvdError,
    ConvergenceError,
    DimensionError,
    InfeasibleError,
    InputError,
    NotExactError,
    NotHermitianError,
    NotPSDError,
    SingularBError,
)
from .instances import GenSpec, random_decomposable, random_general, random_psd_pair, random_unitary
from .matrix import RectDiagonal, adjoint, as_matrix, embed, frobenius_norm, is_hermitian, is_unitary, matmul
from .mmio import read_matrix, write_matrix
from .svd import HermitianEig, SvdFactors, full_svd, hermitian_psd_eig, reconstruct
