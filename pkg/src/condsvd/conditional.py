"""Conditional SVD: factor ``A = H @ B @ M*`` for a given pair ``(A, B)``.

Both matrices are put through a full SVD. The singular spectra are linked
by a diagonal scaling ``d_i = sqrt(sigma_A[i] / sigma_B[i])`` for the first
``p = min(k, l)`` values, placed on the leading diagonals of an m x k matrix
``R`` and an l x n matrix ``S*``. Then

    H = U_A R U_B*        (m x k)
    M = V_A S V_B*        (n x l)

reproduces the leading p x p block of ``Sigma_A``; singular values of A
past index p cannot be represented and form the residual tail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    InfeasibleError,
    InputError,
    NotExactError,
    SingularBError,
)
from .matrix import RectDiagonal, as_matrix, embed, frobenius_norm, is_hermitian
from .svd import full_svd, hermitian_psd_eig

__all__ = [
    "Case",
    "FeasibilityReport",
    "ScalingFactors",
    "ConditionalFactors",
    "SpecialFactors",
    "VerificationReport",
    "check_conditions",
    "scaling_diagonal",
    "build_scaling",
    "sigma_decompose",
    "residual_tail",
    "conditional_svd",
    "special_case",
    "verify_factors",
    "ZERO_TOL",
    "EXACT_TOL",
    "HERMITIAN_TOL",
]

ZERO_TOL = 1e-12
EXACT_TOL = 1e-8
HERMITIAN_TOL = 1e-10


class Case(str, enum.Enum):
    CONDITION1 = "Condition1"
    CONDITION2 = "Condition2"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of :func:`check_conditions`.

    ``singular_index`` is the first (0-based) index ``i < p`` whose singular
    value of B fails the nonzero threshold, or ``None``. ``dims_ok`` is false
    when the shape inequalities alone rule the pair out.
    """

    case: Case
    p: int
    dims: tuple
    violations: tuple = ()
    sigma_b_min: float = math.nan
    threshold: float = 0.0
    dims_ok: bool = True
    singular_index: int | None = None

    @property
    def feasible(self):
        return self.case is not Case.INFEASIBLE

    def to_dict(self):
        return {
            "case": self.case.value,
            "p": self.p,
            "dims": list(self.dims),
            "violations": list(self.violations),
            "sigma_b_min": None if math.isnan(self.sigma_b_min) else self.sigma_b_min,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class ScalingFactors:
    d: np.ndarray
    R: RectDiagonal
    S: RectDiagonal  # stored as S*, the l x n right factor
    case: Case


@dataclass(frozen=True)
class ConditionalFactors:
    H: np.ndarray
    M: np.ndarray
    residual_abs: float
    residual_rel: float
    exact: bool
    report: FeasibilityReport
    scaling: ScalingFactors
    sigma_a: np.ndarray = field(repr=False)
    sigma_b: np.ndarray = field(repr=False)
    residual_tail: float = 0.0


@dataclass(frozen=True)
class SpecialFactors:
    H: np.ndarray
    residual_abs: float
    residual_rel: float
    exact: bool
    d: np.ndarray
    lam_a: np.ndarray = field(repr=False)
    lam_b: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class VerificationReport:
    residual_abs: float
    residual_rel: float
    hh_hermitian: bool
    mm_hermitian: bool
    hh_asymmetry: float
    mm_asymmetry: float
    tol: float
    passed: bool

    def to_dict(self):
        return dict(self.__dict__)


def _threshold(sigma_b, zero_tol):
    top = float(sigma_b[0]) if len(sigma_b) else 0.0
    return zero_tol * top if top > 0 else zero_tol


def check_conditions(m, n, k, l, sigma_b, zero_tol=ZERO_TOL) -> FeasibilityReport:
    """Classify ``(m, n, k, l)`` and the spectrum of B.

    ``sigma_b`` must hold the ``min(k, l)`` leading singular values of B in
    descending order. A value counts as nonzero when it exceeds
    ``zero_tol * sigma_b[0]`` (or ``zero_tol`` itself if B is zero). When
    ``k == l`` the two conditions coincide and Condition1 is reported.
    """
    dims = (int(m), int(n), int(k), int(l))
    if min(dims) < 1:
        raise InputError(f"dimensions must be positive, got {dims}")
    if zero_tol < 0:
        raise InputError("zero_tol must be nonnegative")
    sigma_b = np.asarray(sigma_b, dtype=np.float64).reshape(-1)
    p = min(k, l)
    if sigma_b.size != p:
        raise DimensionError(f"sigma_B has {sigma_b.size} entries, expected min(k, l) = {p}")

    if k >= l:
        case, need = Case.CONDITION1, ("l", l)
    else:
        case, need = Case.CONDITION2, ("k", k)
    violations = []
    for name, val in (("m", m), ("n", n)):
        if val < need[1]:
            violations.append(f"{name} < {need[0]} ({name}={val}, {need[0]}={need[1]})")
    dims_ok = not violations

    thr = _threshold(sigma_b, zero_tol)
    bad = np.flatnonzero(~(sigma_b > thr))
    singular_index = int(bad[0]) if bad.size else None
    if singular_index is not None:
        violations.append(
            f"sigma_B[{singular_index}] = {sigma_b[singular_index]:.6g} is not above "
            f"threshold {thr:.6g} (B singular within tolerance)"
        )
    return FeasibilityReport(
        case=Case.INFEASIBLE if violations else case,
        p=p,
        dims=dims,
        violations=tuple(violations),
        sigma_b_min=float(sigma_b.min()),
        threshold=thr,
        dims_ok=dims_ok,
        singular_index=singular_index,
    )


def scaling_diagonal(sigma_a, sigma_b, p, zero_tol=ZERO_TOL) -> np.ndarray:
    """Return ``d[i] = sqrt(sigma_a[i] / sigma_b[i])`` for ``i < p``."""
    sigma_a = np.asarray(sigma_a, dtype=np.float64).reshape(-1)
    sigma_b = np.asarray(sigma_b, dtype=np.float64).reshape(-1)
    if sigma_a.size < p or sigma_b.size < p:
        raise DimensionError(f"need at least p={p} singular values of each matrix")
    thr = _threshold(sigma_b, zero_tol)
    for i in range(p):
        if not sigma_b[i] > thr:
            raise SingularBError(i, float(sigma_b[i]), thr)
    return np.sqrt(sigma_a[:p] / sigma_b[:p])


def build_scaling(d, m, n, k, l, case) -> ScalingFactors:
    """Embed ``d`` into the m x k left factor R and the l x n right factor S*."""
    d = np.asarray(d, dtype=np.float64).reshape(-1)
    case = Case(case)
    if case is Case.INFEASIBLE:
        raise InfeasibleError("cannot build scaling factors for an infeasible case")
    p = min(k, l)
    if d.size != p:
        raise DimensionError(f"d has {d.size} entries, expected min(k, l) = {p}")
    if case is Case.CONDITION1 and not (k >= l and m >= l and n >= l):
        raise DimensionError(f"dims {(m, n, k, l)} do not satisfy Condition1")
    if case is Case.CONDITION2 and not (k <= l and m >= k and n >= k):
        raise DimensionError(f"dims {(m, n, k, l)} do not satisfy Condition2")

    def padded(size):
        out = np.zeros(size)
        out[:p] = d
        return out

    r = RectDiagonal(m, k, padded(min(m, k)))
    s = RectDiagonal(l, n, padded(min(l, n)))
    return ScalingFactors(d=d, R=r, S=s, case=case)


def sigma_decompose(sigma_a: RectDiagonal, sigma_b: RectDiagonal, zero_tol=ZERO_TOL) -> ScalingFactors:
    """Split ``Sigma_A`` as ``R @ Sigma_B @ S*`` on its leading p x p block."""
    m, n = sigma_a.shape
    k, l = sigma_b.shape
    report = check_conditions(m, n, k, l, sigma_b.diag, zero_tol)
    _raise_if_infeasible(report, sigma_b.diag)
    d = scaling_diagonal(sigma_a.diag, sigma_b.diag, report.p, zero_tol)
    sf = build_scaling(d, m, n, k, l, report.case)

    p = report.p
    lead = (embed(sf.R) @ embed(sigma_b) @ embed(sf.S))[:p, :p]
    target = embed(sigma_a)[:p, :p]
    err = frobenius_norm(lead - target)
    if err > 64 * np.finfo(float).eps * max(1.0, frobenius_norm(target)):
        raise ArithmeticError(f"leading block not reproduced (error {err:.3g})")
    return sf


def residual_tail(sigma_a, p) -> float:
    """Frobenius norm of the singular values of A past index p."""
    tail = np.asarray(sigma_a, dtype=np.float64).reshape(-1)[p:]
    return float(np.sqrt(np.sum(tail * tail)))


def _raise_if_infeasible(report, sigma_b):
    # shape violations take precedence: no factors exist whatever B's spectrum
    if not report.dims_ok:
        raise InfeasibleError("infeasible: " + "; ".join(report.violations), report)
    if report.singular_index is not None:
        i = report.singular_index
        raise SingularBError(i, float(sigma_b[i]), report.threshold, report)


def conditional_svd(a, b, *, zero_tol=ZERO_TOL, exact_tol=EXACT_TOL, strict=False) -> ConditionalFactors:
    """Compute H (m x k) and M (n x l) with ``A = H @ B @ M*``.

    Parameters
    ----------
    a, b : array_like
        ``A`` is m x n, ``B`` is k x l; entries must be finite.
    zero_tol : float
        Relative threshold deciding when a singular value of B is zero.
    exact_tol : float
        ``exact`` is set when ``residual_abs / max(1, ||A||) <= exact_tol``.
    strict : bool
        Raise :class:`NotExactError` instead of returning inexact factors.

    Raises
    ------
    InfeasibleError
        Shapes satisfy neither condition. Always raised, strict or not.
    SingularBError
        One of the p leading singular values of B is numerically zero.
    """
    a = as_matrix(a, name="A")
    b = as_matrix(b, name="B")
    for name, x in (("A", a), ("B", b)):
        if not np.all(np.isfinite(x)):
            raise InputError(f"{name} has non-finite entries")
    m, n = a.shape
    k, l = b.shape

    fb = full_svd(b)
    report = check_conditions(m, n, k, l, fb.sigma.diag, zero_tol)
    _raise_if_infeasible(report, fb.sigma.diag)

    fa = full_svd(a)
    d = scaling_diagonal(fa.sigma.diag, fb.sigma.diag, report.p, zero_tol)
    sf = build_scaling(d, m, n, k, l, report.case)

    h = fa.U @ embed(sf.R) @ fb.U.conj().T
    mm = fa.V @ embed(sf.S).T @ fb.V.conj().T

    norm_a = frobenius_norm(a)
    res = frobenius_norm(a - h @ b @ mm.conj().T)
    rel = res / max(1.0, norm_a)
    tail = residual_tail(fa.sigma.diag, report.p)
    exact = bool(rel <= exact_tol)
    if strict and not exact:
        raise NotExactError(tail, rel)
    return ConditionalFactors(
        H=h,
        M=mm,
        residual_abs=res,
        residual_rel=rel,
        exact=exact,
        report=report,
        scaling=sf,
        sigma_a=fa.sigma.diag,
        sigma_b=fb.sigma.diag,
        residual_tail=tail,
    )


def special_case(a, b, *, zero_tol=ZERO_TOL, exact_tol=EXACT_TOL, strict=False) -> SpecialFactors:
    """Solve ``A = H @ B @ H*`` for square Hermitian PSD A and positive definite B.

    Uses the eigendecompositions ``A = U_A diag(lam_A) U_A*`` and likewise for
    B, then ``H = U_A diag(sqrt(lam_A / lam_B)) U_B*``.
    """
    a = as_matrix(a, name="A")
    b = as_matrix(b, name="B")
    if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise DimensionError(f"A and B must be square, got {a.shape} and {b.shape}")
    if a.shape != b.shape:
        raise DimensionError(f"A and B must have the same size, got {a.shape} and {b.shape}")
    ea = hermitian_psd_eig(a, zero_tol)
    eb = hermitian_psd_eig(b, zero_tol)
    thr = _threshold(eb.lam, zero_tol)
    bad = np.flatnonzero(~(eb.lam > thr))
    if bad.size:
        i = int(bad[0])
        raise SingularBError(i, float(eb.lam[i]), thr)

    d = np.sqrt(ea.lam / eb.lam)
    h = (ea.U * d) @ eb.U.conj().T
    res = frobenius_norm(a - h @ b @ h.conj().T)
    rel = res / max(1.0, frobenius_norm(a))
    exact = bool(rel <= exact_tol)
    if strict and not exact:
        raise NotExactError(res, rel)
    return SpecialFactors(H=h, residual_abs=res, residual_rel=rel, exact=exact, d=d, lam_a=ea.lam, lam_b=eb.lam)


def _hermitian_check(x, herm_tol):
    prod = x @ x.conj().T
    scale = frobenius_norm(x) ** 2
    asym = frobenius_norm(prod - prod.conj().T)
    return is_hermitian(prod, herm_tol * scale if scale > 0 else herm_tol), asym


def verify_factors(a, b, h, m, tol=EXACT_TOL, herm_tol=HERMITIAN_TOL) -> VerificationReport:
    """Check externally supplied factors against ``A = H @ B @ M*``.

    ``M`` is n x l, in the same orientation :func:`conditional_svd` returns.
    The check passes when the relative residual is within ``tol`` and both
    ``H H*`` and ``M M*`` are Hermitian to ``herm_tol`` times their scale.
    """
    a = as_matrix(a, name="A")
    b = as_matrix(b, name="B")
    h = as_matrix(h, name="H")
    m = as_matrix(m, name="M")
    (mr, nc), (k, l) = a.shape, b.shape
    if h.shape != (mr, k) or m.shape != (nc, l):
        raise DimensionError(
            f"expected H {mr}x{k} and M {nc}x{l} for A {mr}x{nc} and B {k}x{l}, "
            f"got H {h.shape[0]}x{h.shape[1]} and M {m.shape[0]}x{m.shape[1]}"
        )
    res = frobenius_norm(a - h @ b @ m.conj().T)
    rel = res / max(1.0, frobenius_norm(a))
    hh_ok, hh_asym = _hermitian_check(h, herm_tol)
    mm_ok, mm_asym = _hermitian_check(m, herm_tol)
    return VerificationReport(
        residual_abs=res,
        residual_rel=rel,
        hh_hermitian=hh_ok,
        mm_hermitian=mm_ok,
        hh_asymmetry=hh_asym,
        mm_asymmetry=mm_asym,
        tol=tol,
        passed=bool(rel <= tol and hh_ok and mm_ok),
    )
