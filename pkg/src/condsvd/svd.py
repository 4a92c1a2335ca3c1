"""Full SVD by one-sided Jacobi, plus a Hermitian PSD eigendecomposition.

The SVD returns square unitary ``U`` and ``V`` regardless of shape or rank:
columns past the numerical rank are completed to an orthonormal basis.

Determinism convention (only residual and invariant checks may rely on it):

* singular values sorted descending, ties kept in original column order;
* each left singular vector is rotated so its largest-magnitude entry is
  real and positive (the matching right vector gets the same phase).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, InputError, NotHermitianError, NotPSDError
from .matrix import RectDiagonal, as_matrix, embed, frobenius_norm, is_hermitian

__all__ = [
    "SvdFactors",
    "HermitianEig",
    "full_svd",
    "hermitian_psd_eig",
    "reconstruct",
    "singular_values",
    "JACOBI_TOL",
    "MAX_SWEEPS",
]

JACOBI_TOL = 1e-14
MAX_SWEEPS = 60

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class SvdFactors:
    U: np.ndarray
    sigma: RectDiagonal
    V: np.ndarray
    sweeps: int = 0

    @property
    def shape(self):
        return self.sigma.shape


@dataclass(frozen=True)
class HermitianEig:
    U: np.ndarray
    lam: np.ndarray


def _round_robin(n):
    """Yield ``n - 1`` (or ``n`` for odd n) rounds of disjoint index pairs.

    Classic circle-method tournament; every pair appears exactly once per
    sweep. A dummy slot ``n`` pads odd sizes and is dropped from the output.
    """
    players = list(range(n)) + ([n] if n % 2 else [])
    size = len(players)
    for _ in range(size - 1):
        left = players[: size // 2]
        right = players[size // 2 :][::-1]
        pairs = [(min(a, b), max(a, b)) for a, b in zip(left, right) if a != n and b != n]
        if pairs:
            p, q = map(np.array, zip(*pairs))
            yield p, q
        players = [players[0], players[-1]] + players[1:-1]


def _jacobi_tall(a, tol, max_sweeps):
    """Orthogonalize the columns of a tall matrix in place.

    Returns ``(W, V, sweeps)`` with ``W = a @ V`` having mutually orthogonal
    columns and ``V`` unitary.
    """
    m, n = a.shape
    w = np.array(a, dtype=np.complex128, order="F")
    v = np.eye(n, dtype=np.complex128, order="F")
    # columns at or below this norm are numerically zero and never rotated
    floor = max(m, n) * _EPS * frobenius_norm(a)
    floor2 = floor * floor
    rounds = list(_round_robin(n))

    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p, q in rounds:
            wp = w[:, p]
            wq = w[:, q]
            alpha = np.einsum("ij,ij->j", wp.conj(), wp).real
            beta = np.einsum("ij,ij->j", wq.conj(), wq).real
            gamma = np.einsum("ij,ij->j", wp.conj(), wq)
            g = np.abs(gamma)
            mask = (g > tol * np.sqrt(alpha * beta)) & (np.minimum(alpha, beta) > floor2)
            if not mask.any():
                continue
            rotated = True
            p, q = p[mask], q[mask]
            wp, wq = wp[:, mask], wq[:, mask]
            alpha, beta, gamma, g = alpha[mask], beta[mask], gamma[mask], g[mask]

            phase = gamma / g
            zeta = (beta - alpha) / (2.0 * g)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = 1.0 / np.hypot(1.0, t)
            s = c * t

            wq_ph = wq * phase.conj()
            w[:, p] = c * wp - s * wq_ph
            w[:, q] = s * wp + c * wq_ph

            vp = v[:, p]
            vq_ph = v[:, q] * phase.conj()
            v[:, p] = c * vp - s * vq_ph
            v[:, q] = s * vp + c * vq_ph
        if not rotated:
            return w, v, sweep
    raise ConvergenceError(f"one-sided Jacobi did not converge in {max_sweeps} sweeps")


def _complete_basis(cols, m):
    """Extend the orthonormal columns ``cols`` (m x r) to an m x m unitary.

    New vectors come from the standard basis, each time taking the candidate
    with the largest component orthogonal to the current span (lowest index on
    ties), orthogonalized twice by classical Gram-Schmidt.
    """
    basis = [c for c in cols.T]
    remaining = list(range(m))
    while len(basis) < m:
        q = np.array(basis).T if basis else np.zeros((m, 0), dtype=np.complex128)
        best, best_norm, best_vec = None, -1.0, None
        for idx in remaining:
            x = np.zeros(m, dtype=np.complex128)
            x[idx] = 1.0
            for _ in range(2):
                x = x - q @ (q.conj().T @ x)
            nrm = np.linalg.norm(x)
            if nrm > best_norm + 1e-12:
                best, best_norm, best_vec = idx, nrm, x
        remaining.remove(best)
        basis.append(best_vec / best_norm)
    return np.array(basis).T


def _phase_of_max(x):
    k = int(np.argmax(np.abs(x)))
    z = x[k]
    return z / abs(z) if z != 0 else 1.0


def _fix_phases(u, v, rank):
    """Apply the phase convention in place; ``rank`` leading pairs are coupled."""
    for j in range(u.shape[1]):
        ph = _phase_of_max(u[:, j]).conjugate()
        u[:, j] *= ph
        if j < rank:
            v[:, j] *= ph
    for j in range(rank, v.shape[1]):
        v[:, j] *= _phase_of_max(v[:, j]).conjugate()


def _svd_tall(a, tol, max_sweeps):
    m, n = a.shape
    w, v, sweeps = _jacobi_tall(a, tol, max_sweeps)
    sig = np.linalg.norm(w, axis=0)
    order = np.argsort(-sig, kind="stable")
    sig = sig[order]
    w = w[:, order]
    v = v[:, order]

    # sig is descending, so the numerically nonzero columns form a prefix
    floor = max(m, n) * _EPS * frobenius_norm(a)
    rank = int(np.count_nonzero(sig > floor))
    u = _complete_basis(w[:, :rank] / sig[:rank], m)
    _fix_phases(u, v, rank)
    return u, sig, v, rank, sweeps


def full_svd(a, *, tol=JACOBI_TOL, max_sweeps=MAX_SWEEPS) -> SvdFactors:
    """Full singular value decomposition ``a = U @ embed(sigma) @ V*``.

    Parameters
    ----------
    a : array_like, shape (m, n)
        Finite complex (or real) matrix.
    tol : float
        Relative off-diagonal threshold below which a column pair is treated
        as orthogonal.
    max_sweeps : int
        Sweep cap; exceeding it raises :class:`ConvergenceError`.

    Returns
    -------
    SvdFactors
        ``U`` is m x m unitary, ``V`` is n x n unitary and ``sigma`` holds the
        ``min(m, n)`` singular values in descending order.
    """
    a = as_matrix(a, name="A")
    if not np.all(np.isfinite(a)):
        raise InputError("A has non-finite entries")
    m, n = a.shape
    # work on a unit-scaled copy so column norms squared stay in range
    top = float(np.max(np.abs(a)))
    top = 2.0 ** np.frexp(top)[1] if top > 0 else 0.0  # power of two: scaling is exact
    scaled = a / top if top > 0 else a
    if m >= n:
        u, sig, v, _, sweeps = _svd_tall(scaled, tol, max_sweeps)
    else:
        v, sig, u, rank, sweeps = _svd_tall(scaled.conj().T, tol, max_sweeps)
        # convention is defined on the left vectors of A, not of A*
        _fix_phases(u, v, rank)
    if top > 0:
        sig = sig * top
    return SvdFactors(
        U=np.ascontiguousarray(u),
        sigma=RectDiagonal(m, n, sig),
        V=np.ascontiguousarray(v),
        sweeps=sweeps,
    )


def singular_values(a, **kwargs) -> np.ndarray:
    return full_svd(a, **kwargs).sigma.diag


def reconstruct(f: SvdFactors) -> np.ndarray:
    """Return ``U @ embed(sigma) @ V*``."""
    m, n = f.sigma.shape
    if f.U.shape != (m, m) or f.V.shape != (n, n):
        raise DimensionError(
            f"inconsistent factors: U {f.U.shape}, sigma {m}x{n}, V {f.V.shape}"
        )
    return f.U @ embed(f.sigma) @ f.V.conj().T


def hermitian_psd_eig(a, tol=1e-12) -> HermitianEig:
    """Eigendecomposition ``a = U diag(lam) U*`` of a Hermitian PSD matrix.

    Eigenvalues come back descending. Values in ``[-tol*||a||, 0)`` are
    clamped to zero; anything more negative is reported as not PSD.
    """
    a = as_matrix(a, name="A")
    if a.shape[0] != a.shape[1]:
        raise InputError(f"A must be square, got {a.shape[0]}x{a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise InputError("A has non-finite entries")
    scale = frobenius_norm(a)
    bound = tol * scale if scale > 0 else tol
    if not is_hermitian(a, bound):
        raise NotHermitianError(
            f"A is not Hermitian within {bound:.3g} (||A - A*|| = {frobenius_norm(a - a.conj().T):.3g})"
        )
    lam, u = np.linalg.eigh(0.5 * (a + a.conj().T))
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    u = u[:, order]
    if lam.size and lam[-1] < -bound:
        raise NotPSDError(f"A is not positive semidefinite: eigenvalue {lam[-1]:.6g} < -{bound:.3g}")
    lam = np.where(lam < 0, 0.0, lam)
    for j in range(u.shape[1]):
        u[:, j] *= _phase_of_max(u[:, j]).conjugate()
    return HermitianEig(U=np.ascontiguousarray(u), lam=lam)
