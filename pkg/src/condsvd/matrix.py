"""Dense complex matrices and the exact algebraic primitives built on them.

A ``ComplexDense`` is a 2-D, C-contiguous (row-major) ``numpy`` array of
dtype ``complex128`` with both dimensions at least one. :func:`as_matrix`
is the single gatekeeper that turns user input into that form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError

__all__ = [
    "RectDiagonal",
    "as_matrix",
    "matmul",
    "adjoint",
    "frobenius_norm",
    "is_unitary",
    "is_hermitian",
    "embed",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12


def as_matrix(a, *, name="matrix") -> np.ndarray:
    """Return ``a`` as a nonempty row-major complex128 matrix.

    Raises :class:`InputError` for anything that is not 2-D or has a zero
    dimension.
    """
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"{name} must have positive dimensions, got {arr.shape}")
    return np.ascontiguousarray(arr, dtype=np.complex128)


@dataclass(frozen=True)
class RectDiagonal:
    """Rectangular diagonal matrix stored as its shape plus leading diagonal."""

    rows: int
    cols: int
    diag: np.ndarray

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError(f"RectDiagonal needs positive dims, got {self.rows}x{self.cols}")
        d = np.asarray(self.diag, dtype=np.float64).reshape(-1)
        if d.size != min(self.rows, self.cols):
            raise DimensionError(
                f"diag has {d.size} entries, expected min({self.rows}, {self.cols})"
            )
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise InputError("diag entries must be finite and nonnegative")
        d.flags.writeable = False
        object.__setattr__(self, "diag", d)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def dense(self) -> np.ndarray:
        return embed(self)


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, name="left operand")
    b = as_matrix(b, name="right operand")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return np.ascontiguousarray(a @ b)


def adjoint(a) -> np.ndarray:
    """Conjugate transpose, returned as a fresh row-major array."""
    a = as_matrix(a)
    return np.ascontiguousarray(a.conj().T)


def frobenius_norm(a) -> float:
    a = np.asarray(a).reshape(-1)
    if a.size == 0:
        return 0.0
    # divide by the largest magnitude first so squares neither overflow nor underflow
    top = float(np.max(np.abs(a)))
    if top == 0.0 or not np.isfinite(top):
        return top
    scale = 2.0 ** np.frexp(top)[1]
    return float(scale * np.linalg.norm(a / scale))


def is_unitary(a, tol=DEFAULT_TOL) -> bool:
    """True iff ``a`` is square and ``||a a* - I||_F <= tol``."""
    if tol <= 0:
        raise InputError("tol must be positive")
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    gram = a @ a.conj().T
    return frobenius_norm(gram - np.eye(a.shape[0])) <= tol


def is_hermitian(a, tol=DEFAULT_TOL) -> bool:
    """True iff ``a`` is square and ``||a - a*||_F <= tol``."""
    if tol <= 0:
        raise InputError("tol must be positive")
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return frobenius_norm(a - a.conj().T) <= tol


def embed(s: RectDiagonal) -> np.ndarray:
    """Materialize a :class:`RectDiagonal` as a dense complex matrix."""
    out = np.zeros((s.rows, s.cols), dtype=np.complex128)
    idx = np.arange(s.diag.size)
    out[idx, idx] = s.diag
    return out
