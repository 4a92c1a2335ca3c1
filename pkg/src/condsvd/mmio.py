"""Matrix Market array-format reader and writer.

Only the dense ``array`` layout is supported. The writer always emits
``complex general`` with 17 significant digits, which round-trips every
double exactly. The reader also accepts ``real`` and ``integer`` fields and
the ``symmetric``, ``skew-symmetric`` and ``hermitian`` symmetries that
other tools produce.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import CondSvdError
from .matrix import as_matrix

__all__ = [
    "MatrixFileError",
    "HeaderError",
    "CountError",
    "ValueParseError",
    "NonFiniteError",
    "read_matrix",
    "write_matrix",
]

_FIELDS = ("real", "complex", "integer")
_SYMMETRIES = ("general", "symmetric", "skew-symmetric", "hermitian")


class MatrixFileError(CondSvdError, ValueError):
    """Malformed Matrix Market file; ``line`` is 1-based or ``None``."""

    def __init__(self, path, line, message):
        where = f"{path}:{line}" if line is not None else f"{path}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class HeaderError(MatrixFileError):
    pass


class CountError(MatrixFileError):
    pass


class ValueParseError(MatrixFileError):
    pass


class NonFiniteError(MatrixFileError):
    pass


def _parse_header(path, line):
    parts = line.split()
    if len(parts) != 5 or parts[0] != "%%MatrixMarket":
        raise HeaderError(path, 1, f"expected '%%MatrixMarket matrix array <field> <symmetry>', got {line.strip()!r}")
    obj, fmt, fld, sym = (p.lower() for p in parts[1:])
    if obj != "matrix":
        raise HeaderError(path, 1, f"unsupported object {obj!r}")
    if fmt != "array":
        raise HeaderError(path, 1, f"unsupported format {fmt!r}; only 'array' is read")
    if fld not in _FIELDS:
        raise HeaderError(path, 1, f"unsupported field {fld!r}")
    if sym not in _SYMMETRIES:
        raise HeaderError(path, 1, f"unsupported symmetry {sym!r}")
    if sym == "hermitian" and fld != "complex":
        raise HeaderError(path, 1, "hermitian symmetry requires a complex field")
    return fld, sym


def _stored_positions(rows, cols, sym):
    """(i, j) positions in file order for the given symmetry."""
    if sym == "general":
        return [(i, j) for j in range(cols) for i in range(rows)]
    start = 1 if sym == "skew-symmetric" else 0
    return [(i, j) for j in range(cols) for i in range(j + start, rows)]


def read_matrix(path) -> np.ndarray:
    """Read a Matrix Market array file into a complex128 matrix.

    Raises
    ------
    FileNotFoundError
        ``path`` does not exist.
    HeaderError, CountError, ValueParseError, NonFiniteError
        Malformed content; each carries the offending line number.
    """
    path = os.fspath(path)
    with open(path, encoding="ascii", errors="replace") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise HeaderError(path, 1, "empty file")
    fld, sym = _parse_header(path, lines[0])
    width = 2 if fld == "complex" else 1

    body = [
        (no, text)
        for no, text in enumerate(lines[1:], start=2)
        if text.strip() and not text.lstrip().startswith("%")
    ]
    if not body:
        raise CountError(path, len(lines), "missing size line")
    size_no, size_text = body[0]
    try:
        rows, cols = (int(t) for t in size_text.split())
    except ValueError:
        raise HeaderError(path, size_no, f"expected 'rows cols', got {size_text.strip()!r}") from None
    if rows < 1 or cols < 1:
        raise HeaderError(path, size_no, f"dimensions must be positive, got {rows}x{cols}")
    if sym != "general" and rows != cols:
        raise HeaderError(path, size_no, f"{sym} matrix must be square, got {rows}x{cols}")

    positions = _stored_positions(rows, cols, sym)
    values = body[1:]
    if len(values) != len(positions):
        last = values[-1][0] if values else size_no
        raise CountError(
            path, last, f"expected {len(positions)} values for {rows}x{cols} {sym}, found {len(values)}"
        )

    out = np.zeros((rows, cols), dtype=np.complex128)
    for (i, j), (no, text) in zip(positions, values):
        toks = text.split()
        if len(toks) != width:
            raise ValueParseError(path, no, f"expected {width} number(s) per line, got {len(toks)}")
        try:
            nums = [float(t) for t in toks]
        except ValueError:
            raise ValueParseError(path, no, f"cannot parse {text.strip()!r}") from None
        if not all(math.isfinite(x) for x in nums):
            raise NonFiniteError(path, no, f"non-finite value {text.strip()!r}")
        z = complex(nums[0], nums[1] if width == 2 else 0.0)
        out[i, j] = z
        if i != j:
            if sym == "symmetric":
                out[j, i] = z
            elif sym == "skew-symmetric":
                out[j, i] = -z
            elif sym == "hermitian":
                out[j, i] = z.conjugate()
    return out


def _fmt(x):
    return format(float(x), ".17g")


def write_matrix(path, a) -> None:
    """Write ``a`` as ``matrix array complex general``, column-major."""
    a = as_matrix(a)
    rows, cols = a.shape
    lines = ["%%MatrixMarket matrix array complex general", f"{rows} {cols}"]
    for z in a.T.reshape(-1):
        lines.append(f"{_fmt(z.real)} {_fmt(z.imag)}")
    with open(os.fspath(path), "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
