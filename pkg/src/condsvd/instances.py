"""Seeded test instances: random unitaries, decomposable pairs, PSD pairs.

Randomness comes from :class:`SplitMix64`, a fully specified 64-bit
generator, so a seed means the same stream in any language:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                 (all arithmetic mod 2**64)

Reference output for seed 1234567: 6457827717110365317,
3203168211198807973, 9817491932198370423, 4593380528125082431,
16408922859458223821.

Derived variates: ``uniform = (x >> 11) * 2**-53`` in [0, 1);
standard normals by Box-Muller, consuming two words per pair of normals:
``r = sqrt(-2 ln(1 - u1))``, ``(r cos(2 pi u2), r sin(2 pi u2))``.
A complex standard normal is ``(x + iy) / sqrt(2)`` from one such pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conditional import check_conditions, residual_tail
from .errors import InfeasibleError, InputError
from .matrix import RectDiagonal, embed

__all__ = [
    "SplitMix64",
    "GenSpec",
    "Certificate",
    "random_unitary",
    "random_decomposable",
    "random_psd_pair",
    "random_general",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


class SplitMix64:
    """Counter-based SplitMix64 stream; draws are vectorized over numpy uint64."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self, size):
        counters = np.arange(1, size + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + counters * _GOLDEN
            z = (z ^ (z >> np.uint64(30))) * _MUL1
            z = (z ^ (z >> np.uint64(27))) * _MUL2
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + size * int(_GOLDEN)) & _MASK
        return z

    def uniform(self, size):
        return (self.next_u64(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, size):
        pairs = (size + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        theta = 2.0 * np.pi * u[:, 1]
        out = np.empty((pairs, 2))
        out[:, 0] = r * np.cos(theta)
        out[:, 1] = r * np.sin(theta)
        return out.reshape(-1)[:size]

    def complex_normal(self, shape):
        """Complex standard normals with E|z|^2 = 1, filled row-major."""
        count = int(np.prod(shape))
        z = self.normal(2 * count).reshape(count, 2)
        return ((z[:, 0] + 1j * z[:, 1]) / math.sqrt(2.0)).reshape(shape)

    def log_uniform(self, lo, hi, size):
        return np.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * self.uniform(size))


def _unitary_from(rng, n):
    z = rng.complex_normal((n, n))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    # phase fix makes the distribution Haar instead of QR-convention biased
    ph = np.where(diag == 0, 1.0, diag / np.abs(np.where(diag == 0, 1.0, diag)))
    return np.ascontiguousarray(q * ph)


def random_unitary(n, seed) -> np.ndarray:
    """Haar-distributed n x n unitary, deterministic in ``(n, seed)``."""
    if n < 1:
        raise InputError("n must be positive")
    return _unitary_from(SplitMix64(seed), n)


def random_general(m, n, seed) -> np.ndarray:
    """m x n matrix of complex standard normals."""
    if m < 1 or n < 1:
        raise InputError("m and n must be positive")
    return np.ascontiguousarray(SplitMix64(seed).complex_normal((m, n)))


@dataclass(frozen=True)
class GenSpec:
    """Recipe for :func:`random_decomposable`.

    ``spectrum_b`` and ``d_spec`` are either explicit vectors of length
    ``p = min(k, l)`` or ``None`` for log-uniform draws in ``spectrum_range``
    and ``d_range``. ``tail`` holds extra singular values of A placed after
    the first p; they make the instance intentionally inexact.
    """

    dims: tuple
    seed: int = 0
    spectrum_b: tuple | None = None
    d_spec: tuple | None = None
    tail: tuple = ()
    spectrum_range: tuple = (0.5, 2.0)
    d_range: tuple = (0.5, 2.0)


@dataclass(frozen=True)
class Certificate:
    """Everything planted into a generated pair."""

    spec: GenSpec
    case: str
    p: int
    d: np.ndarray
    sigma_a: RectDiagonal
    sigma_b: RectDiagonal
    tail: tuple
    residual: float
    seed: int
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "dims": list(self.spec.dims),
            "seed": self.seed,
            "case": self.case,
            "p": self.p,
            "d": self.d.tolist(),
            "sigma_a": self.sigma_a.diag.tolist(),
            "sigma_b": self.sigma_b.diag.tolist(),
            "tail": list(self.tail),
            "residual": self.residual,
            **self.extra,
        }


def _vector(values, p, name):
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size != p:
        raise InputError(f"{name} needs {p} entries, got {v.size}")
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise InputError(f"{name} entries must be finite and positive")
    return v


def random_decomposable(spec: GenSpec):
    """Build ``(A, B, certificate)`` with a known conditional decomposition.

    B gets singular values ``sigma_B`` (p of them, descending), A gets
    ``d_i**2 * sigma_B[i]`` followed by ``spec.tail``; both are wrapped in
    independent random unitaries drawn in the order U_A, V_A, U_B, V_B.

    Tail values must sit strictly below every planted leading value so the
    planted residual equals the norm of the tail. With a random ``d`` the
    whole of ``d`` is scaled up when needed to make room; an explicit
    ``d_spec`` that collides with the tail is refused.
    """
    if len(spec.dims) != 4:
        raise InputError("dims must be (m, n, k, l)")
    m, n, k, l = (int(x) for x in spec.dims)
    if min(m, n, k, l) < 1:
        raise InputError(f"dimensions must be positive, got {spec.dims}")
    p = min(k, l)
    probe = check_conditions(m, n, k, l, np.ones(p))
    if not probe.feasible:
        raise InfeasibleError(
            f"refusing to generate {spec.dims}: " + "; ".join(probe.violations), probe
        )
    tail = tuple(float(t) for t in spec.tail)
    if tail and min(m, n) - p < len(tail):
        raise InputError(
            f"tail of {len(tail)} values needs min(m, n) >= {p + len(tail)}, got {min(m, n)}"
        )
    if any(not math.isfinite(t) or t < 0 for t in tail):
        raise InputError("tail entries must be finite and nonnegative")

    rng = SplitMix64(spec.seed)
    if spec.spectrum_b is None:
        sig_b = np.sort(rng.log_uniform(*spec.spectrum_range, p))[::-1]
    else:
        sig_b = np.sort(_vector(spec.spectrum_b, p, "spectrum_b"))[::-1]
    if spec.d_spec is None:
        d = rng.log_uniform(*spec.d_range, p)
        lead = d * d * sig_b
        if tail and lead.min() <= max(tail):
            d = d * math.sqrt(2.0 * max(tail) / lead.min())
    else:
        d = _vector(spec.d_spec, p, "d_spec")
    lead = d * d * sig_b
    if tail and lead.min() <= max(tail):
        raise InputError(
            f"tail value {max(tail):.6g} is not below the smallest planted value {lead.min():.6g}"
        )

    diag_a = np.zeros(min(m, n))
    diag_a[:p] = lead
    diag_a[p : p + len(tail)] = tail
    sigma_a = RectDiagonal(m, n, diag_a)
    sigma_b = RectDiagonal(k, l, sig_b)

    u_a = _unitary_from(rng, m)
    v_a = _unitary_from(rng, n)
    u_b = _unitary_from(rng, k)
    v_b = _unitary_from(rng, l)
    a = u_a @ embed(sigma_a) @ v_a.conj().T
    b = u_b @ embed(sigma_b) @ v_b.conj().T

    cert = Certificate(
        spec=spec,
        case=probe.case.value,
        p=p,
        d=d,
        sigma_a=sigma_a,
        sigma_b=sigma_b,
        tail=tail,
        residual=residual_tail(np.sort(diag_a)[::-1], p),
        seed=int(spec.seed),
    )
    return np.ascontiguousarray(a), np.ascontiguousarray(b), cert


def random_psd_pair(n, seed, cond_cap=1e4):
    """Return ``(A, B)`` with A = G1 G1* and B = G2 G2* + eps I.

    ``eps`` is the smallest shift that brings the condition number of B to
    at most ``cond_cap`` (zero if it already is). ``cond_cap == 1`` yields a
    multiple of the identity.
    """
    if n < 1:
        raise InputError("n must be positive")
    if not cond_cap >= 1:
        raise InputError("cond_cap must be >= 1")
    rng = SplitMix64(seed)
    g1 = rng.complex_normal((n, n))
    g2 = rng.complex_normal((n, n))
    a = g1 @ g1.conj().T
    b = g2 @ g2.conj().T
    a = 0.5 * (a + a.conj().T)
    b = 0.5 * (b + b.conj().T)
    mu = np.linalg.eigvalsh(b)
    lo, hi = max(float(mu[0]), 0.0), float(mu[-1])
    if cond_cap == 1:
        return a, np.eye(n, dtype=np.complex128) * hi
    eps = max(0.0, (hi - cond_cap * lo) / (cond_cap - 1.0))
    # margin keeps the cap after rounding in the eigenvalues
    eps = eps * (1.0 + 1e-6) + 1e-12 * hi
    return a, b + eps * np.eye(n)
