"""Finite Toeplitz sections, their determinants, and Pfaffians.

The exact side of the EFP: ``P(n) = det T_n[s_minus]``, and the same number
as the Pfaffian of the 2n x 2n skew-symmetric correlation matrix built from
the block symbol ``[[0, s_minus], [s_plus - 1, 0]]``.  Determinants and
Pfaffians are carried in log form because ``P(n)`` decays exponentially.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .symbol import NessParams, s_minus_symbol, s_plus_minus_one_symbol
from .torus import FourierWindow, fourier_window


class CoverageError(ValueError):
    """Raised when a Fourier window is too narrow for the requested section."""


class SymmetryError(ValueError):
    """Raised when a matrix lacks the symmetry an algorithm relies on."""


class NotPositiveDefiniteError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SignedLogValue:
    """``value = phase * exp(log_magnitude)``; a zero has ``log_magnitude = -inf``."""

    log_magnitude: float
    phase: complex = 1.0

    @property
    def value(self) -> complex:
        if self.log_magnitude == -math.inf:
            return 0.0
        return self.phase * math.exp(self.log_magnitude)

    @property
    def log(self) -> complex:
        return self.log_magnitude + 1j * cmath.phase(self.phase)


@dataclass(frozen=True)
class ToeplitzSection:
    n: int
    entries: np.ndarray
    source: FourierWindow | None = None


def toeplitz_section(window: FourierWindow, n: int) -> ToeplitzSection:
    """``T_n`` with ``entries[i, j] = a_{i-j}``."""
    if n < 1:
        raise ValueError("section size must be at least 1")
    if window.M < n - 1:
        raise CoverageError(f"section of size {n} needs a window radius M >= {n - 1}, got {window.M}")
    idx = np.subtract.outer(np.arange(n), np.arange(n))
    return ToeplitzSection(n, window.slice(-(n - 1), n - 1)[idx + n - 1], window)


def _check_hermitian(a: np.ndarray, rtol: float = 1e-12) -> None:
    scale = max(float(np.max(np.abs(a))), 1e-300)
    asym = float(np.max(np.abs(a - a.conj().T))) / scale
    if asym > rtol:
        raise SymmetryError(f"matrix is not Hermitian (relative asymmetry {asym:.3g})")


def cholesky_pivots(section: ToeplitzSection | np.ndarray) -> np.ndarray:
    """Pivots ``d_i`` of ``A = L D L^*``, so that ``det A_m = prod_{i<m} d_i``."""
    a = section.entries if isinstance(section, ToeplitzSection) else np.asarray(section)
    _check_hermitian(a)
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "Cholesky factorization met a nonpositive pivot; symbol outside (0, 1) or inaccurate coefficients"
        ) from exc
    return np.abs(np.diagonal(chol)) ** 2


def log_det_posdef(section: ToeplitzSection | np.ndarray) -> SignedLogValue:
    return SignedLogValue(float(np.sum(np.log(cholesky_pivots(section)))), 1.0)


@dataclass(frozen=True)
class SkewMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = self.entries
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("skew matrix must be square")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _as_skew(matrix, tol: float = 1e-12) -> np.ndarray:
    a = np.asarray(matrix.entries if isinstance(matrix, SkewMatrix) else matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("Pfaffian needs a square matrix")
    if a.shape[0] % 2:
        raise ValueError(f"Pfaffian needs even dimension, got {a.shape[0]}")
    scale = max(float(np.max(np.abs(a))) if a.size else 0.0, 1.0)
    if a.size and float(np.max(np.abs(a + a.T))) > tol * scale:
        raise SymmetryError("matrix is not skew-symmetric within tolerance")
    return a


def pfaffian(matrix) -> SignedLogValue:
    """Pfaffian by Parlett-Reid elimination with partial pivoting.

    At step ``k`` the largest entry of column ``k`` below row ``k`` is
    moved to row/column ``k+1``; each interchange flips the sign.  The
    Pfaffian is the product of the ``(k, k+1)`` pivots.
    """
    a = np.array(_as_skew(matrix), dtype=complex)
    n = a.shape[0]
    log_mag, phase = 0.0, 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1 :, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            phase = -phase
        piv = a[k, k + 1]
        if piv == 0:
            return SignedLogValue(-math.inf, 1.0)
        log_mag += math.log(abs(piv))
        phase *= piv / abs(piv)
        if k + 2 < n:
            t = a[k, k + 2 :] / piv
            col = a[k + 2 :, k + 1].copy()
            a[k + 2 :, k + 2 :] += np.outer(t, col) - np.outer(col, t)
    return SignedLogValue(log_mag, complex(phase))


def _pairings(items: tuple[int, ...]):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1 :]):
            yield ((first, partner),) + tail


def _crossings(pairs) -> int:
    count = 0
    for i, (a, b) in enumerate(pairs):
        for c, d in pairs[i + 1 :]:
            if a < c < b < d or c < a < d < b:
                count += 1
    return count


def pfaffian_bruteforce(matrix) -> complex:
    """Pairing sum with signs ``(-1)^crossings``; dimension at most 10."""
    a = _as_skew(matrix)
    n = a.shape[0]
    if n > 10:
        raise ValueError(f"brute-force Pfaffian is limited to dimension 10, got {n}")
    total = 0j
    for pairs in _pairings(tuple(range(n))):
        term = complex(-1) ** _crossings(pairs)
        for i, j in pairs:
            term *= a[i, j]
        total += term
    return total


@lru_cache(maxsize=64)
def s_minus_window(params: NessParams, M: int) -> FourierWindow:
    return fourier_window(s_minus_symbol(params), M)


@lru_cache(maxsize=64)
def s_plus_minus_one_window(params: NessParams, M: int) -> FourierWindow:
    return fourier_window(s_plus_minus_one_symbol(params), M)


@dataclass(frozen=True)
class CorrelationMatrix(SkewMatrix):
    """``Omega_n`` plus diagnostics of the raw assembly.

    ``raw_skew_defect`` is ``max|Omega + Omega^t|`` before antisymmetrizing;
    ``max_imag`` is the largest imaginary part of any entry.
    """

    raw_skew_defect: float = 0.0
    max_imag: float = 0.0


def efp_correlation_matrix(params: NessParams, n: int) -> CorrelationMatrix:
    """Block Toeplitz section ``T_n[a_P]`` of size 2n x 2n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    upper = toeplitz_section(s_minus_window(params, n - 1), n).entries
    lower = toeplitz_section(s_plus_minus_one_window(params, n - 1), n).entries
    omega = np.zeros((2 * n, 2 * n), dtype=complex)
    omega[0::2, 1::2] = upper
    omega[1::2, 0::2] = lower
    defect = float(np.max(np.abs(omega + omega.T)))
    omega = 0.5 * (omega - omega.T)
    return CorrelationMatrix(omega, defect, float(np.max(np.abs(omega.imag))))


def efp_log_probabilities(params: NessParams, ns) -> dict[int, float]:
    """``log P(n)`` for every requested n from one Cholesky factorization.

    The leading principal minors of ``T_N`` are the smaller sections, so the
    pivots of the largest one give every determinant by partial sums.
    """
    ns = sorted({int(n) for n in ns})
    if not ns or ns[0] < 1:
        raise ValueError("n must be at least 1")
    n_max = ns[-1]
    section = toeplitz_section(s_minus_window(params, n_max - 1), n_max)
    cum = np.cumsum(np.log(cholesky_pivots(section)))
    return {n: float(cum[n - 1]) for n in ns}


def efp_log_probability(params: NessParams, n: int) -> SignedLogValue:
    """``log P(n) = log det T_n[s_minus]``."""
    return SignedLogValue(efp_log_probabilities(params, [n])[n], 1.0)
