"""Constants of the Fisher-Hartwig asymptotics for Toeplitz determinants.

For ``a = b * prod_j |t - t_j|^{2 alpha_j} phi_{beta_j, t_j}`` one has

    log det T_n[a] ~ n log G(b) + Q log n + log F(a).

Everything is assembled in log form.  Powers ``b_pm(t_j)^gamma`` are taken
as ``exp(gamma * log b_pm(t_j))`` with the logarithm given by its defining
series, which keeps them consistent with the chosen ``log b``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .symbol import DomainError, NessParams, TorusSymbol, jump_phases, regularized_torus_symbol, tau
from .torus import LogSymbolSeries, log_symbol_series, winding_number, check_nonvanishing

EULER_GAMMA = 0.57721566490153286061
BARNES_RADIUS = 8.0
DEFAULT_LOG_RADIUS = 512


class BranchError(ArithmeticError):
    """Raised when a complex power base sits on the principal branch cut."""


class PrecisionError(ArithmeticError):
    pass


def log_barnes_g(z: complex) -> complex:
    """``log G(z)`` from the Weierstrass product of the Barnes G-function.

    With ``w = z - 1``,

        G(1 + w) = (2pi)^{w/2} exp(-(w + (1 + gamma) w^2)/2)
                   prod_{n>=1} (1 + w/n)^n exp(-w + w^2/(2n)).

    The first ``N`` factors are summed directly.  For ``n > N`` the log
    factor expands as ``sum_{m>=3} (-1)^{m+1} w^m / (m n^{m-1})``; its tail
    is summed exactly with Hurwitz zeta values.
    """
    z = complex(z)
    if abs(z) > BARNES_RADIUS:
        raise DomainError(f"|z| = {abs(z):.3g} outside the supported disk |z| <= {BARNES_RADIUS}")
    w = z - 1.0
    if w.imag == 0 and w.real <= -1 and w.real == round(w.real):
        return complex(-math.inf)
    N = max(64, int(math.ceil(8 * abs(w))))
    n = np.arange(1, N + 1, dtype=float)
    terms = n * np.log(1.0 + w / n) - w + w * w / (2 * n)
    total = complex(np.sum(terms))
    # tail: ratio |w|/N <= 1/8, so 40 orders reach double precision
    for m in range(3, 40):
        total += (-1) ** (m + 1) * w**m / m * float(zeta(m - 1, N + 1))
    return 0.5 * w * math.log(2 * math.pi) - 0.5 * (w + (1 + EULER_GAMMA) * w * w) + total


def barnes_g(z: complex) -> complex:
    lg = log_barnes_g(z)
    if lg.real == -math.inf:
        return 0j
    return cmath.exp(lg)


def szego_constant(logs: LogSymbolSeries) -> complex:
    """``G(b) = exp((log b)_0)``."""
    return cmath.exp(logs[0])


def power_exponent(singular_points) -> complex:
    """``Q = sum_j (alpha_j^2 - beta_j^2)`` over ``(t_j, alpha_j, beta_j)``."""
    return sum((complex(a) ** 2 - complex(b) ** 2 for _, a, b in singular_points), 0j)


@dataclass(frozen=True)
class StrongSzego:
    log_E: complex
    tail_bound: float


def log_e_of_b(logs: LogSymbolSeries) -> StrongSzego:
    """``log E(b) = sum_{l>=1} l (log b)_l (log b)_{-l}``.

    The tail beyond ``L`` is bounded by fitting the last octave of terms to
    a power law ``C l^{-p}`` and integrating it.
    """
    if logs.L < 64:
        raise ValueError(f"log series radius must be at least 64, got {logs.L}")
    l = np.arange(1, logs.L + 1)
    terms = l * logs.positive() * logs.negative()
    mags = np.abs(terms)
    tail = _power_tail(l, mags)
    if not math.isfinite(tail):
        raise PrecisionError("E(b) series does not show a convergent tail")
    return StrongSzego(complex(np.sum(terms)), tail)


def _power_tail(l: np.ndarray, mags: np.ndarray) -> float:
    lo = len(l) // 2
    sel = mags[lo:] > 0
    if not np.any(sel):
        return 0.0
    ll, mm = l[lo:][sel], mags[lo:][sel]
    # envelope of the last octave
    p = -np.polyfit(np.log(ll), np.log(np.maximum.accumulate(mm[::-1])[::-1]), 1)[0]
    if p <= 1.0:
        return math.inf
    c = float(mm.max()) * float(ll[np.argmax(mm)]) ** p
    L = float(l[-1])
    return c * L ** (1 - p) / (p - 1)


def e_of_b(logs: LogSymbolSeries) -> complex:
    return cmath.exp(log_e_of_b(logs).log_E)


def log_b_plus_minus(logs: LogSymbolSeries, t_j: complex) -> tuple[complex, complex]:
    """``(log b_+(t_j), log b_-(t_j))`` from the truncated series."""
    t_j = complex(t_j)
    if abs(abs(t_j) - 1.0) > 1e-12:
        raise DomainError("t_j must lie on the unit circle")
    l = np.arange(1, logs.L + 1)
    powers = t_j**l
    return complex(np.sum(logs.positive() * powers)), complex(np.sum(logs.negative() / powers))


def b_plus_minus(logs: LogSymbolSeries, t_j: complex) -> tuple[complex, complex]:
    lp, lm = log_b_plus_minus(logs, t_j)
    return cmath.exp(lp), cmath.exp(lm)


@dataclass(frozen=True)
class SingularPoint:
    t: complex
    alpha: complex = 0j
    beta: complex = 0j


@dataclass(frozen=True)
class FHSymbolData:
    regular_part: TorusSymbol
    singular_points: tuple[SingularPoint, ...]

    def validate(self) -> None:
        ts = [p.t for p in self.singular_points]
        for i in range(len(ts)):
            for j in range(i):
                if abs(ts[i] - ts[j]) < 1e-12:
                    raise DomainError("singular points must be pairwise distinct")
        for p in self.singular_points:
            if abs(p.alpha.real) >= 0.5 or abs(p.beta.real) >= 0.5:
                raise DomainError(f"|Re alpha|, |Re beta| must be below 1/2 (alpha={p.alpha}, beta={p.beta})")
        check_nonvanishing(self.regular_part)
        if winding_number(self.regular_part) != 0:
            raise DomainError("regular part must have winding number zero")


@dataclass(frozen=True)
class AsymptoticConstants:
    log_G: complex
    Q: complex
    log_F: complex
    log_E: complex
    log_b_plus: dict = field(default_factory=dict)
    log_b_minus: dict = field(default_factory=dict)
    log_barnes: dict = field(default_factory=dict)
    log_cross: complex = 0j
    e_tail_bound: float = 0.0

    @property
    def G(self) -> complex:
        return cmath.exp(self.log_G)

    @property
    def F(self) -> complex:
        return cmath.exp(self.log_F)


def log_barnes_factor(alpha: complex, beta: complex) -> complex:
    """``log[G(1+alpha+beta) G(1+alpha-beta) / G(1+2alpha)]``."""
    return log_barnes_g(1 + alpha + beta) + log_barnes_g(1 + alpha - beta) - log_barnes_g(1 + 2 * alpha)


def _principal_log(base: complex) -> complex:
    if abs(base) < 1e-13 or (base.real < 0 and abs(base.imag) <= 1e-13 * max(1.0, abs(base))):
        raise BranchError(f"power base {base} lies on the branch cut of the principal logarithm")
    return cmath.log(base)


def fh_constant(data: FHSymbolData, logs: LogSymbolSeries, validate: bool = True) -> AsymptoticConstants:
    """Assemble ``G(b)``, ``Q`` and ``F(a)`` with every sub-factor."""
    if validate:
        data.validate()
    e = log_e_of_b(logs)
    log_F = e.log_E
    lbp, lbm, lbar = {}, {}, {}
    for p in data.singular_points:
        lp, lm = log_b_plus_minus(logs, p.t)
        lbp[p.t], lbm[p.t] = lp, lm
        log_F += -(p.alpha - p.beta) * lp - (p.alpha + p.beta) * lm
        lbar[p.t] = log_barnes_factor(p.alpha, p.beta)
        log_F += lbar[p.t]
    cross = 0j
    pts = data.singular_points
    for i, pi in enumerate(pts):
        for j, pj in enumerate(pts):
            if i != j:
                cross += -(pi.alpha - pi.beta) * (pj.alpha + pj.beta) * _principal_log(1 - pi.t / pj.t)
    log_F += cross
    return AsymptoticConstants(
        log_G=logs[0],
        Q=power_exponent((p.t, p.alpha, p.beta) for p in pts),
        log_F=log_F,
        log_E=e.log_E,
        log_b_plus=lbp,
        log_b_minus=lbm,
        log_barnes=lbar,
        log_cross=cross,
        e_tail_bound=e.tail_bound,
    )


def fh_log_asymptote(constants: AsymptoticConstants, n: int | np.ndarray):
    """``n log G + Q log n + log F``; real part only."""
    n = np.asarray(n, dtype=float)
    val = n * constants.log_G + constants.Q * np.log(n) + constants.log_F
    return np.real(val)


# --- NESS specialization -------------------------------------------------


def ness_symbol_data(params: NessParams) -> FHSymbolData:
    b1, b2 = jump_phases(params)
    return FHSymbolData(
        regular_part=regularized_torus_symbol(params),
        singular_points=(SingularPoint(1.0 + 0j, 0j, b1), SingularPoint(-1.0 + 0j, 0j, b2)),
    )


def ness_log_series(params: NessParams, L: int = DEFAULT_LOG_RADIUS) -> LogSymbolSeries:
    return log_symbol_series(regularized_torus_symbol(params), L)


def ness_constants(params: NessParams, L: int = DEFAULT_LOG_RADIUS) -> AsymptoticConstants:
    """Constants for ``P(n) ~ G(b_P)^n n^{Q_P} F(s_minus)``."""
    data = ness_symbol_data(params)
    return fh_constant(data, ness_log_series(params, L))


def ness_log_F_direct(params: NessParams, logs: LogSymbolSeries) -> complex:
    """``log F(s_minus)`` in the specialized product form.

    ``E(b_P) 2^{2 b1 b2} prod_j (b_+(t_j)/b_-(t_j))^{b_j} prod_j G(1+b_j) G(1-b_j)``,
    used as a second path against the general assembly.
    """
    b1, b2 = jump_phases(params)
    out = log_e_of_b(logs).log_E + 2 * b1 * b2 * math.log(2.0)
    for t, b in ((1.0, b1), (-1.0, b2)):
        lp, lm = log_b_plus_minus(logs, t)
        out += b * (lp - lm)
        out += log_barnes_g(1 + b) + log_barnes_g(1 - b)
    return out


def ness_Q(params: NessParams) -> float:
    """``Q_P = (1/4pi^2) sum_j log(tau_R(t_j)/tau_L(t_j))^2``."""
    s = 0.0
    for k in (0.0, math.pi):
        r = math.log(float(tau(params, "R", k))) - math.log(float(tau(params, "L", k)))
        s += r * r
    return s / (4 * math.pi**2)


def ness_log_G_integral(params: NessParams, nodes: int = 4096) -> float:
    """``(1/2) sum_a int log tau_a dk/2pi`` by Gauss-Legendre on [0, pi].

    ``log tau_a`` is even and smooth, so a half-circle rule suffices.
    """
    x, w = np.polynomial.legendre.leggauss(64)
    edges = np.linspace(0.0, math.pi, nodes // 64 + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        k = 0.5 * (a + b) + 0.5 * (b - a) * x
        vals = np.log(tau(params, "L", k)) + np.log(tau(params, "R", k))
        total += 0.5 * (b - a) * float(np.dot(w, vals))
    # (1/2) * 2 * int_0^pi (...) dk / 2pi
    return total / (2 * math.pi)
