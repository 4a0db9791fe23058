"""Symbols of the isotropic XY chain in its nonequilibrium steady state.

The two reservoirs enter through the Fermi-type functions

    tau_a(k) = (1 - tanh[beta_a (lambda + cos k) / 2]) / 2,   a = L, R,

and the EFP symbol ``s_minus`` equals ``tau_L`` on the upper half circle
(``0 <= k <= pi``) and ``tau_R`` on the lower one.  Out of equilibrium it
jumps at ``t1 = 1`` (k = 0) and ``t2 = -1`` (k = pi).  Dividing both jumps
out leaves the continuous, positive regularized symbol ``b_P``.

Angles are radians in ``(-pi, pi]``; everything here is vectorised over
numpy arrays of angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.special import expit

Side = Literal["L", "R"]
Branch = Literal["+", "-"]

TWO_PI = 2.0 * math.pi

# A jump is kept only when |log(left/right)| exceeds this.
JUMP_THRESHOLD = 1e-13
# Pointwise identities are not evaluated closer than this to a jump.
EXCLUSION_RADIUS = 1e-8


class ParameterError(ValueError):
    """Raised for physical inputs outside ``0 < beta_L <= beta_R < inf``."""


class SingularSymbolError(ValueError):
    """Raised when a one-sided limit of a symbol vanishes."""


class DomainError(ValueError):
    """Raised when an operation is requested outside its domain."""


@dataclass(frozen=True)
class NessParams:
    beta_L: float
    beta_R: float
    lam: float

    @property
    def beta(self) -> float:
        return 0.5 * (self.beta_R + self.beta_L)

    @property
    def delta(self) -> float:
        return 0.5 * (self.beta_R - self.beta_L)

    def beta_of(self, side: Side) -> float:
        if side == "L":
            return self.beta_L
        if side == "R":
            return self.beta_R
        raise ValueError(f"unknown reservoir side {side!r}")


def make_params(beta_L: float, beta_R: float, lam: float) -> NessParams:
    """Validate and bundle the reservoir temperatures and the field."""
    beta_L, beta_R, lam = float(beta_L), float(beta_R), float(lam)
    if not math.isfinite(beta_L) or beta_L <= 0.0:
        raise ParameterError(f"beta_L must satisfy 0 < beta_L, got {beta_L}")
    if not math.isfinite(beta_R) or beta_R < beta_L:
        raise ParameterError(
            f"beta_R must satisfy beta_L <= beta_R < inf, got beta_L={beta_L}, beta_R={beta_R}"
        )
    if not math.isfinite(lam):
        raise ParameterError(f"lambda must be finite, got {lam}")
    return NessParams(beta_L, beta_R, lam)


def sign(x):
    """Sign with ``sign(0) = +1``."""
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


def wrap_angle(k):
    """Map angles into ``(-pi, pi]``."""
    k = np.asarray(k, dtype=float)
    w = np.mod(k + np.pi, TWO_PI) - np.pi
    return np.where(w == -np.pi, np.pi, w)


# (1 -+ tanh(x/2)) / 2 == expit(-+x); the logistic form keeps full relative
# precision when the value is close to 0.
def _fermi_minus(beta_a, lam, k):
    return expit(-beta_a * (lam + np.cos(k)))


def _fermi_plus(beta_a, lam, k):
    return expit(beta_a * (lam + np.cos(k)))


def tau(params: NessParams, side: Side, k):
    return _fermi_minus(params.beta_of(side), params.lam, k)


def tau_tilde(params: NessParams, side: Side, k):
    """Complement ``1 - tau``, evaluated without cancellation."""
    return _fermi_plus(params.beta_of(side), params.lam, k)


def rho(params: NessParams, branch: Branch, k):
    k = np.asarray(k, dtype=float)
    s = 1.0 if branch == "+" else -1.0
    eff = params.beta + s * sign(np.sin(k)) * params.delta
    return np.tanh(0.5 * eff * (params.lam + np.cos(k)))


def s_hat(params: NessParams, branch: Branch, k):
    """Momentum-space density ``(1 +- rho_+-) / 2``.

    Written as ``tau``/``tau_tilde`` of the effective inverse temperature so
    that values near 0 or 1 keep full relative precision.
    """
    k = np.asarray(k, dtype=float)
    s = 1.0 if branch == "+" else -1.0
    eff = params.beta + s * sign(np.sin(k)) * params.delta
    if branch == "+":
        return _fermi_plus(eff, params.lam, k)
    return _fermi_minus(eff, params.lam, k)


@dataclass(frozen=True)
class JumpDatum:
    k: float
    beta: complex

    @property
    def t(self) -> complex:
        return complex(math.cos(self.k), math.sin(self.k))


def jump_phase(left_limit: complex, right_limit: complex) -> complex:
    """Jump phase with ``exp(2 pi i beta) = left / right``.

    The real part comes from the principal argument in ``(-pi, pi]``.
    """
    left, right = complex(left_limit), complex(right_limit)
    if left == 0 or right == 0:
        raise SingularSymbolError("one-sided limit of the symbol vanishes")
    ratio = left / right
    arg = math.atan2(ratio.imag, ratio.real)
    if arg == -math.pi:
        arg = math.pi
    return complex(arg / TWO_PI, -math.log(abs(ratio)) / TWO_PI)


def one_sided_limits(params: NessParams, j: int) -> tuple[float, float]:
    """``(s_minus(t_j - 0), s_minus(t_j + 0))`` for ``t1 = 1``, ``t2 = -1``.

    Approaching t1 from below means coming from the lower half circle (tau_R);
    approaching t2 from below means k -> pi^- on the upper half (tau_L).
    """
    if j == 1:
        return float(tau(params, "R", 0.0)), float(tau(params, "L", 0.0))
    if j == 2:
        return float(tau(params, "L", np.pi)), float(tau(params, "R", np.pi))
    raise ValueError(f"jump index must be 1 or 2, got {j}")


def _log_jump_ratio(params: NessParams, j: int) -> float:
    k = 0.0 if j == 1 else np.pi
    # log(tau_R/tau_L) at t_j, computed from the tanh form
    return math.log(float(tau(params, "R", k))) - math.log(float(tau(params, "L", k)))


def jump_phases(params: NessParams) -> tuple[complex, complex]:
    """Pure jump phases ``(beta_1, beta_2)``; both are purely imaginary."""
    beta1 = complex(0.0, -_log_jump_ratio(params, 1) / TWO_PI)
    beta2 = complex(0.0, _log_jump_ratio(params, 2) / TWO_PI)
    return beta1, beta2


def jump_set(params: NessParams) -> list[float]:
    """Angles at which ``s_minus`` actually jumps."""
    out = []
    for j, k in ((1, 0.0), (2, math.pi)):
        if abs(_log_jump_ratio(params, j)) > JUMP_THRESHOLD:
            out.append(k)
    return out


def jump_data(params: NessParams) -> list[JumpDatum]:
    b1, b2 = jump_phases(params)
    return [JumpDatum(0.0, b1), JumpDatum(math.pi, b2)]


def pure_jump_symbol(beta0: complex, t0: complex, t):
    """``exp(i beta0 arg(-t/t0))`` with the principal argument."""
    t = np.asarray(t, dtype=complex)
    z = -t / t0
    arg = np.angle(z)
    arg = np.where(arg == -np.pi, np.pi, arg)
    return np.exp(1j * beta0 * arg)


def _log_prefactor_base(params: NessParams) -> float:
    """``log(tau_L(t1) tau_R(t2) / (tau_R(t1) tau_L(t2)))``."""
    return -_log_jump_ratio(params, 1) + _log_jump_ratio(params, 2)


def regularized_symbol(params: NessParams, k):
    k = wrap_angle(k)
    c = _log_prefactor_base(params)
    half = 0.5 * _log_jump_ratio(params, 1)  # log sqrt(tau_R(t1)/tau_L(t1))
    upper = k >= 0.0
    k_up = np.where(upper, k, 0.0)
    k_lo = np.where(upper, 0.0, k)
    val_up = np.exp(c * k_up / TWO_PI + half) * tau(params, "L", k_up)
    val_lo = np.exp(c * k_lo / TWO_PI - half) * tau(params, "R", k_lo)
    return np.where(upper, val_up, val_lo)


def factorization_residual(params: NessParams, k):
    """``|s_minus - b_P phi_1 phi_2|`` away from the jumps."""
    k = wrap_angle(k)
    dist = np.minimum(np.abs(k), np.pi - np.abs(k))
    if np.any(dist <= EXCLUSION_RADIUS):
        raise DomainError(
            f"angle within {EXCLUSION_RADIUS} of a jump point; the pointwise identity is not evaluated there"
        )
    b1, b2 = jump_phases(params)
    t = np.exp(1j * k)
    rhs = regularized_symbol(params, k) * pure_jump_symbol(b1, 1.0, t) * pure_jump_symbol(b2, -1.0, t)
    return np.abs(s_hat(params, "-", k) - rhs)


def regularized_symbol_derivative(params: NessParams, k):
    """Closed-form ``d b_P / dk``; continuous on the whole circle."""
    k = wrap_angle(k)
    g0 = _log_prefactor_base(params) / TWO_PI
    b = regularized_symbol(params, k)
    upper = k >= 0.0
    term = np.where(
        upper,
        params.beta_L * tau_tilde(params, "L", k),
        params.beta_R * tau_tilde(params, "R", k),
    )
    return b * (g0 + term * np.sin(k))


def regularized_symbol_second_derivative(params: NessParams, k):
    """``d^2 b_P / dk^2`` off the kink points; upper formula taken at k = 0, pi."""
    k = wrap_angle(k)
    g0 = _log_prefactor_base(params) / TWO_PI
    b = regularized_symbol(params, k)
    upper = k >= 0.0
    beta_a = np.where(upper, params.beta_L, params.beta_R)
    tt = np.where(upper, tau_tilde(params, "L", k), tau_tilde(params, "R", k))
    tm = np.where(upper, tau(params, "L", k), tau(params, "R", k))
    g = g0 + beta_a * tt * np.sin(k)
    # d/dk [beta tilde_tau sin k] with tilde_tau' = -beta sin k tau tilde_tau
    dg = beta_a * (tt * np.cos(k) - beta_a * np.sin(k) ** 2 * tm * tt)
    return b * (g * g + dg)


def one_sided_second_derivatives(params: NessParams, j: int) -> dict[str, float]:
    """One-sided derivatives ``D_+ b_P'(t_j)`` and ``D_- b_P'(t_j)``.

    ``D_+`` at t1 approaches from k > 0, at t2 from k = -pi + 0.
    """
    k = 0.0 if j == 1 else math.pi
    if j not in (1, 2):
        raise ValueError(f"jump index must be 1 or 2, got {j}")
    root = math.sqrt(float(tau(params, "R", k)) * float(tau(params, "L", k)))
    g2 = (_log_prefactor_base(params) / TWO_PI) ** 2
    tl = params.beta_L * float(tau_tilde(params, "L", k))
    tr = params.beta_R * float(tau_tilde(params, "R", k))
    if j == 1:
        return {"plus": root * (g2 + tl), "minus": root * (g2 + tr)}
    return {"plus": root * (g2 - tr), "minus": root * (g2 - tl)}


def second_derivative_jump(params: NessParams, j: int) -> float:
    """``D_- b_P'(t_j) - D_+ b_P'(t_j)``."""
    k = 0.0 if j == 1 else math.pi
    if j not in (1, 2):
        raise ValueError(f"jump index must be 1 or 2, got {j}")
    root = math.sqrt(float(tau(params, "R", k)) * float(tau(params, "L", k)))
    return root * (
        params.beta_R * float(tau_tilde(params, "R", k))
        - params.beta_L * float(tau_tilde(params, "L", k))
    )


@dataclass(frozen=True)
class TorusSymbol:
    """A function on the unit circle, parametrised by the angle.

    ``jump_set`` lists the discontinuities; ``kinks`` lists further points
    where the function is continuous but not smooth.  Quadrature splits the
    circle at both.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    jump_set: tuple[float, ...] = ()
    kinks: tuple[float, ...] = ()
    arity: Literal["scalar", "block2"] = "scalar"
    name: str = ""
    real_valued: bool = False

    def __call__(self, k):
        return self.evaluator(wrap_angle(k))

    @property
    def breakpoints(self) -> tuple[float, ...]:
        pts = {float(wrap_angle(p)) for p in (*self.jump_set, *self.kinks)}
        return tuple(sorted(pts))


# Both NESS symbols are split at 0 and pi even without a jump: b_P always
# has a kinked second derivative there.
_NESS_BREAKS = (0.0, math.pi)


def s_minus_symbol(params: NessParams) -> TorusSymbol:
    return TorusSymbol(
        evaluator=lambda k: s_hat(params, "-", k),
        jump_set=tuple(jump_set(params)),
        kinks=_NESS_BREAKS,
        name="s_minus",
        real_valued=True,
    )


def s_plus_minus_one_symbol(params: NessParams) -> TorusSymbol:
    """``s_plus - 1``, the lower-left entry of the block symbol."""
    return TorusSymbol(
        evaluator=lambda k: s_hat(params, "+", k) - 1.0,
        jump_set=tuple(jump_set(params)),
        kinks=_NESS_BREAKS,
        name="s_plus_minus_one",
        real_valued=True,
    )


def regularized_torus_symbol(params: NessParams) -> TorusSymbol:
    return TorusSymbol(
        evaluator=lambda k: regularized_symbol(params, k),
        jump_set=(),
        kinks=_NESS_BREAKS,
        name="b_P",
        real_valued=True,
    )


def constant_symbol(c: complex) -> TorusSymbol:
    return TorusSymbol(
        evaluator=lambda k: np.full(np.shape(k), c, dtype=complex if isinstance(c, complex) else float),
        name=f"const({c})",
        real_valued=not isinstance(c, complex),
    )


def monomial_symbol(power: int) -> TorusSymbol:
    """``t -> t**power``."""
    return TorusSymbol(evaluator=lambda k: np.exp(1j * power * k), name=f"t^{power}")


def block_symbol_aP(params: NessParams, k) -> np.ndarray:
    """``[[0, s_minus], [s_plus - 1, 0]]`` as an array of shape ``(..., 2, 2)``."""
    k = np.asarray(k, dtype=float)
    out = np.zeros(k.shape + (2, 2), dtype=complex)
    out[..., 0, 1] = s_hat(params, "-", k)
    out[..., 1, 0] = s_hat(params, "+", k) - 1.0
    return out


def sample_off_jump(n: int, margin: float = 10 * EXCLUSION_RADIUS) -> np.ndarray:
    """``n`` Chebyshev-spaced angles, half on each open half circle."""
    half = max(n // 2, 1)
    x = np.cos((2 * np.arange(half) + 1) * np.pi / (2 * half))
    up = np.clip(0.5 * np.pi * (x + 1.0), margin, np.pi - margin)
    return np.sort(np.concatenate([-up, up]))
