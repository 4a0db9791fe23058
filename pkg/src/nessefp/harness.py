"""Determinant-vs-asymptote tables, power-law fits and figure data."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .fisher_hartwig import AsymptoticConstants, fh_log_asymptote, ness_constants
from .symbol import NessParams, jump_phases, make_params, regularized_symbol, s_hat
from .toeplitz import efp_log_probabilities

MAX_N = 1024
FIT_MIN_N = 32
FIT_MIN_ROWS = 4


class UsageError(ValueError):
    pass


def geometric_schedule(n_max: int) -> list[int]:
    """1, 2, 3, 4, 6, 8, 12, 16, ... : powers of two interleaved with 3 * 2^j."""
    out = {1}
    p = 1
    while p <= n_max:
        out.add(p)
        if 3 * p // 2 <= n_max and p >= 2:
            out.add(3 * p // 2)
        p *= 2
    return sorted(n for n in out if n <= n_max)


def linear_schedule(n_max: int) -> list[int]:
    return list(range(1, n_max + 1))


SCHEDULES = {"geometric": geometric_schedule, "linear": linear_schedule}


@dataclass
class RunConfig:
    beta_L: float = 0.5
    beta_R: float = 2.5
    lam: float = 0.1
    n_schedule: list[int] = field(default_factory=lambda: geometric_schedule(256))
    log_radius: int = 512
    out: str | None = None
    fmt: str = "csv"

    def params(self) -> NessParams:
        return make_params(self.beta_L, self.beta_R, self.lam)

    def validate(self) -> None:
        self.params()
        s = self.n_schedule
        if not s or s[0] < 1 or any(b <= a for a, b in zip(s, s[1:])):
            raise UsageError("n schedule must be strictly increasing integers >= 1")
        if s[-1] > MAX_N:
            raise UsageError(f"largest n is {s[-1]}; at most {MAX_N} is supported")


@dataclass(frozen=True)
class EfpTableRow:
    n: int
    log_det: float
    log_asymptote: float
    residual_y: float
    ratio: float


TABLE_COLUMNS = ("n", "log_det", "log_asymptote", "residual_y", "ratio")


def build_table(params: NessParams, ns, constants: AsymptoticConstants) -> list[EfpTableRow]:
    log_det = efp_log_probabilities(params, ns)
    log_G = float(np.real(constants.log_G))
    rows = []
    for n in sorted(log_det):
        ld = log_det[n]
        la = float(fh_log_asymptote(constants, n))
        rows.append(EfpTableRow(n, ld, la, ld - n * log_G, math.exp(ld - la)))
    return rows


@dataclass(frozen=True)
class FitReport:
    Q_hat: float
    logF_hat: float
    window: list[int]
    Q_reference: float
    logF_reference: float
    relative_gap_Q: float
    gap_logF: float
    note: str = "tolerances for Q_hat and logF_hat are convergence budgets, not reference values"

    def to_dict(self) -> dict:
        return asdict(self)


def fit_power_law(ns, ys) -> tuple[float, float]:
    """Least-squares ``y = Q log n + c``; returns ``(Q, c)``."""
    ns = np.asarray(ns, dtype=float)
    design = np.column_stack([np.log(ns), np.ones_like(ns)])
    (q, c), *_ = np.linalg.lstsq(design, np.asarray(ys, dtype=float), rcond=None)
    return float(q), float(c)


def fit_rows(rows: list[EfpTableRow], constants: AsymptoticConstants, min_n: int = FIT_MIN_N) -> FitReport:
    window = [r for r in rows if r.n >= min_n]
    if len(window) < FIT_MIN_ROWS:
        raise UsageError(f"fit needs at least {FIT_MIN_ROWS} rows with n >= {min_n}, got {len(window)}")
    q, c = fit_power_law([r.n for r in window], [r.residual_y for r in window])
    q_ref = float(np.real(constants.Q))
    f_ref = float(np.real(constants.log_F))
    rel = abs(q - q_ref) / q_ref if q_ref > 0 else abs(q - q_ref)
    return FitReport(q, c, [r.n for r in window], q_ref, f_ref, rel, abs(c - f_ref))


def figure_angles(samples: int) -> np.ndarray:
    """Cell midpoints of a uniform grid on (-pi, pi]; never hits 0 or pi."""
    if samples < 2:
        raise UsageError("figure needs at least 2 samples")
    return -math.pi + 2 * math.pi * (np.arange(samples) + 0.5) / samples


def figure_data(params: NessParams, which: str, samples: int) -> tuple[np.ndarray, np.ndarray]:
    k = figure_angles(samples)
    if which == "symbol":
        return k, s_hat(params, "-", k)
    if which == "regularized":
        return k, regularized_symbol(params, k)
    raise UsageError(f"unknown figure {which!r}; expected 'symbol' or 'regularized'")


def constants_report(params: NessParams, log_radius: int = 512) -> dict:
    c = ness_constants(params, log_radius)
    b1, b2 = jump_phases(params)

    def cx(z):
        z = complex(z)
        return {"re": z.real, "im": z.imag}

    return {
        "beta_L": params.beta_L,
        "beta_R": params.beta_R,
        "lambda": params.lam,
        "log_G": float(np.real(c.log_G)),
        "G": float(np.real(c.G)),
        "Q": float(np.real(c.Q)),
        "log_F": cx(c.log_F),
        "F": cx(c.F),
        "beta_1": cx(b1),
        "beta_2": cx(b2),
        "log_E": cx(c.log_E),
        "E_tail_bound": c.e_tail_bound,
        "log_b_plus": {f"{t.real:+g}": cx(v) for t, v in c.log_b_plus.items()},
        "log_b_minus": {f"{t.real:+g}": cx(v) for t, v in c.log_b_minus.items()},
        "log_barnes": {f"{t.real:+g}": cx(v) for t, v in c.log_barnes.items()},
        "log_cross": cx(c.log_cross),
    }
