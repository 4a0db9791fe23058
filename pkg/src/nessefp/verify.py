"""Invariant suites run by ``efp verify``.

Each check returns ``(name, passed, detail)``.  The suites are reduced-size
versions of the test-suite properties so they finish in seconds.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import fisher_hartwig as fh
from .symbol import (
    NessParams,
    factorization_residual,
    jump_phases,
    jump_set,
    make_params,
    regularized_symbol,
    regularized_symbol_derivative,
    regularized_torus_symbol,
    sample_off_jump,
    second_derivative_jump,
    one_sided_second_derivatives,
    s_hat,
)
from .toeplitz import (
    cholesky_pivots,
    efp_correlation_matrix,
    efp_log_probabilities,
    pfaffian,
    pfaffian_bruteforce,
    s_minus_window,
    s_plus_minus_one_window,
    toeplitz_section,
)
from .torus import besov_b11_check, winding_number

Check = tuple[str, bool, str]


def _random_params(rng: np.random.Generator, count: int) -> list[NessParams]:
    out = []
    for _ in range(count):
        bl = rng.uniform(0.1, 4.0)
        out.append(make_params(bl, bl + rng.uniform(0.0, 4.0), rng.uniform(-1.5, 1.5)))
    return out


def _random_skew(rng: np.random.Generator, m: int) -> np.ndarray:
    x = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return x - x.T


def symbol_suite(params: NessParams, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out: list[Check] = []
    k = sample_off_jump(4096)
    worst = max(float(np.max(factorization_residual(p, k))) for p in [params, *_random_params(rng, 5)])
    out.append(("factorization residual <= 1e-12", worst <= 1e-12, f"max {worst:.3e}"))

    b1, b2 = jump_phases(params)
    out.append(("jump phases purely imaginary", b1.real == 0 and b2.real == 0, f"beta1={b1}, beta2={b2}"))

    ks = rng.uniform(-math.pi, math.pi, 1000)
    ks = ks[np.minimum(np.abs(ks), math.pi - np.abs(ks)) > 1e-3]
    h = 1e-5
    fd = (regularized_symbol(params, ks + h) - regularized_symbol(params, ks - h)) / (2 * h)
    an = regularized_symbol_derivative(params, ks)
    rel = float(np.max(np.abs(fd - an) / np.maximum(np.abs(an), 1e-3)))
    out.append(("derivative vs central differences <= 1e-6", rel <= 1e-6, f"max rel {rel:.3e}"))

    worst_jump = 0.0
    for j in (1, 2):
        d = one_sided_second_derivatives(params, j)
        worst_jump = max(worst_jump, abs((d["minus"] - d["plus"]) - second_derivative_jump(params, j)))
    out.append(("second-derivative jump consistent", worst_jump <= 1e-12, f"{worst_jump:.3e}"))

    eq = make_params(params.beta, params.beta, params.lam)
    kk = sample_off_jump(512)
    gap = float(np.max(np.abs(regularized_symbol(eq, kk) - s_hat(eq, "-", kk))))
    out.append(("equilibrium collapse", not jump_set(eq) and gap <= 1e-15, f"max gap {gap:.3e}"))

    w = s_plus_minus_one_window(params, 64)
    s = s_minus_window(params, 64)
    refl = float(np.max(np.abs(w.coeffs + s.coeffs[::-1])))
    out.append(("coefficient reflection <= 1e-12", refl <= 1e-12, f"{refl:.3e}"))
    return out


def toeplitz_suite(params: NessParams, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out: list[Check] = []
    worst = 0.0
    for _ in range(100):
        a = _random_skew(rng, 2 * int(rng.integers(1, 5)))
        ref = pfaffian_bruteforce(a)
        worst = max(worst, abs(pfaffian(a).value - ref) / abs(ref))
    out.append(("pfaffian vs pairing sum <= 1e-12", worst <= 1e-12, f"max rel {worst:.3e}"))

    worst_a = worst_b = 0.0
    for _ in range(50):
        m = 2 * int(rng.integers(1, 5))
        x = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        y = _random_skew(rng, m)
        lhs = pfaffian(x @ y @ x.T).value
        rhs = np.linalg.det(x) * pfaffian(y).value
        worst_a = max(worst_a, abs(lhs - rhs) / abs(rhs))
        n = int(rng.integers(1, 5))
        x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        z = np.zeros((n, n))
        lhs = pfaffian(np.block([[z, x], [-x.T, z]])).value
        rhs = (-1) ** (n * (n - 1) // 2) * np.linalg.det(x)
        worst_b = max(worst_b, abs(lhs - rhs) / abs(rhs))
    out.append(("pf(X Y X^t) = det X pf Y", worst_a <= 1e-10, f"max rel {worst_a:.3e}"))
    out.append(("block Pfaffian = signed det", worst_b <= 1e-10, f"max rel {worst_b:.3e}"))

    logs = efp_log_probabilities(params, range(1, 17))
    worst = 0.0
    for n in range(1, 17):
        pf = pfaffian(efp_correlation_matrix(params, n)).value
        det = math.exp(logs[n])
        worst = max(worst, abs(pf - det) / det)
    out.append(("pf(Omega_n) = det T_n, n <= 16", worst <= 1e-8, f"max rel {worst:.3e}"))

    piv = cholesky_pivots(toeplitz_section(s_minus_window(params, 255), 256))
    ok = bool(np.all((piv > 0) & (piv < 1)))
    out.append(("Cholesky pivots in (0, 1), n = 256", ok, f"range [{piv.min():.4g}, {piv.max():.4g}]"))
    return out


def fh_suite(params: NessParams, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out: list[Check] = []
    worst_f = worst_im = worst_g = 0.0
    g_in_range = True
    for p in [params, *_random_params(rng, 3)]:
        logs = fh.ness_log_series(p, 256)
        c = fh.fh_constant(fh.ness_symbol_data(p), logs)
        direct = fh.ness_log_F_direct(p, logs)
        worst_f = max(worst_f, abs(math.exp(c.log_F.real) - math.exp(direct.real)) / math.exp(direct.real))
        worst_f = max(worst_f, abs(c.log_F.imag - direct.imag))
        worst_im = max(worst_im, abs(c.log_F.imag))
        worst_g = max(worst_g, abs(c.log_G.real - fh.ness_log_G_integral(p)))
        g_in_range &= 0 < c.G.real < 1
    out.append(("two-path F agreement <= 1e-10", worst_f <= 1e-10, f"{worst_f:.3e}"))
    out.append(("F real positive", worst_im <= 1e-10, f"max |Im log F| {worst_im:.3e}"))
    out.append(("log G matches integral form", worst_g <= 1e-10 and g_in_range, f"{worst_g:.3e}"))

    qs = [fh.ness_Q(make_params(1.0, 1.0 + 2 * d, 0.1)) for d in (0.0, 1e-3, 0.1, 1.0)]
    out.append(("Q_P = 0 iff delta = 0", qs[0] == 0 and all(q > 0 for q in qs[1:]), f"{qs}"))

    worst = 0.0
    for y in (0.05, 0.2875, 0.45):
        v = fh.barnes_g(1 + 1j * y) * fh.barnes_g(1 - 1j * y)
        worst = max(worst, abs(v.imag) / abs(v) if v.real > 0 else math.inf)
    out.append(("G(1+iy) G(1-iy) real positive", worst <= 1e-10, f"{worst:.3e}"))

    vals = [fh.barnes_g(z).real for z in (1, 2, 4, 5)]
    ok = all(abs(v - e) <= 1e-10 for v, e in zip(vals, (1, 1, 2, 12)))
    out.append(("Barnes G at integers", ok, f"{vals}"))

    b = regularized_torus_symbol(params)
    out.append(("winding number of b_P is 0", winding_number(b) == 0, ""))
    besov = besov_b11_check(b, 1e-3)
    out.append(("Besov bound", bool(besov.holds), f"{besov.integral_estimate:.4g} <= {besov.bound:.4g}"))
    return out


SUITES: dict[str, Callable[[NessParams], list[Check]]] = {
    "symbol": symbol_suite,
    "toeplitz": toeplitz_suite,
    "fh": fh_suite,
}


def run_suite(name: str, params: NessParams) -> list[Check]:
    if name == "all":
        return [c for suite in SUITES.values() for c in suite(params)]
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](params)
