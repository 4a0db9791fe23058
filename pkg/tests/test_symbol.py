import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nessefp.symbol import (
    DomainError,
    ParameterError,
    SingularSymbolError,
    block_symbol_aP,
    factorization_residual,
    jump_phase,
    jump_phases,
    jump_set,
    make_params,
    one_sided_limits,
    one_sided_second_derivatives,
    pure_jump_symbol,
    regularized_symbol,
    regularized_symbol_derivative,
    rho,
    s_hat,
    sample_off_jump,
    second_derivative_jump,
    tau,
    tau_tilde,
)

P_STAR = make_params(0.5, 2.5, 0.1)


def tanh_tau(beta, lam, k):
    # the defining formula, kept separate from the implementation's logistic form
    return 0.5 * (1 - math.tanh(0.5 * beta * (lam + math.cos(k))))


params_strategy = st.builds(
    lambda bl, d, lam: make_params(bl, bl + d, lam),
    st.floats(0.05, 6.0),
    st.floats(0.0, 6.0),
    st.floats(-2.5, 2.5),
)


class TestParams:
    def test_derived(self):
        assert P_STAR.beta == 1.5
        assert P_STAR.delta == 1.0

    def test_equilibrium(self):
        p = make_params(1.5, 1.5, 0.0)
        assert p.delta == 0.0

    @pytest.mark.parametrize(
        "args, word",
        [((2.5, 0.5, 0.1), "beta_R"), ((0.0, 1.0, 0.0), "beta_L"), ((-1.0, 1.0, 0.0), "beta_L"), ((1.0, math.inf, 0.0), "beta_R"), ((1.0, 2.0, math.nan), "lambda")],
    )
    def test_rejects(self, args, word):
        with pytest.raises(ParameterError, match=word):
            make_params(*args)


class TestPointwise:
    def test_tau_examples(self):
        assert tau(P_STAR, "L", 0.0) == pytest.approx(0.3659, abs=1e-3)
        assert tau(P_STAR, "R", math.pi) == pytest.approx(0.9047, abs=1e-3)

    def test_tau_matches_tanh_formula(self):
        for k in np.linspace(-math.pi, math.pi, 37):
            for side, beta in (("L", 0.5), ("R", 2.5)):
                assert tau(P_STAR, side, k) == pytest.approx(tanh_tau(beta, 0.1, k), rel=1e-14)

    def test_tau_half_where_argument_vanishes(self):
        p = make_params(0.7, 3.1, 0.0)
        assert tau(p, "L", math.pi / 2) == pytest.approx(0.5, abs=1e-16)
        p = make_params(0.7, 3.1, -1.0)
        assert tau(p, "R", 0.0) == 0.5

    def test_rho_branches(self):
        assert rho(P_STAR, "-", math.pi / 2) == pytest.approx(math.tanh(0.025), rel=1e-14)
        assert rho(P_STAR, "-", -math.pi / 2) == pytest.approx(math.tanh(0.125), rel=1e-14)
        assert math.tanh(0.125) == pytest.approx(0.1244, abs=1e-4)

    def test_rho_equilibrium(self):
        p = make_params(1.3, 1.3, 0.4)
        k = np.linspace(-math.pi, math.pi, 101)
        np.testing.assert_array_equal(rho(p, "+", k), rho(p, "-", k))

    def test_s_hat_examples(self):
        assert s_hat(P_STAR, "-", math.pi / 2) == pytest.approx((1 - math.tanh(0.025)) / 2, rel=1e-14)
        assert s_hat(P_STAR, "-", math.pi / 2) == pytest.approx(0.4875, abs=1e-4)
        assert s_hat(P_STAR, "-", -math.pi / 2) == pytest.approx((1 - math.tanh(0.125)) / 2, rel=1e-14)
        assert s_hat(P_STAR, "-", -math.pi / 2) == pytest.approx(0.4378, abs=1e-4)

    def test_s_hat_matches_rho(self):
        k = np.linspace(-3.1, 3.1, 77)
        np.testing.assert_allclose(s_hat(P_STAR, "-", k), 0.5 * (1 - rho(P_STAR, "-", k)), rtol=1e-14)
        np.testing.assert_allclose(s_hat(P_STAR, "+", k), 0.5 * (1 + rho(P_STAR, "+", k)), rtol=1e-14)

    def test_s_minus_is_tau_per_half(self):
        k = sample_off_jump(200)
        expected = np.where(k > 0, tau(P_STAR, "L", k), tau(P_STAR, "R", k))
        np.testing.assert_allclose(s_hat(P_STAR, "-", k), expected, rtol=1e-15)

    def test_sum_of_densities(self):
        k = sample_off_jump(200)
        lhs = s_hat(P_STAR, "-", k) + s_hat(P_STAR, "+", k)
        rhs = 1 + 0.5 * (rho(P_STAR, "+", k) - rho(P_STAR, "-", k))
        np.testing.assert_allclose(lhs, rhs, atol=1e-15)
        eq = make_params(1.5, 1.5, 0.1)
        np.testing.assert_allclose(s_hat(eq, "-", k) + s_hat(eq, "+", k), 1.0, atol=1e-15)

    def test_sign_zero_is_plus(self):
        # k = 0 takes the +delta branch inside rho_-, i.e. beta_L
        assert s_hat(P_STAR, "-", 0.0) == tau(P_STAR, "L", 0.0)

    @given(params_strategy, st.floats(-math.pi, math.pi))
    def test_ranges(self, p, k):
        for side in "LR":
            assert 0 < tau(p, side, k) < 1
        assert 0 < s_hat(p, "-", k) < 1
        assert -1 < rho(p, "+", k) < 1


class TestJumps:
    def test_jump_set_noneq(self):
        assert jump_set(P_STAR) == [0.0, math.pi]

    def test_jump_set_equilibrium(self):
        assert jump_set(make_params(1.5, 1.5, 0.1)) == []

    def test_jump_vanishes_at_lambda_minus_one(self):
        assert jump_set(make_params(0.5, 2.5, -1.0)) == [math.pi]

    def test_jump_vanishes_at_lambda_plus_one(self):
        assert jump_set(make_params(0.5, 2.5, 1.0)) == [0.0]

    def test_phase_no_jump(self):
        assert jump_phase(0.3, 0.3) == 0

    def test_phase_zero_limit(self):
        with pytest.raises(SingularSymbolError):
            jump_phase(0.0, 0.4)

    def test_phase_examples(self):
        b1 = jump_phase(*one_sided_limits(P_STAR, 1))
        b2 = jump_phase(*one_sided_limits(P_STAR, 2))
        direct1 = -1j / (2 * math.pi) * math.log(tanh_tau(2.5, 0.1, 0) / tanh_tau(0.5, 0.1, 0))
        direct2 = -1j / (2 * math.pi) * math.log(tanh_tau(0.5, 0.1, math.pi) / tanh_tau(2.5, 0.1, math.pi))
        assert b1 == pytest.approx(direct1, abs=1e-14)
        assert b2 == pytest.approx(direct2, abs=1e-14)
        assert b1.imag == pytest.approx(0.2875, abs=5e-4)
        assert b2.imag == pytest.approx(0.0626, abs=5e-4)
        assert (b1, b2) == pytest.approx(jump_phases(P_STAR), abs=1e-15)

    def test_phase_complex_limits(self):
        left, right = 2.0 * np.exp(1j * 0.4), 0.5 * np.exp(-1j * 0.3)
        b = jump_phase(left, right)
        assert np.exp(2j * math.pi * b) == pytest.approx(left / right, rel=1e-14)
        assert b.real == pytest.approx(0.7 / (2 * math.pi))

    @given(params_strategy)
    def test_phases_pure(self, p):
        b1, b2 = jump_phases(p)
        assert b1.real == 0 and b2.real == 0
        l1 = math.log(tau(p, "L", 0.0) / tau(p, "R", 0.0))
        l2 = math.log(tau(p, "R", math.pi) / tau(p, "L", math.pi))
        assert b1.imag == pytest.approx(l1 / (2 * math.pi), rel=1e-9, abs=1e-15)
        assert b2.imag == pytest.approx(l2 / (2 * math.pi), rel=1e-9, abs=1e-15)

    def test_phases_respect_strip(self):
        for p in (P_STAR, make_params(0.1, 10.0, 0.3)):
            assert all(abs(b.real) < 0.5 for b in jump_phases(p))


class TestPureJump:
    def test_zero_phase(self):
        t = np.exp(1j * np.linspace(-3, 3, 11))
        np.testing.assert_array_equal(pure_jump_symbol(0, 1.0, t), 1.0)

    def test_one_sided_limits(self):
        beta = 0.3 + 0.2j
        e = 1e-9
        assert pure_jump_symbol(beta, 1.0, np.exp(1j * e)) == pytest.approx(np.exp(-1j * math.pi * beta), rel=1e-8)
        assert pure_jump_symbol(beta, 1.0, np.exp(-1j * e)) == pytest.approx(np.exp(1j * math.pi * beta), rel=1e-8)

    def test_closed_forms(self):
        b1, b2 = jump_phases(P_STAR)
        r1 = tanh_tau(2.5, 0.1, 0) / tanh_tau(0.5, 0.1, 0)
        r2 = tanh_tau(0.5, 0.1, math.pi) / tanh_tau(2.5, 0.1, math.pi)
        k = sample_off_jump(64)
        sgn = np.where(-k >= 0, 1.0, -1.0)
        np.testing.assert_allclose(pure_jump_symbol(b1, 1.0, np.exp(1j * k)), r1 ** ((k + sgn * math.pi) / (2 * math.pi)), rtol=1e-12)
        np.testing.assert_allclose(pure_jump_symbol(b2, -1.0, np.exp(1j * k)), r2 ** (k / (2 * math.pi)), rtol=1e-12)


class TestRegularized:
    def test_at_zero(self):
        assert regularized_symbol(P_STAR, 0.0) == pytest.approx(math.sqrt(tau(P_STAR, "R", 0) * tau(P_STAR, "L", 0)), rel=1e-15)

    def test_seam(self):
        target = math.sqrt(tau(P_STAR, "R", math.pi) * tau(P_STAR, "L", math.pi))
        assert regularized_symbol(P_STAR, math.pi) == pytest.approx(target, rel=1e-14)
        assert regularized_symbol(P_STAR, -math.pi + 1e-9) == pytest.approx(target, rel=1e-8)

    def test_seam_first_order(self):
        hs = np.array([1e-2, 1e-3, 1e-4])
        gaps = np.abs(regularized_symbol(P_STAR, math.pi) - regularized_symbol(P_STAR, -math.pi + hs))
        ratios = gaps / hs
        assert np.all(np.diff(gaps) < 0)
        assert ratios.max() / ratios.min() < 1.1

    def test_positive(self):
        k = np.linspace(-math.pi, math.pi, 1 << 14)
        assert np.all(regularized_symbol(P_STAR, k) > 0)

    def test_equilibrium(self):
        eq = make_params(1.5, 1.5, 0.1)
        k = np.linspace(-math.pi, math.pi, 4001)
        np.testing.assert_allclose(regularized_symbol(eq, k), s_hat(eq, "-", k), atol=1e-15, rtol=0)


class TestFactorization:
    def test_single_point(self):
        assert factorization_residual(P_STAR, 1.0) <= 1e-12

    def test_equilibrium(self):
        eq = make_params(0.8, 0.8, -0.3)
        assert np.max(factorization_residual(eq, sample_off_jump(256))) <= 1e-15

    def test_sweep(self):
        k = sample_off_jump(4096)
        assert len(k) == 4096
        assert np.max(factorization_residual(P_STAR, k)) <= 1e-12

    def test_exclusion(self):
        with pytest.raises(DomainError):
            factorization_residual(P_STAR, 1e-9)
        with pytest.raises(DomainError):
            factorization_residual(P_STAR, math.pi)

    @settings(max_examples=50)
    @given(params_strategy, st.floats(1e-6, math.pi - 1e-6), st.booleans())
    def test_property(self, p, k, lower):
        assert factorization_residual(p, -k if lower else k) <= 1e-12


class TestDerivatives:
    def test_central_difference(self):
        h = 1e-5
        fd = (regularized_symbol(P_STAR, 0.7 + h) - regularized_symbol(P_STAR, 0.7 - h)) / (2 * h)
        assert regularized_symbol_derivative(P_STAR, 0.7) == pytest.approx(fd, rel=1e-6)

    def test_value_at_zero(self):
        t = {(s, k): tau(P_STAR, s, k) for s in "LR" for k in (0.0, math.pi)}
        expected = (
            math.sqrt(t["R", 0.0] * t["L", 0.0])
            * math.log(t["L", 0.0] * t["R", math.pi] / (t["R", 0.0] * t["L", math.pi]))
            / (2 * math.pi)
        )
        assert regularized_symbol_derivative(P_STAR, 0.0) == pytest.approx(expected, rel=1e-14)
        # continuity from below
        assert regularized_symbol_derivative(P_STAR, -1e-10) == pytest.approx(expected, rel=1e-8)

    def test_continuous_at_pi(self):
        assert regularized_symbol_derivative(P_STAR, math.pi) == pytest.approx(
            regularized_symbol_derivative(P_STAR, -math.pi + 1e-10), rel=1e-8
        )

    def test_equilibrium_chain_rule(self):
        eq = make_params(1.2, 1.2, 0.3)
        k = np.linspace(-3, 3, 41)
        # d/dk (1 - tanh(u))/2 with u = beta(lam + cos k)/2
        u = 0.5 * 1.2 * (0.3 + np.cos(k))
        expected = 0.25 * 1.2 * np.sin(k) / np.cosh(u) ** 2
        np.testing.assert_allclose(regularized_symbol_derivative(eq, k), expected, rtol=1e-12, atol=1e-15)

    def test_random_angles(self):
        rng = np.random.default_rng(7)
        k = rng.uniform(-math.pi, math.pi, 1000)
        k = k[np.minimum(np.abs(k), math.pi - np.abs(k)) > 1e-3]
        h = 1e-5
        fd = (regularized_symbol(P_STAR, k + h) - regularized_symbol(P_STAR, k - h)) / (2 * h)
        an = regularized_symbol_derivative(P_STAR, k)
        np.testing.assert_allclose(an, fd, rtol=1e-6, atol=1e-9)


class TestSecondDerivative:
    def test_jump_vanishes_at_equilibrium(self):
        eq = make_params(1.0, 1.0, 0.0)
        for j in (1, 2):
            assert abs(second_derivative_jump(eq, j)) <= 1e-15

    def test_sign(self):
        expected = 2.5 * tau_tilde(P_STAR, "R", 0.0) - 0.5 * tau_tilde(P_STAR, "L", 0.0)
        val = second_derivative_jump(P_STAR, 1)
        assert val != 0 and np.sign(val) == np.sign(expected)

    def test_jump_is_difference_of_one_sided(self):
        for j in (1, 2):
            d = one_sided_second_derivatives(P_STAR, j)
            assert d["minus"] - d["plus"] == pytest.approx(second_derivative_jump(P_STAR, j), rel=1e-13)

    @pytest.mark.parametrize("j", [1, 2])
    @pytest.mark.parametrize("side", ["plus", "minus"])
    def test_finite_differences(self, j, side):
        # second-order one-sided stencil on b_P itself; the oracle never sees b_P''
        h = 1e-4
        step = h if side == "plus" else -h
        k0 = 0.0 if j == 1 else (-math.pi if side == "plus" else math.pi)
        f = [float(regularized_symbol(P_STAR, k0 + i * step)) for i in range(4)]
        fd = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
        assert fd == pytest.approx(one_sided_second_derivatives(P_STAR, j)[side], rel=1e-4)


class TestBlockSymbol:
    def test_structure(self):
        k = np.linspace(-3, 3, 13)
        a = block_symbol_aP(P_STAR, k)
        np.testing.assert_array_equal(np.trace(a, axis1=-2, axis2=-1), 0)
        det = np.linalg.det(a)
        np.testing.assert_allclose(det, -s_hat(P_STAR, "-", k) * (s_hat(P_STAR, "+", k) - 1), rtol=1e-14)

    def test_value(self):
        a = block_symbol_aP(P_STAR, math.pi / 2)
        assert a[0, 1] == pytest.approx(0.4875, abs=1e-4)
        # s_plus at k = pi/2 uses beta + delta = beta_R
        assert a[1, 0] == pytest.approx((1 + math.tanh(0.125)) / 2 - 1, rel=1e-14)

    def test_equilibrium_at_real_points(self):
        eq = make_params(1.5, 1.5, 0.1)
        for k in (0.0, math.pi):
            a = block_symbol_aP(eq, k)
            assert a[1, 0] == pytest.approx(-a[0, 1], rel=1e-14)
