"""Shooting solver, energy identity, residual and concavity certificates."""

import math

import numpy as np
import pytest

from singelliptic import barriers, radial_ode
from singelliptic.radial_profile import FIRST_ORDER_K, RadialOdeSpec, RadialProfile


class TestShooting:
    def test_energy_integral_oracle_k1_gamma1(self):
        # independent oracle: u'(r)^2/2 + log u = log u(0) integrates to
        # R = u(0) integral_0^inf sqrt(2) e^(-s^2) ds = u(0) sqrt(pi/2)
        p = radial_ode.shoot_second_order(1, 1.0, 1.0)
        expected = math.sqrt(2.0 / math.pi)
        assert p.params["u0"] == pytest.approx(expected, abs=1e-4)

    def test_boundary_condition(self):
        p = radial_ode.shoot_second_order(1, 0.7, 1.0)
        assert p.value(1.0) == pytest.approx(0.0, abs=1e-9)
        assert abs(p.derivative(0.0)) < 1e-8

    def test_residual_below_tolerance(self):
        for kdim, gamma in [(1, 1.0), (2, 1.0), (3, 0.5), (1, 2.0)]:
            p = radial_ode.shoot_second_order(kdim, gamma, 1.0)
            assert radial_ode.residual(p) < 1e-6, (kdim, gamma)

    def test_scaling_invariance(self):
        # v(x) = a^(-2/(gamma+1)) u(a x) maps the rho = 2 profile to rho = 1
        gamma = 1.0
        p1 = radial_ode.shoot_second_order(1, gamma, 1.0)
        p2 = radial_ode.shoot_second_order(1, gamma, 2.0)
        r = np.linspace(0.01, 0.99, 300)
        rescaled = 2.0 ** (-2.0 / (gamma + 1.0)) * p2.value(2.0 * r)
        assert np.abs(rescaled - p1.value(r)).max() < 1e-6

    def test_decreasing_and_positive(self):
        p = radial_ode.shoot_second_order(2, 1.5, 1.0)
        r = np.linspace(0.0, 0.999, 500)
        u = p.value(r)
        assert np.all(u[:-1] > u[1:] - 1e-12)
        assert np.all(u > 0)

    def test_r_power_derivative_monotone(self):
        # r^(k-1) u'(r) nonincreasing for kdim >= 2
        for kdim in (2, 3):
            p = radial_ode.shoot_second_order(kdim, 1.0, 1.0)
            r = np.linspace(0.02, 0.97, 400)
            flux = r ** (kdim - 1) * p.derivative(r)
            assert np.all(np.diff(flux) <= 1e-10)

    def test_concavity_certificate(self):
        for kdim in (1, 2, 3):
            p = radial_ode.shoot_second_order(kdim, 1.0, 1.0)
            assert radial_ode.concavity_certify(p).ok

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            radial_ode.shoot_second_order(0, 1.0, 1.0)
        with pytest.raises(ValueError):
            radial_ode.shoot_second_order(1, -1.0, 1.0)


class TestInfinityLaplacianProfile:
    def test_energy_residual_small(self):
        for gamma in (0.5, 1.0, 2.0):
            _, rep = radial_ode.infinity_laplacian_profile(gamma, 1.0)
            assert rep.energy_residual < 1e-6

    def test_c1_dichotomy(self):
        verdicts = []
        for gamma in (0.5, 0.9, 1.0, 1.5, 2.0):
            _, rep = radial_ode.infinity_laplacian_profile(gamma, 1.0)
            verdicts.append(rep.finite_boundary_gradient)
        assert verdicts == [True, True, False, False, False]

    def test_boundary_gradient_value_gamma_half(self):
        # |u'(R)| = sqrt(2 u0^(1/2) / (1/2)) = 2 u0^(1/4)
        _, rep = radial_ode.infinity_laplacian_profile(0.5, 1.0)
        assert rep.boundary_gradient == pytest.approx(2 * rep.u0 ** 0.25, rel=1e-6)

    def test_gamma_one_gradient_from_energy(self):
        # |u'| = sqrt(2 log(u0/u)): at u = 0.1 u0 this is sqrt(2 ln 10)
        p, rep = radial_ode.infinity_laplacian_profile(1.0, 1.0)
        u0 = rep.u0
        r = np.linspace(0.5, 0.999, 4000)
        u = p.value(r)
        i = np.argmin(np.abs(u - 0.1 * u0))
        measured = abs(float(p.derivative(r[i])))
        expected = math.sqrt(2 * math.log(u0 / u[i]))
        assert measured == pytest.approx(expected, rel=1e-5)
        assert expected == pytest.approx(math.sqrt(2 * math.log(10)), rel=1e-2)

    def test_at_origin_envelopes_match(self):
        # D^2 U(0) = u''(0) I: both infinity-Laplacian envelope values
        # equal -U(0)^(-gamma)
        p, rep = radial_ode.infinity_laplacian_profile(1.0, 1.0)
        u0 = rep.u0
        d2 = float(p.second_derivative(1e-5))
        assert d2 == pytest.approx(-1.0 / u0, rel=1e-3)


class TestResidualOp:
    def test_exact_profile_near_zero(self):
        p = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1)
        assert radial_ode.residual(p) < 1e-10

    def test_thm43_profile(self):
        w = barriers.negative_drift_nonexistence_profile(1, 1, 0.5, -1.5, 1.0, 0.8)
        assert radial_ode.residual(w) < 1e-6

    def test_perturbed_profile_fails(self):
        base = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1)
        bad = RadialProfile(
            base.radius,
            lambda r: base.value(r) + 0.1,
            base.derivative,
            base.second_derivative,
            "perturbed", {}, base.ode)
        assert radial_ode.residual(bad) > 1e-3

    def test_explicit_spec_radius_mismatch(self):
        p = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1)
        spec = RadialOdeSpec(form=FIRST_ORDER_K, k=1, gamma=1.0, radius=2.0)
        with pytest.raises(ValueError):
            radial_ode.residual(p, spec)


class TestConcavityCertify:
    def test_hemisphere(self):
        p = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1)
        cert = radial_ode.concavity_certify(p)
        assert cert.ok and cert.first_violation is None

    def test_equality_boundary_case(self):
        p = RadialProfile(1.0, lambda r: r ** 2, lambda r: 2 * r,
                          lambda r: np.full_like(np.asarray(r, float), 2.0),
                          "parabola")
        assert radial_ode.concavity_certify(p).ok

    def test_strict_violation(self):
        p = RadialProfile(1.0, lambda r: r ** 4, lambda r: 4 * r ** 3,
                          lambda r: 12 * r ** 2, "quartic")
        cert = radial_ode.concavity_certify(p)
        assert not cert.ok
        assert cert.first_violation is not None


def test_energy_value_exact_at_origin():
    assert radial_ode.energy_value(0.7, 0.0, 0.7, 1.0) == pytest.approx(0.0)
    assert radial_ode.energy_value(0.7, 0.0, 0.7, 2.0) == pytest.approx(0.0)
