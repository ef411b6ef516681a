"""Closed-form profiles, exponents, and domain-level barrier fields.

Expected values are frozen from substitution into the defining formulas
(computed independently below or inline), never from the code paths
being tested.
"""

import math

import numpy as np
import pytest

from singelliptic import barriers, geometry, operators, radial_ode
from singelliptic.errors import BadEpsilon, RegimeError

UPPER1 = operators.OperatorSpec(kind=operators.UPPER_PARTIAL_SUM, k=1)


def disk(radius=1.0):
    return geometry.BallDomain(centers=[[0.0, 0.0]], radius=radius)


def two_ball():
    return geometry.BallDomain(centers=[[-0.5, 0.0], [0.5, 0.0]], radius=1.0)


# ---------------------------------------------------------------------------
# closed forms


class TestBallSolutionBetaNonpos:
    def test_hemisphere(self):
        p = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1)
        r = np.linspace(0, 1, 101)
        assert np.allclose(p.value(r), np.sqrt(1 - r ** 2), atol=1e-14)

    def test_beta_minus_half_center(self):
        # G(0) = 2 (1/0.5 - 1/1.5) = 8/3
        p = barriers.ball_solution_beta_nonpos(1, 1, 1, -0.5, 1)
        assert p.value(0.0) == pytest.approx(math.sqrt(8 / 3), abs=1e-12)

    def test_boundary_zero_and_positive(self):
        p = barriers.ball_solution_beta_nonpos(2.0, 2, 0.7, -0.3, 1.5)
        assert p.value(p.radius) == 0.0
        r = np.linspace(0, p.radius * (1 - 1e-9), 200)
        assert np.all(p.value(r) > 0)

    def test_residual_and_derivative_conditions(self):
        for beta in (-0.9, -0.5, 0.0):
            p = barriers.ball_solution_beta_nonpos(1.3, 2, 1.5, beta, 2.0)
            assert p.max_residual() < 1e-12
            assert abs(p.derivative(0.0)) < 1e-12
            assert radial_ode.concavity_certify(p).ok

    def test_regime_guard(self):
        with pytest.raises(RegimeError):
            barriers.ball_solution_beta_nonpos(1, 1, 1, 0.5, 1)
        with pytest.raises(RegimeError):
            barriers.ball_solution_beta_nonpos(1, 1, 1, -1.0, 1)


class TestBallSupersolutionBetaPos:
    def test_center_value(self):
        p = barriers.ball_supersolution_beta_pos(1, 1, 1, 1, 1)
        assert p.value(0.0) == pytest.approx(1.0)

    def test_supersolution_inequality_for_true_weight(self):
        # residual of the (R-r)^beta equation is <= 0: (R-r)^beta <= R^beta
        p = barriers.ball_supersolution_beta_pos(1.0, 1, 1.0, 0.5, 1.0)
        r = p.interior_grid(500)
        u = p.value(r)
        du = p.derivative(r)
        lhs = du / r + (1 - r) ** 0.5 * u ** -1.0
        assert np.all(lhs <= 1e-12)

    def test_beta_to_zero_matches_nonpos_branch(self):
        pos = barriers.ball_supersolution_beta_pos(1, 1, 1, 1e-10, 1)
        nonpos = barriers.ball_solution_beta_nonpos(1, 1, 1, 0.0, 1)
        r = np.linspace(0, 1, 1000)
        assert np.abs(pos.value(r) - nonpos.value(r)).max() < 1e-8

    def test_regime_guard(self):
        with pytest.raises(RegimeError):
            barriers.ball_supersolution_beta_pos(1, 1, 1, 0.0, 1)


class TestNonexistenceProfile:
    def test_center_values(self):
        w = barriers.nonexistence_profile(1, 1, 0.5)
        assert w.value(0.0) == pytest.approx(math.sqrt(2 * (-0.5 + math.log(2))), abs=1e-12)
        w9 = barriers.nonexistence_profile(1, 1, 0.9)
        assert w9.value(0.0) == pytest.approx(math.sqrt(2 * (-0.9 + math.log(10))), abs=1e-12)

    def test_vanishes_at_rho(self):
        w = barriers.nonexistence_profile(1, 1, 0.5)
        assert w.value(0.5) == 0.0

    def test_residual_and_concavity(self):
        w = barriers.nonexistence_profile(2, 1.5, 0.7)
        assert w.max_residual() < 1e-12
        assert radial_ode.concavity_certify(w).ok

    def test_blowup_monotone_in_rho(self):
        r = np.linspace(0, 0.45, 50)
        vals = [barriers.nonexistence_profile(1, 1, rho).value(r)
                for rho in (0.5, 0.7, 0.9, 0.99)]
        for a, b in zip(vals, vals[1:]):
            assert np.all(b > a)

    def test_general_radius(self):
        w = barriers.nonexistence_profile(1, 1, 1.9, big_r=2.0)
        assert w.max_residual() < 1e-12
        assert w.value(1.9) == 0.0


class TestDriftNonexistenceProfile:
    def test_center_values(self):
        ue = barriers.drift_nonexistence_profile(1, 1, 1, 0.1)
        assert ue.value(0.0) == pytest.approx(math.sqrt(2 * (-0.9 + math.log(10))), abs=1e-12)
        ue2 = barriers.drift_nonexistence_profile(1, 1, 1, 0.01)
        assert ue2.value(0.0) == pytest.approx(math.sqrt(2 * (-0.99 + math.log(100))), abs=1e-12)

    def test_support_end(self):
        ue = barriers.drift_nonexistence_profile(1, 1, 1, 0.1)
        assert ue.radius == pytest.approx(0.9)
        assert ue.value(ue.radius) == 0.0

    def test_residual_monotone_and_concave(self):
        ue = barriers.drift_nonexistence_profile(2, 0.5, 1.5, 0.2)
        assert ue.max_residual() < 1e-12
        r = ue.interior_grid(400)
        assert np.all(ue.derivative(r) <= 0)
        assert radial_ode.concavity_certify(ue).ok

    def test_blowup_as_epsilon_shrinks(self):
        r = np.linspace(0, 0.5, 20)
        v1 = barriers.drift_nonexistence_profile(1, 1, 1, 0.2).value(r)
        v2 = barriers.drift_nonexistence_profile(1, 1, 1, 0.05).value(r)
        assert np.all(v2 > v1)

    def test_bad_epsilon(self):
        with pytest.raises(BadEpsilon):
            barriers.drift_nonexistence_profile(1, 1, 1, 1.5)
        with pytest.raises(BadEpsilon):
            barriers.drift_nonexistence_profile(1, 1, 1, 0.0)


class TestDriftBallSupersolution:
    def test_quadrature_value(self):
        # integral_0^1 s/(1 - s/2) ds = 4 ln 2 - 2
        p = barriers.drift_ball_supersolution(1, 1, 1, 0.0, 0.5, 1)
        expected = math.sqrt(2 * (4 * math.log(2) - 2))
        assert p.value(0.0) == pytest.approx(expected, abs=1e-10)

    def test_log_branch_agrees_at_beta_zero(self):
        integral = barriers.drift_ball_supersolution(1, 1, 1, 0.0, 0.5, 1)
        logform = barriers.drift_supersolution_log_form(1, 1, 1, 0.0, 0.5, 1)
        r = np.linspace(0, 1, 1000)
        assert np.abs(integral.value(r) - logform.value(r)).max() < 1e-8

    def test_residuals_both_branches(self):
        for beta in (-0.5, 0.0):
            p = barriers.drift_ball_supersolution(1.2, 2, 1.5, beta, 0.7, 1.4)
            assert p.max_residual() < 1e-8
        plog = barriers.drift_ball_supersolution(1.2, 2, 1.5, 0.8, 0.7, 1.4)
        assert plog.max_residual() < 1e-12

    def test_regime_guards(self):
        with pytest.raises(RegimeError):
            barriers.drift_ball_supersolution(1, 1, 1, 0.0, 1.0, 1.0)   # bR = k
        with pytest.raises(RegimeError):
            barriers.drift_ball_supersolution(1, 1, 1, -1.5, 0.5, 1.0)  # beta <= -1


class TestNegativeDriftNonexistence:
    def test_residual_and_boundary(self):
        w = barriers.negative_drift_nonexistence_profile(1, 1, 0.5, -1.5, 1.0, 0.8)
        assert w.max_residual() < 1e-8
        assert w.value(0.8) == 0.0
        assert radial_ode.concavity_certify(w).ok

    def test_blowup_in_rho(self):
        r = np.linspace(0, 0.5, 10)
        v1 = barriers.negative_drift_nonexistence_profile(1, 1, 0.5, -1.2, 1.0, 0.6).value(r)
        v2 = barriers.negative_drift_nonexistence_profile(1, 1, 0.5, -1.2, 1.0, 0.9).value(r)
        assert np.all(v2 > v1)

    def test_regime_guards(self):
        with pytest.raises(RegimeError):
            barriers.negative_drift_nonexistence_profile(1, 1, 0.5, -0.5, 1.0, 0.8)
        with pytest.raises(RegimeError):
            barriers.negative_drift_nonexistence_profile(1, 1, 1.5, -1.5, 1.0, 0.8)


class TestThresholdSolution:
    def test_center_value(self):
        p = barriers.bR_equals_k_solution(0.5, 1, 1, 1)
        assert p.value(0.0) == pytest.approx(math.sqrt(8 / 3), abs=1e-12)

    def test_residual_everywhere(self):
        p = barriers.bR_equals_k_solution(0.5, 1, 1, 1)
        assert p.max_residual() < 1e-8
        assert abs(float(p.residual(0.5))) < 1e-8
        assert p.value(1.0) == 0.0

    def test_other_parameters(self):
        p = barriers.bR_equals_k_solution(0.3, 2.0, 2, 1.5)
        assert p.max_residual() < 1e-10

    def test_regime_guard(self):
        for alpha in (0.0, 1.0, 1.5):
            with pytest.raises(RegimeError):
                barriers.bR_equals_k_solution(alpha, 1, 1, 1)


class TestPartialSumAlphaSolution:
    def test_center_value(self):
        p = barriers.partial_sum_alpha_solution(1, 1, 1)
        assert p.value(0.0) == pytest.approx(math.sqrt(1 / 3), abs=1e-12)

    def test_residual_and_boundary(self):
        p = barriers.partial_sum_alpha_solution(1, 1, 1)
        assert p.max_residual() < 1e-10
        assert p.value(1.0) == 0.0

    def test_c1_up_to_boundary(self):
        # |u'| stays bounded: value near the boundary within 10x of the
        # value a bit farther in (no blow-up), alpha >= gamma
        p = barriers.partial_sum_alpha_solution(1, 1, 1)
        d_near = abs(p.derivative(1 - 1e-4))
        d_far = abs(p.derivative(1 - 1e-2))
        assert d_near <= 10 * d_far
        fd = (p.value(1.0) - p.value(1 - 1e-6)) / 1e-6
        assert abs(fd) < 1.0

    def test_regime_guard(self):
        with pytest.raises(RegimeError):
            barriers.partial_sum_alpha_solution(0.5, 1, 1)


# ---------------------------------------------------------------------------
# exponents


def test_holder_exponent_values():
    assert barriers.holder_exponent(1, 0) == pytest.approx(0.5)
    assert barriers.holder_exponent(2, -0.5) == pytest.approx(1 / 6)
    assert barriers.holder_exponent(1, 3) == pytest.approx(0.5)
    with pytest.raises(RegimeError):
        barriers.holder_exponent(1, -1.0)


def test_boundary_estimate_two_sided():
    spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk())
    rep = barriers.boundary_estimate(spec)
    assert rep.two_sided_sigma
    assert rep.sigma == pytest.approx(0.5)
    assert rep.lower_exponent == pytest.approx(0.5)
    assert 0 < rep.a1 <= rep.a2


def test_boundary_estimate_generic():
    spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk(),
                                alpha=2.0, beta=1.0)
    rep = barriers.boundary_estimate(spec)
    assert not rep.two_sided_sigma
    assert rep.lower_exponent == pytest.approx(2.0)
    assert rep.sigma == pytest.approx(0.5)


def test_exponent_formula_cases():
    spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk())
    rep = barriers.boundary_estimate(spec)
    assert rep.sigma == pytest.approx((0 + 2) / (1 + 1) - 0.5)  # 0.5


def test_hemisphere_pinched_near_boundary():
    # u = sqrt(1-r^2) has u/delta^sigma in [1, sqrt(2)] on the unit ball
    p = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1)
    delta = np.linspace(1e-4, 0.2, 500)
    ratio = p.value(1 - delta) / delta ** 0.5
    assert ratio.min() > 1.0 - 1e-6
    assert ratio.max() < np.sqrt(2) + 1e-6


# ---------------------------------------------------------------------------
# domain-level fields


class TestSubsolutionField:
    def test_exponent_formula(self):
        for alpha, gamma, t in [(0, 1, 1.0), (2, 1, 2.0), (1, 1, 1.5)]:
            spec = barriers.ProblemSpec(operator=UPPER1, gamma=gamma, domain=disk(),
                                        alpha=alpha, beta=min(alpha, 0.0))
            sub = barriers.subsolution_field(spec, n_check=50)
            assert sub.t == pytest.approx(t)

    def test_residuals_nonnegative_on_fresh_sample(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk())
        sub = barriers.subsolution_field(spec, n_check=100, seed=0)
        pts = geometry.sample_interior(disk(), 200, rng=99, min_delta=5e-3)
        res = barriers.subsolution_residuals(sub, pts)
        assert res.min() >= -1e-6

    def test_vanishes_on_boundary_scale(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk())
        sub = barriers.subsolution_field(spec, n_check=50)
        x = np.array([[1 - 1e-8, 0.0]])
        assert sub.field(x)[0] < 1e-7

    def test_regime_guard(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk(),
                                    alpha=-1.5, beta=-1.5)
        with pytest.raises(RegimeError):
            barriers.subsolution_field(spec)


class TestInfBallSupersolution:
    def test_single_ball_equals_profile(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk())
        sup = barriers.inf_ball_supersolution(spec)
        pts = geometry.sample_interior(disk(), 200, rng=4)
        r = np.linalg.norm(pts, axis=1)
        expected = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1).value(r)
        assert np.allclose(sup.field(pts), expected, atol=1e-12)

    def test_two_ball_center_value(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=two_ball())
        sup = barriers.inf_ball_supersolution(spec)
        val = sup.field(np.array([[0.0, 0.0]]))[0]
        assert val == pytest.approx(math.sqrt(0.75), abs=1e-12)

    def test_inf_shortcut_matches_explicit_inf(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=2.0, domain=two_ball(),
                                    alpha=-0.5, beta=-0.5)
        sup = barriers.inf_ball_supersolution(spec)
        pts = geometry.sample_interior(two_ball(), 300, rng=5)
        assert np.allclose(sup.field(pts), sup.field_explicit(pts), atol=1e-12)

    def test_zero_on_boundary(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=two_ball())
        sup = barriers.inf_ball_supersolution(spec)
        # rightmost point of the lens: on the left ball's sphere
        x = np.array([[0.5, 0.0]])
        assert sup.field(x)[0] == pytest.approx(0.0, abs=1e-12)

    def test_holder_ratio_bounded_by_profile_constant(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=two_ball())
        sup = barriers.inf_ball_supersolution(spec)
        ratio = sup.holder_ratio(n_pairs=1000, seed=6)
        assert ratio <= sup.holder_constant * (1 + 1e-9)

    def test_drift_dispatch(self):
        spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk(),
                                    drift_b=0.5, drift_sign=+1)
        sup = barriers.inf_ball_supersolution(spec)
        assert sup.profile.tag == "drift_ball_supersolution"
        bad = barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk(),
                                   drift_b=1.5, drift_sign=+1)
        with pytest.raises(RegimeError):
            barriers.inf_ball_supersolution(bad)


def test_barrier_ordering_across_regimes():
    dom = two_ball()
    pts = geometry.sample_interior(dom, 1000, rng=8, min_delta=1e-3)
    for gamma in (1.0, 2.0):
        for beta in (-0.5, 0.0, 1.0):
            spec = barriers.ProblemSpec(operator=UPPER1, gamma=gamma, domain=dom,
                                        alpha=max(beta, beta), beta=beta)
            sub = barriers.subsolution_field(spec, n_check=60, seed=9)
            sup = barriers.inf_ball_supersolution(spec)
            violations = int(np.sum(sub.field(pts) > sup.field(pts)))
            assert violations == 0, (gamma, beta)


def test_problem_spec_validation():
    with pytest.raises(ValueError):
        barriers.ProblemSpec(operator=UPPER1, gamma=0.0, domain=disk())
    with pytest.raises(ValueError):
        barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk(),
                             alpha=-1.0, beta=0.0)
    with pytest.raises(ValueError):
        barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk(),
                             c1=2.0, c2=1.0)
    with pytest.raises(ValueError):
        barriers.ProblemSpec(operator=UPPER1, gamma=1.0, domain=disk(),
                             drift_b=1.0, drift_sign=0)


def test_problem_spec_dict_roundtrip():
    spec = barriers.ProblemSpec(operator=UPPER1, gamma=1.5, domain=two_ball(),
                                alpha=0.5, beta=-0.5, drift_b=0.25, drift_sign=-1)
    clone = barriers.problem_from_dict(spec.to_dict())
    assert clone.gamma == spec.gamma
    assert clone.beta == spec.beta
    assert clone.drift_sign == -1
    assert np.allclose(clone.domain.centers, spec.domain.centers)


def test_profile_csv_export(tmp_path):
    p = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1)
    path = tmp_path / "hemi.csv"
    p.to_csv(path, n=50)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "r,u,du,d2u,residual"
    assert len(rows) == 51
