"""Geometry: exact distance, regularized distance, ray clipping."""

import numpy as np
import pytest

from singelliptic import geometry as geo
from singelliptic.errors import QueryOutsideDomain


@pytest.fixture(scope="module")
def single_ball():
    return geo.BallDomain(centers=[[0.0, 0.0]], radius=1.0)


@pytest.fixture(scope="module")
def two_ball():
    return geo.BallDomain(centers=[[-0.5, 0.0], [0.5, 0.0]], radius=1.0)


def test_delta_single_ball(single_ball):
    assert geo.delta(single_ball, [0.3, 0.0]) == pytest.approx(0.7)


def test_delta_two_ball_center(two_ball):
    assert geo.delta(two_ball, [0.0, 0.0]) == pytest.approx(0.5)


def test_delta_two_ball_offaxis(two_ball):
    # nearest sphere point is on the farther ball: 1 - sqrt(0.5^2 + 0.4^2)
    expected = 1.0 - np.sqrt(0.41)
    assert geo.delta(two_ball, [0.0, 0.4]) == pytest.approx(expected, abs=1e-12)


def test_delta_signs(single_ball):
    assert geo.delta(single_ball, [1.0, 0.0]) == pytest.approx(0.0, abs=1e-14)
    assert geo.delta(single_ball, [1.5, 0.0]) < 0


def test_delta_bounded_by_radius(two_ball):
    pts = geo.sample_interior(two_ball, 500, rng=0)
    d = geo.delta(two_ball, pts)
    assert np.all(d > 0)
    assert np.all(d <= two_ball.radius + 1e-12)


def test_delta_lipschitz(two_ball):
    rng = np.random.default_rng(1)
    a = geo.sample_interior(two_ball, 400, rng=rng)
    b = geo.sample_interior(two_ball, 400, rng=rng)
    lhs = np.abs(geo.delta(two_ball, a) - geo.delta(two_ball, b))
    assert np.all(lhs <= np.linalg.norm(a - b, axis=1) + 1e-12)


def test_domain_validation():
    with pytest.raises(ValueError):
        geo.BallDomain(centers=[[0.0, 0.0], [2.5, 0.0]], radius=1.0)
    with pytest.raises(ValueError):
        geo.BallDomain(centers=[[0.0, 0.0]], radius=-1.0)
    with pytest.raises(ValueError):
        geo.BallDomain(centers=np.zeros((0, 2)), radius=1.0)
    # pairwise distances < 2R but empty triple intersection
    c = [[0.0, 0.0], [1.9, 0.0], [0.95, 1.645]]
    with pytest.raises(ValueError):
        geo.BallDomain(centers=c, radius=1.0)


def test_incenter_two_ball(two_ball):
    assert np.allclose(two_ball.incenter, [0.0, 0.0], atol=1e-6)
    assert two_ball.inradius == pytest.approx(0.5, abs=1e-9)


def test_json_roundtrip(two_ball):
    clone = geo.BallDomain.from_json(two_ball.to_json())
    assert np.allclose(clone.centers, two_ball.centers)
    assert clone.radius == two_ball.radius
    assert clone.dimension == two_ball.dimension


def test_regularized_single_ball_is_exact(single_ball):
    # soft-min of one distance is that distance for any temperature
    b = geo.regularized_distance(single_ball, [0.3, 0.0], 1e-3)
    assert 0.6993 <= b.d <= 0.7007
    assert b.d == pytest.approx(0.7, abs=1e-12)
    assert np.allclose(b.grad_d, [-1.0, 0.0], atol=1e-6)
    assert abs(np.linalg.norm(b.grad_d) - 1.0) < 1e-6


def test_regularized_two_ball_bounds(two_ball):
    b = geo.regularized_distance(two_ball, [0.0, 0.0], 1e-3)
    assert b.d <= b.delta
    assert b.d >= 0.5 * (1 - 1e-2)


def test_regularized_comparability_sampled(two_ball):
    consts = geo.distance_constants(two_ball, smoothing=1e-3, n_samples=1000, seed=2)
    assert consts["C2"] <= 1.0 + 1e-12
    assert consts["C1"] >= 0.9
    assert np.isfinite(consts["B2"])


def test_regularized_outside_raises(single_ball):
    with pytest.raises(QueryOutsideDomain):
        geo.regularized_distance(single_ball, [1.2, 0.0], 1e-3)


def test_gradient_hessian_match_finite_differences(two_ball):
    rng = np.random.default_rng(7)
    pts = geo.sample_interior(two_ball, 10, rng=rng, min_delta=0.05)
    step = 1e-5

    def f(x):
        return geo.regularized_value(two_ball, x[None, :], 1e-3)[0]

    for x in pts:
        bundle = geo.regularized_distance(two_ball, x, 1e-3)
        grad_fd = np.array([
            (f(x + step * e) - f(x - step * e)) / (2 * step) for e in np.eye(2)
        ])
        assert np.allclose(grad_fd, bundle.grad_d, atol=1e-7)
        hess_fd = np.empty((2, 2))
        for i in range(2):
            for j in range(2):
                ei = np.eye(2)[i] * step
                ej = np.eye(2)[j] * step
                hess_fd[i, j] = (f(x + ei + ej) - f(x + ei - ej)
                                 - f(x - ei + ej) + f(x - ei - ej)) / (4 * step ** 2)
        assert np.abs(hess_fd - bundle.hess_d.array).max() < 1e-4


def test_ray_fraction_exits(single_ball):
    assert geo.boundary_ray_fraction(single_ball, [0.95, 0.0], [1, 0], 0.1) == pytest.approx(0.5)
    assert geo.boundary_ray_fraction(single_ball, [0.95, 0.0], [-1, 0], 0.1) == 1.0


def test_ray_fraction_two_ball(two_ball):
    # the left ball's sphere crosses the x axis at x = 0.5
    theta = geo.boundary_ray_fraction(two_ball, [0.45, 0.0], [1, 0], 0.1)
    assert theta == pytest.approx(0.5, abs=1e-12)


def test_ray_fraction_lands_on_boundary(two_ball):
    rng = np.random.default_rng(3)
    pts = geo.sample_interior(two_ball, 100, rng=rng)
    for x in pts:
        ang = rng.uniform(0, 2 * np.pi)
        v = np.array([np.cos(ang), np.sin(ang)])
        h = 0.8
        th = geo.boundary_ray_fraction(two_ball, x, v, h)
        if th < 1.0:
            hit = x + th * h * v
            assert abs(geo.delta(two_ball, hit)) < 1e-10


def test_three_dimensional_domain():
    dom = geo.BallDomain(centers=[[0.0, 0.0, 0.0]], radius=1.0)
    assert geo.delta(dom, [0.0, 0.0, 0.25]) == pytest.approx(0.75)
    b = geo.regularized_distance(dom, [0.0, 0.0, 0.25], 1e-3)
    assert np.allclose(b.grad_d, [0, 0, -1], atol=1e-9)
