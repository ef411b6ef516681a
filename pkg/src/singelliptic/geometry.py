"""Uniformly convex domains given as intersections of congruent balls.

A domain is Omega = intersection over y in Y of B_R(y), with Y a finite
list of centers and a common radius R.  For such domains the boundary
distance is exact and cheap,

    delta(x) = min_y (R - |x - y|),

because the complement of Omega is the union of the ball complements.
The module also provides a smooth regularized distance d(x) comparable
to delta (a temperature-scaled soft-min of the per-ball distances, with
analytic gradient and Hessian) and exact stencil-ray clipping against
the boundary, used by the cut-cell grid solver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import QueryOutsideDomain
from .operators import SymMatrix


@dataclass(frozen=True)
class BallDomain:
    """Intersection of congruent balls: centers (m, N) and common radius R.

    Invariants checked at construction: at least one center, radius > 0,
    all pairwise center distances < 2R, and a nonempty interior (the
    Chebyshev center of the intersection has positive distance).
    """

    centers: np.ndarray
    radius: float
    dimension: int = field(default=0)

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "centers", centers)
        if self.dimension == 0:
            object.__setattr__(self, "dimension", centers.shape[1])
        if centers.ndim != 2 or centers.shape[0] == 0:
            raise ValueError("centers must be a nonempty (m, N) array")
        if centers.shape[1] != self.dimension:
            raise ValueError(
                f"centers have dimension {centers.shape[1]}, expected {self.dimension}"
            )
        if self.dimension < 2:
            raise ValueError("dimension must be >= 2")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if len(centers) > 1:
            gaps = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=-1)
            worst = gaps.max()
            if worst >= 2 * self.radius:
                raise ValueError(
                    f"pairwise center distance {worst:.6g} >= 2R: empty interior"
                )
        incenter, inradius = _chebyshev_center(centers, self.radius)
        if not inradius > 0:
            raise ValueError("ball intersection has empty interior")
        object.__setattr__(self, "_incenter", incenter)
        object.__setattr__(self, "_inradius", float(inradius))

    @property
    def incenter(self) -> np.ndarray:
        """Point of maximal boundary distance."""
        return self._incenter

    @property
    def inradius(self) -> float:
        """Maximal boundary distance, max_x delta(x)."""
        return self._inradius

    @property
    def n_balls(self) -> int:
        return len(self.centers)

    def bounding_box(self):
        """Coordinate box containing Omega (intersection of ball boxes)."""
        lo = (self.centers - self.radius).max(axis=0)
        hi = (self.centers + self.radius).min(axis=0)
        return lo, hi

    def to_dict(self) -> dict:
        return {
            "centers": [list(map(float, c)) for c in self.centers],
            "radius": float(self.radius),
            "dimension": int(self.dimension),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "BallDomain":
        return cls(
            centers=np.asarray(data["centers"], dtype=float),
            radius=float(data["radius"]),
            dimension=int(data.get("dimension", 0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "BallDomain":
        return cls.from_dict(json.loads(text))


def _chebyshev_center(centers, radius):
    """Maximize the concave function delta(x) = R - max_y |x - y|."""
    if len(centers) == 1:
        return centers[0].copy(), radius
    x0 = centers.mean(axis=0)

    def neg_delta(x):
        return np.linalg.norm(x - centers, axis=1).max() - radius

    res = minimize(neg_delta, x0, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-12, "maxiter": 20000})
    return res.x, -res.fun


def delta(domain: BallDomain, x) -> np.ndarray | float:
    """Signed boundary distance, exact for ball intersections.

    Positive inside Omega, zero on the boundary, negative outside.
    Accepts a single point (N,) or a batch (M, N).
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    dist = np.linalg.norm(pts[:, None, :] - domain.centers[None, :, :], axis=-1)
    vals = domain.radius - dist.max(axis=1)
    return float(vals[0]) if single else vals


@dataclass(frozen=True)
class DistanceBundle:
    """Regularized distance at one interior point: value, gradient, Hessian.

    delta is the exact boundary distance at the same point, hess_d is a
    SymMatrix (the Hessian argument fed to the operators), and smoothing
    is the temperature parameter used by the soft-min.
    """

    delta: float
    d: float
    grad_d: np.ndarray
    hess_d: SymMatrix
    smoothing: float


def _per_ball(domain, x):
    diffs = x - domain.centers          # (m, N)
    r = np.linalg.norm(diffs, axis=1)   # (m,)
    n = diffs / r[:, None]
    w = domain.radius - r
    return r, n, w


def _temperature(domain, w, smoothing):
    """Smooth positive temperature comparable to smoothing * delta.

    Uses the harmonic mean of the per-ball distances, which sits in
    [delta, m * delta] and is smooth wherever the per-ball distances are.
    """
    q = np.sum(1.0 / w)
    return smoothing * len(w) / q, q


def regularized_value(domain: BallDomain, x, smoothing: float):
    """Soft-min distance value only, vectorized over points.

    Satisfies delta * (1 - smoothing * m * log m) <= d <= delta at interior
    points; returns the value without derivatives (used for field sampling
    and finite-difference checks).
    """
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    dist = np.linalg.norm(pts[:, None, :] - domain.centers[None, :, :], axis=-1)
    w = domain.radius - dist            # (M, m)
    if np.any(w <= 0):
        raise QueryOutsideDomain("soft-min distance queried at a non-interior point")
    q = np.sum(1.0 / w, axis=1)
    tau = smoothing * w.shape[1] / q
    z = w / tau[:, None]
    zmin = z.min(axis=1)
    logsum = np.log(np.exp(-(z - zmin[:, None])).sum(axis=1))
    d = tau * (zmin - logsum)
    return d if np.asarray(x).ndim > 1 else float(d[0])


def regularized_distance(domain: BallDomain, x, smoothing: float = 1e-3) -> DistanceBundle:
    """Regularized distance with analytic gradient and Hessian.

    Construction: d = softmin_tau(w_1, ..., w_m) over the per-ball
    distances w_y = R - |x - y|, with temperature tau(x) equal to the
    smoothing parameter times the harmonic mean of the w_y.  The value
    obeys C1 * delta <= d <= delta with C1 >= 1 - smoothing * m * log m,
    and the derivatives are exact for this d (chain rule through tau).

    Raises QueryOutsideDomain when delta(x) <= 0.
    """
    x = np.asarray(x, dtype=float)
    dl = delta(domain, x)
    if dl <= 0:
        raise QueryOutsideDomain(f"delta(x) = {dl:.3g} <= 0")
    m = domain.n_balls
    ndim = domain.dimension
    eye = np.eye(ndim)

    r, n, w = _per_ball(domain, x)
    grad_w = -n                                     # (m, N)
    hess_w = -(eye[None] - n[:, :, None] * n[:, None, :]) / r[:, None, None]

    tau, q = _temperature(domain, w, smoothing)
    grad_q = np.einsum("y,yi->i", w ** -2, n)
    hess_q = np.einsum("y,yij->ij", 2.0 * w ** -3, n[:, :, None] * n[:, None, :])
    hess_q += np.einsum("y,yij->ij", w ** -2,
                        (eye[None] - n[:, :, None] * n[:, None, :]) / r[:, None, None])
    grad_tau = -smoothing * m * grad_q / q ** 2
    hess_tau = smoothing * m * (2.0 * np.outer(grad_q, grad_q) / q ** 3 - hess_q / q ** 2)

    z = w / tau
    zmin = z.min()
    e = np.exp(-(z - zmin))
    p = e / e.sum()
    big_l = zmin - np.log(e.sum())                  # -log sum exp(-z)
    d = tau * big_l
    zbar = float(p @ z)
    var_z = float(p @ z ** 2) - zbar ** 2
    g_tau = big_l - zbar

    grad_d = np.einsum("y,yi->i", p, grad_w) + g_tau * grad_tau

    pw = np.einsum("y,yi->i", p, grad_w)
    hess = np.einsum("y,yij->ij", p, hess_w)
    hess += g_tau * hess_tau
    hess += (np.outer(pw, pw) - np.einsum("y,yi,yj->ij", p, grad_w, grad_w)) / tau
    cross = np.einsum("y,y,yi->i", p, z - zbar, grad_w) / tau
    hess += np.outer(grad_tau, cross) + np.outer(cross, grad_tau)
    hess += -(var_z / tau) * np.outer(grad_tau, grad_tau)
    hess = 0.5 * (hess + hess.T)

    return DistanceBundle(delta=float(dl), d=float(d), grad_d=grad_d,
                          hess_d=SymMatrix(hess), smoothing=float(smoothing))


def ray_exit_distance(domain: BallDomain, x, v) -> np.ndarray | float:
    """Distance along unit direction v from interior x to the boundary.

    Exact per ball: the positive root of |x + t v - y|^2 = R^2, minimized
    over the centers.  Vectorized over a batch of points sharing v.
    """
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    diffs = pts[:, None, :] - domain.centers[None, :, :]      # (M, m, N)
    b = np.einsum("pmi,i->pm", diffs, v)
    c = np.einsum("pmi,pmi->pm", diffs, diffs) - domain.radius ** 2
    t = -b + np.sqrt(np.maximum(b * b - c, 0.0))
    exit_t = t.min(axis=1)
    return exit_t if np.asarray(x).ndim > 1 else float(exit_t[0])


def boundary_ray_fraction(domain: BallDomain, x, v, h: float) -> float:
    """Fraction theta in (0, 1] of the step h along v that stays in Omega.

    theta = 1 when x + h v is still in the closed domain, otherwise the
    unique theta with x + theta h v on the boundary.
    """
    t = ray_exit_distance(domain, x, v)
    return float(min(1.0, t / h))


def sample_interior(domain: BallDomain, n: int, rng=None, min_delta: float = 0.0):
    """Rejection-sample n interior points (optionally with delta > min_delta)."""
    rng = np.random.default_rng(rng)
    lo, hi = domain.bounding_box()
    out = np.empty((n, domain.dimension))
    got = 0
    while got < n:
        cand = rng.uniform(lo, hi, size=(max(2 * (n - got), 64), domain.dimension))
        keep = cand[delta(domain, cand) > min_delta]
        take = min(len(keep), n - got)
        out[got:got + take] = keep[:take]
        got += take
    return out


def distance_constants(domain: BallDomain, smoothing: float = 1e-3,
                       n_samples: int = 1000, seed: int = 0) -> dict:
    """Measure the comparability and derivative constants of d by sampling.

    Returns C1 = min d/delta, C2 = max d/delta, grad_max = max |grad d|,
    and B2 = max |hess d| * delta, over interior sample points.  The
    constants are measured, not asserted: the construction guarantees
    C2 <= 1 and C1 >= 1 - smoothing * m * log m, while B2 depends on the
    center layout.
    """
    pts = sample_interior(domain, n_samples, rng=seed, min_delta=1e-6 * domain.radius)
    c1 = np.inf
    c2 = 0.0
    gmax = 0.0
    b2 = 0.0
    for x in pts:
        bundle = regularized_distance(domain, x, smoothing)
        ratio = bundle.d / bundle.delta
        c1 = min(c1, ratio)
        c2 = max(c2, ratio)
        gmax = max(gmax, float(np.linalg.norm(bundle.grad_d)))
        hnorm = bundle.hess_d.norm()
        b2 = max(b2, hnorm * bundle.delta)
    return {"C1": float(c1), "C2": float(c2), "grad_max": float(gmax), "B2": float(b2)}
