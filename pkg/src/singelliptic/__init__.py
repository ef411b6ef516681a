"""Barriers, explicit radial solutions, and monotone grid solvers for
degenerate elliptic Dirichlet problems with a singular zero-order term,

    F(D^2 u) + H(x, Du) + p(x) u^(-gamma) = 0 in Omega,  u = 0 on the boundary,

on uniformly convex domains given as intersections of congruent balls.
F is sandwiched between the truncated Laplacians (partial sums of the
k smallest / largest Hessian eigenvalues), p is comparable to a power of
the boundary distance, and H is a gradient term of size b |Du|.
"""

from . import barriers, errors, experiments, geometry, grid_solver, operators, radial_ode

__version__ = "0.1.0"

__all__ = [
    "barriers",
    "errors",
    "experiments",
    "geometry",
    "grid_solver",
    "operators",
    "radial_ode",
    "__version__",
]
