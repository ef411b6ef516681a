"""Radial shooting for the lower-partial-sum and infinity-Laplacian
equations, and the boundary-gradient dichotomy.

The lower partial sum acts on radial functions like the Laplacian in
dimension k, so the profile solves u'' + (k-1) u'/r + u^(-gamma) = 0.
The k = 1 profile also solves the infinity-Laplacian equation, whose
energy identity decides whether the gradient stays bounded at the
boundary: it does exactly when gamma < 1.
"""

import math

from singelliptic import radial_ode

print("shooting for k = 1, gamma = 1 on the unit interval:")
p = radial_ode.shoot_second_order(1, 1.0, 1.0)
print("  u(0) =", round(p.params["u0"], 8))
print("  energy-integral prediction sqrt(2/pi) =", round(math.sqrt(2 / math.pi), 8))
print("  ODE residual:", f"{radial_ode.residual(p):.2e}")
print("  concavity certificate:", radial_ode.concavity_certify(p).ok)

print("\nscaling invariance: a profile on [0, 2] rescales onto [0, 1]")
p2 = radial_ode.shoot_second_order(1, 1.0, 2.0)
v0 = 2.0 ** (-1.0) * p2.value(0.0)   # alpha^(-2/(gamma+1)) with alpha = 2
print("  rescaled center value:", round(float(v0), 8), " direct:",
      round(p.params["u0"], 8))

print("\nhigher radial dimension (k = 3):")
p3 = radial_ode.shoot_second_order(3, 1.0, 1.0)
print("  u(0) =", round(p3.params["u0"], 6),
      " residual:", f"{radial_ode.residual(p3):.2e}")

print("\nboundary-gradient dichotomy for the infinity Laplacian:")
print("  gamma   u(0)      |u'(R)|    finite?")
for gamma in (0.5, 0.9, 1.0, 1.5, 2.0):
    profile, rep = radial_ode.infinity_laplacian_profile(gamma, 1.0)
    bg = f"{rep.boundary_gradient:9.4f}" if rep.finite_boundary_gradient else "      inf"
    print(f"  {gamma:4.1f}  {rep.u0:.6f}  {bg}   {rep.finite_boundary_gradient}")
print("the gradient stays bounded if and only if gamma < 1")
