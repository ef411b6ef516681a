"""The degenerate elliptic operator families and their frame relaxation.

Everything the solver handles is pinched between the lower and upper
partial sums of ordered Hessian eigenvalues.  This script evaluates the
families on sample matrices and shows the frame relaxation that the
wide-stencil scheme discretizes.
"""

import numpy as np

from singelliptic import operators as ops

X = np.diag([3.0, 1.0, 2.0])
print("X = diag(3, 1, 2)")
print("  sum of 2 smallest eigenvalues:", ops.partial_sum_lower(X, 2))
print("  sum of 2 largest eigenvalues: ", ops.partial_sum_upper(X, 2))

# index partial sums and projection traces are sandwiched at their rank
idx = ops.OperatorSpec(kind=ops.INDEX_PARTIAL_SUM, indices=(2,))
print("\nlambda_2 of diag(1,2,3):", ops.evaluate(idx, np.diag([1.0, 2.0, 3.0])))
proj = ops.OperatorSpec(kind=ops.PROJECTION_TRACE, projection=np.diag([1.0, 0.0, 0.0]))
print("Tr(A X) with A projecting on e1:", ops.evaluate(proj, X))
print("sandwich holds:", ops.sandwich_check(proj, X))

# infinity Laplacian with envelope values at q = 0
Y = np.diag([2.0, -1.0])
up = ops.OperatorSpec(kind=ops.INFINITY_LAPLACIAN_UPPER)
lo = ops.OperatorSpec(kind=ops.INFINITY_LAPLACIAN_LOWER)
print("\ninfinity Laplacian of diag(2, -1):")
print("  q = (1, 0):", ops.evaluate(up, Y, q=[1.0, 0.0]))
print("  q = 0 upper envelope:", ops.evaluate(up, Y, q=[0.0, 0.0]))
print("  q = 0 lower envelope:", ops.evaluate(lo, Y, q=[0.0, 0.0]))

# minimal surface operator, bounded by the (N-1) upper sum when
# the smallest eigenvalue is nonpositive
ms = ops.OperatorSpec(kind=ops.MINIMAL_SURFACE)
Z = np.diag([-2.0, -1.0])
print("\nminimal surface at q = (3, 0), X = diag(-2, -1):",
      ops.evaluate(ms, Z, q=[3.0, 0.0]))
print("upper bound P+_1 =", ops.partial_sum_upper(Z, 1))

# frame relaxation: the sup over orthonormal frames of the frame sums
# approaches the upper partial sum as the frame set refines
rng = np.random.default_rng(0)
q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
W = q @ np.diag([2.0, -1.0]) @ q.T
exact = ops.partial_sum_upper(W, 1)
print("\nframe relaxation of a rotated diag(2, -1), target", round(exact, 6))
for m in (4, 8, 16, 64):
    frames = ops.direction_frames_2d(m)
    val = ops.frame_relaxation(W, 1, frames, "sup")
    print(f"  {m:3d} directions: sup = {val:.6f}  gap = {exact - val:.2e}")

# the radial Hessian eigenstructure behind every barrier computation:
# for u(|x|), eigenvalues are u'' once and u'/r with multiplicity N-1
rep = ops.radial_hessian_eigen(upp=-2.0, upr=-0.5, n=3)
print("\nradial eigenstructure (u'' = -2, u'/r = -0.5, N = 3):")
print("  eigenvalues:", rep.eigenvalues)
print("  P+_1 =", rep.partial_sum_upper(1), " P-_2 =", rep.partial_sum_lower(2))
