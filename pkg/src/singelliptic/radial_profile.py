"""Radial profile type and the ODE forms the profiles satisfy.

Every closed-form barrier and every shooting output is a function
u(r) on [0, radius] with u(radius) = 0.  All closed forms share the
power structure u = G(r)^(1/(1+gamma)) with G explicit, so values and
derivatives are analytic; shooting outputs carry interpolants instead.

The two ODE families are

    first_order_k:     k u'/r + s b u' + p(r) u^(-gamma) = 0
    second_order_kdim: u'' + (k - 1) u'/r + u^(-gamma) = 0

where s is the sign of the u' drift term at the ODE level.  A radial
profile solving the first form with the certificate u'' <= u'/r solves
the upper-partial-sum PDE (the k largest Hessian eigenvalues are k
copies of u'/r); the second form is the radial reduction of the
lower-partial-sum operator, which acts like the Laplacian in dimension k.
Note the sign bookkeeping: for decreasing u, a PDE term +b|Du| equals
-b u', so the PDE drift sign and the ODE drift sign s are opposite.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

FIRST_ORDER_K = "first_order_k"
SECOND_ORDER_KDIM = "second_order_kdim"


@dataclass
class RadialOdeSpec:
    """Descriptor of the radial ODE a profile is checked against.

    drift_sign is the ODE-level sign s in k u'/r + s b u' + p u^(-gamma);
    weight is p(r) (None means p = 1).  radius is the right endpoint of
    the profile's support.
    """

    form: str
    k: int
    gamma: float
    radius: float
    b: float = 0.0
    drift_sign: int = 0
    weight: Optional[Callable] = None
    weight_label: str = "1"

    def __post_init__(self):
        if self.form not in (FIRST_ORDER_K, SECOND_ORDER_KDIM):
            raise ValueError(f"unknown ODE form {self.form!r}")
        if self.drift_sign not in (-1, 0, 1):
            raise ValueError("drift_sign must be -1, 0 or +1")

    def weight_values(self, r):
        if self.weight is None:
            return np.ones_like(np.asarray(r, dtype=float))
        return np.asarray(self.weight(np.asarray(r, dtype=float)), dtype=float)

    def lhs(self, r, u, du, d2u=None):
        """ODE left-hand side at radius r for the given derivative data."""
        r = np.asarray(r, dtype=float)
        if self.form == FIRST_ORDER_K:
            out = self.k * du / r + self.weight_values(r) * u ** (-self.gamma)
            if self.drift_sign != 0:
                out = out + self.drift_sign * self.b * du
            return out
        if d2u is None:
            raise ValueError("second-order form needs u''")
        return d2u + (self.k - 1) * du / r + u ** (-self.gamma)

    def normalizer(self, r, u):
        """Scale 1 + |p u^(-gamma)| used for relative residuals."""
        return 1.0 + np.abs(self.weight_values(r) * u ** (-self.gamma))

    def describe(self) -> str:
        if self.form == FIRST_ORDER_K:
            drift = ""
            if self.drift_sign != 0:
                drift = f" {'+' if self.drift_sign > 0 else '-'} {self.b:g} u'"
            return f"{self.k} u'/r{drift} + {self.weight_label} u^(-{self.gamma:g}) = 0"
        return f"u'' + {self.k - 1} u'/r + u^(-{self.gamma:g}) = 0"


class RadialProfile:
    """One-dimensional profile r -> u(r) on [0, radius] with derivatives.

    value/derivative/second_derivative accept scalars or arrays in
    [0, radius].  Boundary-vanishing profiles return exactly 0 at
    r = radius; the derivative there may be infinite (gamma > 0 makes
    |u'| blow up like G^(-gamma/(1+gamma)) wherever G' does not vanish).
    """

    def __init__(self, radius, value_fn, deriv_fn, second_fn, tag, params=None,
                 ode: Optional[RadialOdeSpec] = None):
        self.radius = float(radius)
        self._value = value_fn
        self._deriv = deriv_fn
        self._second = second_fn
        self.tag = tag
        self.params = dict(params or {})
        self.ode = ode

    def _check_domain(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.radius * (1 + 1e-12)):
            raise ValueError(f"radius query outside [0, {self.radius}]")
        return np.minimum(r, self.radius)

    def value(self, r):
        return self._value(self._check_domain(r))

    __call__ = value

    def derivative(self, r):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self._deriv(self._check_domain(r))

    def second_derivative(self, r):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self._second(self._check_domain(r))

    def residual(self, r):
        """Relative residual of the profile's own ODE at radii r."""
        if self.ode is None:
            raise ValueError(f"profile {self.tag!r} carries no ODE spec")
        r = self._check_domain(r)
        u = self.value(r)
        du = self.derivative(r)
        d2u = self.second_derivative(r) if self.ode.form == SECOND_ORDER_KDIM else None
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.ode.lhs(r, u, du, d2u) / self.ode.normalizer(r, u)

    def interior_grid(self, n: int = 1000, margin: float = 1e-6):
        """n radii excluding margin * radius neighborhoods of both endpoints."""
        eps = margin * self.radius
        return np.linspace(eps, self.radius - eps, n)

    def max_residual(self, n: int = 1000) -> float:
        return float(np.abs(self.residual(self.interior_grid(n))).max())

    def to_csv(self, path, n: int = 1000):
        """Write (r, u, u', u'', residual) rows for plotting."""
        r = self.interior_grid(n)
        u = self.value(r)
        du = self.derivative(r)
        d2u = self.second_derivative(r)
        res = self.residual(r) if self.ode is not None else np.full_like(r, np.nan)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r", "u", "du", "d2u", "residual"])
            for row in zip(r, u, du, d2u, res):
                writer.writerow([f"{v:.16e}" for v in row])

    def __repr__(self):
        return f"RadialProfile({self.tag!r}, radius={self.radius:g})"


def power_profile(radius, gamma, g, dg, d2g, tag, params=None,
                  ode: Optional[RadialOdeSpec] = None) -> RadialProfile:
    """Profile u = G^(1/(1+gamma)) from G and its first two derivatives."""
    m = 1.0 / (1.0 + gamma)

    def value(r):
        return np.maximum(g(r), 0.0) ** m

    def deriv(r):
        gv = np.maximum(g(r), 0.0)
        return m * gv ** (m - 1.0) * dg(r)

    def second(r):
        gv = np.maximum(g(r), 0.0)
        dgv = dg(r)
        return m * (m - 1.0) * gv ** (m - 2.0) * dgv ** 2 + m * gv ** (m - 1.0) * d2g(r)

    return RadialProfile(radius, value, deriv, second, tag, params, ode)
