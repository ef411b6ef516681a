"""Exception types shared across the package."""


class SingEllipticError(Exception):
    """Base class for all package errors."""


class QueryOutsideDomain(SingEllipticError):
    """A point query required an interior point but got delta <= 0."""


class BadRank(SingEllipticError):
    """Partial-sum rank k outside [1, N]."""


class MissingGradient(SingEllipticError):
    """Operator kind requires a gradient argument but none was given."""


class BadFrame(SingEllipticError):
    """Frame vectors are not orthonormal within tolerance."""


class RegimeError(SingEllipticError):
    """Parameters fall outside the regime where the formula is valid."""


class BadEpsilon(SingEllipticError):
    """Profile shift parameter epsilon out of range."""


class ShootingFailed(SingEllipticError):
    """Shooting bisection could not bracket or converge."""


class EmptyGrid(SingEllipticError):
    """No lattice point is interior to the domain."""


class NonpositiveValue(SingEllipticError):
    """Field value must stay positive at singular-term evaluations."""


class UnsupportedOperator(SingEllipticError):
    """Operator kind has no monotone wide-stencil discretization here."""


class NoConvergence(SingEllipticError):
    """Sweep iteration exhausted its budget before reaching tolerance."""


class BracketViolation(SingEllipticError):
    """Monotone iteration left the sub/supersolution bracket."""


class InsufficientNodes(SingEllipticError):
    """Not enough grid nodes in the requested band for a fit."""


class NoExactSolution(SingEllipticError):
    """Convergence study requested for a spec without a closed-form oracle."""


class ConfigError(SingEllipticError):
    """Experiment configuration failed validation.

    Carries the offending field path to make batch-config errors traceable.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
