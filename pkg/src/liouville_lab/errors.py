"""Exception hierarchy shared across the package."""


class LiouvilleLabError(Exception):
    """Base class for all package errors."""


class IndexOutOfRange(LiouvilleLabError):
    """Stability index outside the open admissible interval (0, min(2, d))."""


class ExponentSignViolation(LiouvilleLabError):
    """Nonlinearity exponents break the sign constraints of the problem family."""


class PotentialInvalid(LiouvilleLabError):
    """Potential fails positivity, monotonicity, or tail-exponent constraints."""


class DiagonalEvaluation(LiouvilleLabError):
    """Green function requested on the diagonal, where it is singular."""


class GeometryViolation(LiouvilleLabError):
    """Point/ball configuration outside an operation's admissible geometry."""


class QuadratureNonConvergence(LiouvilleLabError):
    """Adaptive quadrature exhausted its subdivision budget above tolerance."""


class TailNotIntegrable(LiouvilleLabError):
    """Declared far-field growth too strong for the jump-kernel weight."""


class ExponentOutOfRange(LiouvilleLabError):
    """Functional exponent outside its admissible range (e.g. inner exponent <= 1)."""


class InsufficientSamples(LiouvilleLabError):
    """Too few grid samples for a limit classification."""


class RuleNotApplicable(LiouvilleLabError):
    """No closed-form threshold rule covers the given problem."""


class GridTooCoarse(LiouvilleLabError):
    """A required criterion classified Indeterminate on the given radius grid."""


class InternalInconsistency(LiouvilleLabError):
    """Symbolic threshold route and numeric criteria route disagree."""


class UnknownExperiment(LiouvilleLabError):
    """Experiment name not in the registry."""


class ConfigParse(LiouvilleLabError):
    """Malformed configuration file or override."""
