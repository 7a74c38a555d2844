"""Exception types raised across the package."""


class PwllError(Exception):
    """Base class for all package errors."""


class DisconnectedGraph(PwllError):
    """Similarity graph has more than one connected component."""


class DegenerateFeatures(PwllError):
    """Duplicate feature vectors collapse the kNN kernel bandwidth to zero."""


class NonPositiveGamma(PwllError):
    """Reweighting vector must be strictly positive."""


class EmptyLabeledSet(PwllError):
    """At least one labeled point is required."""


class EmptyUnlabeledSet(PwllError):
    """No unlabeled points left to query."""


class SolverDiverged(PwllError):
    """Iterative solver failed to reach tolerance within the iteration cap."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class KTooLarge(PwllError):
    """Relabeling modulus exceeds the number of original classes."""


class OracleOutOfRange(PwllError):
    """Oracle returned a class outside {0..C-1}."""


class NonPositiveDensity(PwllError):
    """Interval density must be strictly positive."""


class BetaOutOfRange(PwllError):
    """Interval-length ratio outside the admissible range."""


class AssumptionViolated(PwllError):
    """Constructed density fails the symmetry or monotone-ends checks."""


class ConfigError(PwllError):
    """Config or sweep file rejected, with a line diagnostic."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
