""" exceptions raised by coexist_ia """


class CoexistError(Exception):
    """Base class for every error raised on purpose by this package."""


class ConfigurationError(CoexistError, ValueError):
    """A configuration value or document is invalid."""


class DimensionError(CoexistError, ValueError):
    """Matrix factors do not conform; the message names the offending factor."""

    def __init__(self, factor: str, expected, actual):
        self.factor = factor
        self.expected = expected
        self.actual = actual
        super().__init__('%s has shape %r, expected %r' % (factor, actual, expected))


class TopologyError(CoexistError, LookupError):
    """A link is declared but its channel matrix is missing."""

    def __init__(self, rx, tx):
        self.rx = rx
        self.tx = tx
        super().__init__('no channel for link (rx=%r, tx=%r)' % (rx, tx))

    def __str__(self):
        return self.args[0]


class InfeasibleError(CoexistError):
    """Requested degrees of freedom cannot be aligned."""

    def __init__(self, verdict):
        self.verdict = verdict
        super().__init__('infeasible: %s' % verdict.reason)


class NumericError(CoexistError, ArithmeticError):
    """A decomposition failed or produced non-finite values."""

    def __init__(self, message: str, condition: float = float('nan')):
        self.condition = condition
        super().__init__('%s (condition estimate %.3g)' % (message, condition))


class InsufficientSamplesError(CoexistError, ValueError):
    """Too few null-hypothesis samples for the requested false-alarm rate."""


class UndersampledWarning(UserWarning):
    """A false-alarm target was clamped to what the sample size supports."""


class DegradedProjectionWarning(UserWarning):
    """No singular value fell below the projection threshold."""
