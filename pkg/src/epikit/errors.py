"""Exception types raised by the epikit models and solvers."""


class EpikitError(Exception):
    """Base class for every error raised by this package."""


class NonFinite(EpikitError, ArithmeticError):
    """A state component became NaN or infinite."""


class NegativePopulation(EpikitError, ArithmeticError):
    """A population fell below the clamping slack."""


class NegativeDensity(EpikitError, ArithmeticError):
    """A spatial density fell below the allowed undershoot."""


class DegenerateSpectrum(EpikitError, ValueError):
    """Repeated eigenvalue in the linearized SEIR system."""


class BadResolution(EpikitError, ValueError):
    """Grid size is not a power of two of at least 64."""


class InfeasibleState(EpikitError, ValueError):
    """Requested steady state has negative density."""


class Extinction(EpikitError):
    """Total propensity is zero; no reaction can ever fire again."""


class ComplexDrift(EpikitError, ArithmeticError):
    """Imaginary part of a Langevin field exceeded the allowed fraction."""


class Stalled(EpikitError):
    """Gradient descent could not find a decreasing step."""


class ParseError(EpikitError, ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class EmptyFile(EpikitError, ValueError):
    """Input file has a header but no data rows."""


class TooShort(EpikitError, ValueError):
    """Series is too short for the requested transform."""


class ScenarioError(EpikitError, ValueError):
    """Scenario document failed schema validation."""
