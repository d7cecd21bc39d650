"""Exception hierarchy for geometry and simulation failures."""


class GeometryError(Exception):
    """Base class for everything raised by this package on purpose."""


class UsageError(GeometryError):
    """Caller broke a contract: mixed spaces, bad parameter range, malformed input."""


class DegenerateLogError(GeometryError):
    """log(p, q) requested with p == q; the direction is undefined."""


class OutOfInjectivityError(GeometryError):
    """Points too far apart for a unique shortest geodesic (or a tie between lifts)."""


class DomainExitError(GeometryError):
    """A geodesic left the working coordinate domain of a numerical surface."""


class SolverError(GeometryError):
    """An iterative solver (geodesic shooting) failed to converge."""


class IntegrationError(GeometryError):
    """The pursuit integrator could not proceed (step rejection limit, monotonicity
    violation, state inconsistency)."""


class ConfigError(UsageError):
    """Scenario configuration failed to parse or validate.

    Carries an optional source line for error reporting.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
