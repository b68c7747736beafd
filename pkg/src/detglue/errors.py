"""Error taxonomy shared across the package.

Each class maps to a distinct CLI exit code so that callers can tell a
bad geometry from a failed continuation or a branch-cut violation.
"""


class DetglueError(Exception):
    """Base class; exit_code is consumed by the CLI dispatcher."""

    exit_code = 1


class ConfigError(DetglueError):
    """Bad flag, unknown config key, or invariant violation in RunConfig."""

    exit_code = 2


class DomainError(DetglueError):
    """Input outside an operation's precondition (nonpositive length, t <= 0, ...)."""

    exit_code = 3


class ContinuationError(DetglueError):
    """The tail descriptor cannot continue the spectral sum at the requested point."""

    exit_code = 4


class FitError(DetglueError):
    """Least-squares extraction failed (ill-conditioning, degenerate grid)."""

    exit_code = 5


class BranchError(DetglueError):
    """A spectrum point landed inside the protected sector around the cut at angle pi."""

    exit_code = 6


class EmitError(DetglueError):
    """Report serialization / file output failure."""

    exit_code = 7
