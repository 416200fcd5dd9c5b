"""
Exception hierarchy for convex-equipart

Library code raises these; only the command line front end turns them into
exit codes.
"""

from typing import Optional, Tuple


class EquipartError(Exception):
    """Base class for all convex-equipart errors."""


class GeometryError(EquipartError, ValueError):
    """Invalid geometric input (non-finite coordinates, coincident sites, ...)."""


class FormatError(EquipartError, ValueError):
    """Malformed polygon, density or configuration file."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class TargetError(EquipartError, ValueError):
    """Mass targets that cannot be transported onto (wrong total, nonpositive)."""


class ReconstructionError(EquipartError, ValueError):
    """Radii cannot be recovered from a partition (empty cell or disconnected)."""


class EnumerationBoundsError(EquipartError, ValueError):
    """Tree enumeration requested outside the supported (n, d) range."""


class SolverError(EquipartError, RuntimeError):
    """
    An iterative solver gave up.

    Attributes:
        best_residual: Smallest max-norm residual reached before giving up
        iterations: Number of iterations performed
    """

    def __init__(self, message: str, best_residual: float = float("nan"), iterations: int = 0):
        super().__init__(message)
        self.best_residual = best_residual
        self.iterations = iterations


class RecursionStageError(SolverError):
    """A stage of the recursive factorization failed; `path` locates the cell."""

    def __init__(self, path: Tuple[int, ...], cause: SolverError):
        super().__init__(
            f"stage at cell path {list(path)} failed: {cause}",
            best_residual=cause.best_residual,
            iterations=cause.iterations,
        )
        self.path = path
        self.cause = cause
