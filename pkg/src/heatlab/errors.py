"""Exception hierarchy shared across the package."""

from __future__ import annotations


class HeatLabError(Exception):
    """Base class for all errors raised by heatlab."""


class GeometryError(HeatLabError):
    """Invalid geometry description or construction failure."""


class FieldMismatchError(HeatLabError):
    """A field was used with a manifold it is not bound to."""


class ValidationError(HeatLabError):
    """A problem, schedule, or field failed its preconditions."""


class EstimateInputError(HeatLabError):
    """A residual checker was fed a trajectory outside its hypotheses."""


class SolverAbort(HeatLabError):
    """Base class for mid-run solver aborts; carries the failure location.

    Attributes
    ----------
    node : int
        Index of the offending node.
    time : float
        Time at which the failure was detected.
    last_good_t : float
        Last time with a valid state.
    """

    def __init__(self, message, node, time, last_good_t):
        super().__init__(message)
        self.node = int(node)
        self.time = float(time)
        self.last_good_t = float(last_good_t)


class PositivityError(SolverAbort):
    """The solution reached zero or below at some node."""


class BlowupError(SolverAbort):
    """The solution exceeded the blow-up cap at some node."""


class EigenSolveError(HeatLabError):
    """Eigenpair residual target not met within the iteration budget."""


class ConfigError(HeatLabError):
    """Malformed or inconsistent run configuration."""
