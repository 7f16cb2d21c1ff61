"""Exception types raised by cubicmars."""


class CubicMarsError(Exception):
    """Base class for all package errors."""


class DegenerateChordError(CubicMarsError, ValueError):
    """Two consecutive spline knots coincide, so the chordal length is zero."""


class SplineDomainError(CubicMarsError, ValueError):
    """A spline was evaluated outside its parameter interval."""


class DegenerateParametrizationError(CubicMarsError, ValueError):
    """The curve speed vanishes where a curvature radius was requested."""


class InvalidGraphError(CubicMarsError, ValueError):
    """The edge graph, pairing or cycle data violate a structural invariant."""


class PreconditionError(CubicMarsError, ValueError):
    """Inputs of an algorithm fail its documented preconditions."""


class ResolutionError(CubicMarsError, RuntimeError):
    """The interface is under-resolved: too few markers survive a step."""


class AssemblyError(CubicMarsError, RuntimeError):
    """Fitted splines could not be cut back into the graph's edges."""


class ConfigError(CubicMarsError, ValueError):
    """A scene, tableau or run configuration could not be used."""
