"""Exception hierarchy shared by all ptqwalk modules."""


class WalkError(Exception):
    """Base class for every error raised by ptqwalk."""


class InvalidParameterError(WalkError, ValueError):
    """A parameter or configuration is outside its admissible range."""


class InvalidStateError(WalkError, ValueError):
    """A wavefunction cannot be used for the requested operation (e.g. zero norm)."""


class DegeneracyError(WalkError, ArithmeticError):
    """The analytic eigenvectors are undefined (exceptional or scalar point)."""


class NoExceptionalPointError(WalkError, ValueError):
    """The coin angles admit no gain value at which the epsilon=0 gap closes."""


class BoundaryOverflowError(WalkError, RuntimeError):
    """The wavefunction reached the edge of the ring during a line simulation."""


class SolverFailureError(WalkError, RuntimeError):
    """The dense eigensolver failed to converge."""


class SingularEigenvalueError(WalkError, ArithmeticError):
    """An eigenvalue is zero, so its quasi-energy is undefined."""


class ConfigError(WalkError, ValueError):
    """A JSON configuration violates the schema.

    Parameters
    ----------
    message : str
        Human-readable description.
    path : str
        JSON path of the offending node, ``$`` for the document root.
    """

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.detail = message
