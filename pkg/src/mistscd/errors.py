"""Exception hierarchy. Each class carries the CLI exit code for its category."""


class MistScdError(Exception):
    exit_code = 1


class InputError(MistScdError, ValueError):
    exit_code = 2


class RangeError(MistScdError):
    """A photon number left the tabulated effective-resonance range."""

    exit_code = 3


class StiffnessError(MistScdError):
    """Step size collapsed during integration."""

    exit_code = 4

    def __init__(self, message, t=None, alpha=None):
        super().__init__(message)
        self.t = t
        self.alpha = alpha


class DegenerateRootError(MistScdError):
    """Fixed point sits on a bifurcation boundary (Jacobian determinant ~ 0)."""

    exit_code = 5


class ComputationError(MistScdError):
    exit_code = 6
