"""Exception types raised by the library."""


class SturmianGreenError(Exception):
    """Base class for all library errors."""


class ConvergenceError(SturmianGreenError, ArithmeticError):
    """An iterative evaluation did not reach the requested tolerance."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class NearSingular(SturmianGreenError, ArithmeticError):
    """A pivot of the tridiagonal elimination became too small."""

    def __init__(self, message, pivot_index):
        super().__init__(message)
        self.pivot_index = pivot_index


class PoleAtEnergy(SturmianGreenError, ArithmeticError):
    """The energy sits on a pole of the Green's operator.

    ``n_r`` is the radial quantum number of the bound state when it is known.
    """

    def __init__(self, message, n_r=None, energy=None):
        super().__init__(message)
        self.n_r = n_r
        self.energy = energy


class CutProximity(SturmianGreenError, ValueError):
    """The hypergeometric argument is on or too close to the unit circle."""


class DegenerateEnergy(SturmianGreenError, ValueError):
    """z = -b_S**2/2, where all off-diagonal J-matrix elements vanish."""


class NoSignChange(SturmianGreenError, ValueError):
    """A root bracket does not contain a sign change."""


class NearCutWarning(UserWarning):
    """The closed-form route is evaluated close to the branch cut."""
