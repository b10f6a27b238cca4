"""Exception types raised by soradial."""


class SORadialError(Exception):
    """Base class for all library errors."""


class NotARotation(SORadialError, ValueError):
    """Matrix is not orthogonal with unit determinant."""


class NotDominant(SORadialError, ValueError):
    """Weight violates the dominance inequalities."""


class NumericalDegeneracy(SORadialError, ArithmeticError):
    """A character evaluation could not reach its accuracy target."""


class SingularPoint(SORadialError, ValueError):
    """Evaluation point is too close to the singular set of the radial operator."""


class FormMismatch(SORadialError, ArithmeticError):
    """Equivalent forms of the radial Laplacian disagree beyond tolerance."""


class GridMismatch(SORadialError, ValueError):
    """Two grid functions live on different grids."""


class GridTooCoarse(SORadialError, ValueError):
    """Grid cannot resolve the requested spectral band."""


class IncompatibleRHS(SORadialError, ValueError):
    """Poisson right-hand side does not have zero Haar mean."""


class NotClassFunction(SORadialError, ValueError):
    """Function failed a conjugation (or Weyl-group) invariance spot check."""
