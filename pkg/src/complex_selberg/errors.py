"""Exception types raised by the library."""


class ComplexSelbergError(Exception):
    """Base class for all errors raised by this package."""


class ZeroToNonpositivePower(ComplexSelbergError, ZeroDivisionError):
    pass


class PoleAtNonpositiveInteger(ComplexSelbergError, ValueError):
    pass


class PoleInProduct(ComplexSelbergError, ArithmeticError):
    """A Gamma product has a net pole (the closed form diverges)."""


class IndeterminateRatio(ComplexSelbergError, ArithmeticError):
    """Poles and zeros cancel in order; the value needs a limit we refuse to guess."""


class CoincidentPoints(ComplexSelbergError, ValueError):
    pass


class SingularPoint(ComplexSelbergError, ValueError):
    """Integrand evaluated at a non-removable singularity."""


class NonFiniteSample(ComplexSelbergError, FloatingPointError):
    pass


class ParameterShapeError(ComplexSelbergError, ValueError):
    pass
