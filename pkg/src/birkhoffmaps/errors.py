"""Exception hierarchy shared by all submodules."""


class BirkhoffMapsError(Exception):
    """Base class for every error raised by this package."""


# jets
class JetArithmeticError(BirkhoffMapsError, ArithmeticError):
    pass


class DivisionByZeroJet(JetArithmeticError, ZeroDivisionError):
    pass


class BranchPoint(JetArithmeticError):
    pass


class BasePointMismatch(BirkhoffMapsError, ValueError):
    pass


class ExpressionError(BirkhoffMapsError):
    """A jet or numeric failure while evaluating an expression DAG.

    ``node`` is the offending sub-expression.
    """

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


# maps / parser
class ExpressionSyntaxError(BirkhoffMapsError, ValueError):
    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class NonRationalConstruct(BirkhoffMapsError, ValueError):
    pass


class ParamDomainError(BirkhoffMapsError, ValueError):
    pass


class SingularBasePoint(BirkhoffMapsError, ValueError):
    pass


class SpecFileError(BirkhoffMapsError, ValueError):
    pass


# spectral / normal form
class NoConvergence(BirkhoffMapsError, RuntimeError):
    pass


class NotAFixedPoint(BirkhoffMapsError, ValueError):
    pass


class NotElliptic(BirkhoffMapsError, ValueError):
    pass


class IllConditionedEigenbasis(BirkhoffMapsError, ValueError):
    pass


class ThreeResonance(BirkhoffMapsError, ZeroDivisionError):
    pass


class ResonanceObstruction(BirkhoffMapsError, ArithmeticError):
    def __init__(self, order, degree=None, divisor=None):
        msg = f"resonance of order {order} obstructs the normal form"
        if degree is not None:
            msg += f" at degree {degree}"
        if divisor is not None:
            msg += f" (|divisor| = {divisor:.3e})"
        super().__init__(msg)
        self.order = order
        self.degree = degree
        self.divisor = divisor


# finiteness
class DegreeZeroRecurrence(BirkhoffMapsError, ValueError):
    pass


class NotPolynomializable(BirkhoffMapsError, ValueError):
    pass


class ScanLimitExceeded(BirkhoffMapsError, ValueError):
    pass


# dynamics
class HitSingularLine(BirkhoffMapsError, RuntimeError):
    pass


class DensityVanishes(BirkhoffMapsError, ValueError):
    pass


class NotClosedOrbit(BirkhoffMapsError, RuntimeError):
    pass


class FlowMissesImage(BirkhoffMapsError, RuntimeError):
    pass
