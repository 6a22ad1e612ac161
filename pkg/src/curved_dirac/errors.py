"""Exception hierarchy for curved_dirac."""


class CurvedDiracError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(CurvedDiracError, ValueError):
    """Model parameters violate tau != 0 or alpha^2 tau^2 != 1."""


class ConstraintError(CurvedDiracError):
    """A background family cannot satisfy Sigma_0 = eta and the a'^2 - a a'' condition."""


class SingularMetricError(CurvedDiracError, ZeroDivisionError):
    pass


class DomainError(CurvedDiracError, ValueError):
    """Evaluation point outside the open configuration space or too close to its edge."""


class BoundaryNotFoundError(CurvedDiracError):
    pass


class UnsupportedFamilyError(CurvedDiracError, TypeError):
    pass


class TurningPointError(CurvedDiracError):
    """a'(a)^2 vanishes inside the requested range of the double integration."""


class PoleError(CurvedDiracError, ValueError):
    """Kummer lower parameter at (or within 1e-12 of) a non-positive integer."""


class ConvergenceError(CurvedDiracError):
    pass


class DegenerateEnergyError(CurvedDiracError, ZeroDivisionError):
    pass


class MatchingSingularError(CurvedDiracError, ZeroDivisionError):
    """epsilon * eta = 0, so the origin matching formula divides by zero."""


class KineticBalanceSingularError(CurvedDiracError, ZeroDivisionError):
    pass


class ClosedFormUnavailableError(CurvedDiracError):
    """The Morse closed form needs (S0 + W0)^2 = (eta/2)^2."""


class AccuracyError(CurvedDiracError):
    pass


class BlowUpError(CurvedDiracError, FloatingPointError):
    def __init__(self, message: str, location: float):
        super().__init__(f"{message} (at {location!r})")
        self.location = location
