"""Exception hierarchy shared by all modules."""


class ToricError(Exception):
    """Base class for errors raised by this package."""


class UnboundedPolyhedron(ToricError):
    pass


class DimensionTooLarge(ToricError):
    pass


class NotSpanning(ToricError):
    pass


class PrecondViolated(ToricError):
    pass


class NotFano(ToricError):
    pass


class NotPicardThree(ToricError):
    pass


class NotProjective(ToricError):
    pass


class NotNefFano(ToricError):
    pass


class TorsionNotSupported(ToricError):
    """Raised where an operation needs a torsion-free Picard group."""


class EnumerationUnbounded(ToricError):
    """A cohomology fiber failed its boundedness certificate (internal bug)."""


class BadParams(ToricError, ValueError):
    pass


class EpsilonOutOfRange(ToricError, ValueError):
    pass


class InvalidConfig(ToricError, ValueError):
    pass


class BudgetExhausted(ToricError):
    pass


class ConstructionShortfall(ToricError):
    """The strong collection came out shorter than three quarters of rk K0."""
