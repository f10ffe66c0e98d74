"""Exception hierarchy shared by every k3kit module.

Two families matter to callers: precondition failures (bad input, a case the
mathematics does not cover) and budget failures (the enumeration would be too
large).  The CLI maps them to exit codes 2 and 3.
"""


class K3KitError(Exception):
    """Base class for all library errors."""

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class PreconditionError(K3KitError, ValueError):
    pass


class BudgetError(K3KitError, RuntimeError):
    pass


class ZeroInput(PreconditionError):
    pass


class NotCoprime(PreconditionError):
    pass


class NotPrime(PreconditionError):
    pass


class DegenerateLattice(PreconditionError):
    pass


class OddLattice(PreconditionError):
    pass


class UnsupportedPrime(PreconditionError):
    pass


class MismatchedContext(PreconditionError):
    pass


class SingularMinor(PreconditionError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"leading principal minor m{index} vanishes")


class ZeroEntry(PreconditionError):
    pass


class DegenerateMatrix(PreconditionError):
    pass


class DegeneratePencil(PreconditionError):
    pass


class DivisionByZero(PreconditionError, ZeroDivisionError):
    pass


class AmbiguousReconstruction(PreconditionError):
    pass


class Inconsistent(PreconditionError):
    pass


class InsufficientData(PreconditionError):
    pass


class OnDiscriminant(PreconditionError):
    pass


class RepresentativeUndefined(PreconditionError):
    pass


class NotOnSurface(PreconditionError):
    pass


class CertificateFailed(PreconditionError):
    def __init__(self, component, message):
        self.component = component
        super().__init__(f"component ({component}): {message}")


class BudgetExceeded(BudgetError):
    pass


class BudgetExhausted(BudgetError):
    pass
