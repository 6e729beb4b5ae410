"""Exception hierarchy.

Every error carries a ``token`` (its class name) that the CLI prints as the
diagnostic, and an ``exit_code``: 1 for validation failures, 3 for numerical
failures.
"""


class EngelError(Exception):
    exit_code = 1

    @property
    def token(self) -> str:
        return type(self).__name__


class ValidationError(EngelError):
    exit_code = 1


class NumericalError(EngelError):
    exit_code = 3


# engel models
class NonFinitePoint(ValidationError): ...
class RankAmbiguous(NumericalError): ...
class NotContact(ValidationError): ...
class NotEngel(ValidationError): ...
class UnknownIdentifier(ValidationError): ...

# curves
class DegenerateSpeed(ValidationError): ...
class NotClosed(ValidationError): ...
class VanishingSection(ValidationError): ...
class NotKernelTangent(ValidationError): ...
class EverywhereTangentMember(ValidationError): ...
class BudgetExceeded(NumericalError): ...
class SubcriticalDomain(ValidationError): ...
class GridTooCoarse(NumericalError): ...

# geiges
class NotHorizontal(ValidationError): ...
class NotLegendrian(ValidationError): ...

# fronts
class UnresolvedCusp(NumericalError): ...
class SlopeBudgetExceeded(ValidationError): ...
class NoCuspFreeWindow(ValidationError): ...
class Infeasible(ValidationError): ...
class NotAdmissible(ValidationError): ...
class NumericallyDegenerate(NumericalError): ...

# rigidity lab
class NoConvergence(NumericalError): ...
class AngleMismatch(ValidationError): ...
class BadAngle(ValidationError): ...
class StrictConformal(ValidationError): ...

# homotopy engine
class WindingMismatch(ValidationError): ...
class RotationMismatch(ValidationError): ...
class NotHorizontalInput(ValidationError): ...
class SlopeBandExceeded(ValidationError): ...
class AreaInfeasible(ValidationError): ...
class NotImmersed(NumericalError): ...

# io / cli
class IoFailure(EngelError):
    exit_code = 3


class FormatError(ValidationError): ...
