"""Exception hierarchy shared by every krkit module."""


class KRKitError(Exception):
    """Base class for all toolkit errors."""


class KRSpecError(KRKitError, ValueError):
    """Invalid affine type, rank, node or width."""


class BudgetExceeded(KRKitError):
    """Generation produced more elements than the configured budget."""

    def __init__(self, budget: int, what: str = "crystal"):
        super().__init__(f"{what} exceeds element budget of {budget}")
        self.budget = budget


class CrystalStructureError(KRKitError):
    """A crystal operator broke a structural invariant."""


class VirtualCrystalError(CrystalStructureError):
    """A virtual image is not closed, not divisible or not consistent."""


class PhiError(CrystalStructureError):
    """Phi produced a tableau that is invalid or not J-highest."""


class MapExtensionError(KRKitError):
    """A crystal map could not be extended from its seeds.

    Attributes:
        element: key of the source element where extension failed
        color: color index involved, or None
    """

    def __init__(self, message: str, element=None, color=None):
        super().__init__(message)
        self.element = element
        self.color = color
