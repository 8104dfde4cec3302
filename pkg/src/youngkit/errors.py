"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Non-finite coordinates, negative weights or an undefined map value."""


class DimensionMismatchError(ValueError):
    pass


class DegenerateMeasureError(ValueError):
    """Operation needs positive total mass (or a nonempty measure)."""


class MassMismatchError(ValueError):
    pass


class InvalidBatteryError(ValueError):
    pass


class CarrierMismatchError(ValueError):
    """Binary Young-function operations need identical carriers."""


class AtomFloorViolation(ValueError):
    """A measure has an atom lighter than the required floor."""
