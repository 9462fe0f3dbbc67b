"""Exception types shared across the package."""


class GuardError(ValueError):
    """A desk-scale size guard was exceeded."""


class DecodingError(ValueError):
    """Measurement records could not be turned into a bit string."""
