"""Exception types shared across the package."""


class UnsupportedRegimeError(ValueError):
    """Parameters outside every implemented characterization."""


class AdmissibilityError(ValueError):
    """A hypothesis of the relevant characterization fails; ``t`` is the witness point."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class DegenerateWeightError(ValueError):
    """A weight that must be inverted vanishes where it is evaluated."""
