"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class RejectedRealizationError(DomainError):
    """A realization hits a probability-zero coincidence (e.g. a link time equal to a hole time)."""


class FixtureError(DomainError):
    """A serialized realization failed schema or invariant validation.

    ``field`` names the offending location, e.g. ``holes[3][1]``.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class HorizonError(IndexError):
    """A query reaches beyond the explored or simulated horizon."""
