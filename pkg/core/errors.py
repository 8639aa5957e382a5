"""Exception hierarchy shared by the tardylab packages."""


class LabError(Exception):
    """Base class for every error raised on purpose by tardylab."""


class InstanceError(LabError):
    """Malformed job or instance data (negative values, duplicate ids, non-integers)."""


class PermutationError(LabError):
    """A schedule order that is not a bijection onto the instance's job ids."""


class DivisibilityError(LabError):
    """The number of groups does not divide the sum of the source values."""


class ParityError(LabError):
    """A Partition source instance with an odd total."""


class PreconditionError(LabError):
    """A generator or solver was called outside its stated preconditions."""


class BudgetExceededError(LabError):
    """An enumeration would exceed the configured budget."""

    def __init__(self, what: str, size: int, cap: int):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"{what}: {size} exceeds budget {cap}")


class FileFormatError(LabError):
    """A JSON file that does not follow the tardylab schema."""
