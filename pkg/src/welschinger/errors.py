"""Exception types shared across modules."""


class LatticeError(ValueError):
    """Malformed surface or class, or classes on different surfaces."""


class InvalidKey(ValueError):
    """An invariant key fails the validity conditions."""


class ContactError(ValueError):
    """Tangency data inconsistent with the intersection with the divisor."""


class ParityError(ValueError):
    """A quantity that must be an integer (or even) is not."""


class SideConditionError(ValueError):
    """A relation was applied outside the range where it holds."""


class MissingFact(LookupError):
    """A fact needed for a computation is not in the store."""


class MalformedRecord(ValueError):
    """A fact file line that cannot be read back."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason
