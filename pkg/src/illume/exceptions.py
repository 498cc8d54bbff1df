"""Exception hierarchy shared by all modules."""


class IllumeError(ValueError):
    """Base class for every error raised by the package."""


class BodyParseError(IllumeError):
    """Malformed body specification text or rational literal."""


class InvariantError(IllumeError):
    """A value violates a structural invariant (sorted rows, nonnegativity, ...)."""


class DimensionError(IllumeError):
    """Vector or matrix length does not match the body dimension."""


class NotOnBoundaryError(IllumeError):
    """A point expected on the boundary of the body is not there."""


class InadmissibleDirectionError(IllumeError):
    pass


class LemmaViolation(AssertionError):
    """A checked geometric lemma failed; this is never silenced."""


class CapExceededError(IllumeError):
    """An enumeration would exceed the configured size cap."""


class RoundLimitError(IllumeError):
    pass
