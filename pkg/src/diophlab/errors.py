"""Exception hierarchy shared by every diophlab module."""


class DiophlabError(Exception):
    """Base class for all library errors."""


class DomainError(DiophlabError, ValueError):
    """An input lies outside the range where a formula or construction is defined."""


class DimensionError(DiophlabError, ValueError):
    pass


class PrecisionError(DiophlabError):
    """A requested construction does not fit in the configured bit budget."""


class PrecisionExhausted(DiophlabError):
    """A decision could not be separated at the maximum configured precision."""


class BudgetExceeded(DiophlabError):
    """An enumeration would visit more nodes than the configured budget."""


class InsufficientLadder(DiophlabError):
    pass


class ConstructionError(DiophlabError):
    """A witness does not satisfy the hypotheses of a reduction step."""


class PreconditionFailed(DiophlabError):
    pass


class ConfigError(DiophlabError, ValueError):
    pass
