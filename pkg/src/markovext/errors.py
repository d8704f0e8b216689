"""Exception hierarchy shared by all modules."""


class MarkovExtError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(MarkovExtError, ValueError):
    """Malformed or inconsistent arguments (length/dimension mismatches, unsupported sizes)."""


class DomainError(MarkovExtError, ValueError):
    """A parameter lies outside the mathematical domain of a formula."""


class ConstructionError(MarkovExtError):
    """A combinatorial object (e.g. a weak design) cannot be built for the requested parameters."""


class CompositionError(MarkovExtError):
    """Extractor composition preconditions (strongness, dimensions) are violated."""


class ResourceBudgetError(MarkovExtError):
    """An exact enumeration would exceed the configured budget; oracles never fall back to sampling."""


class CertificationError(MarkovExtError):
    """A min-entropy claim cannot be certified for the given state."""
