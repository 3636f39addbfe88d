"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ConsistencyError(RuntimeError):
    """A computed object failed a self-check (e.g. a schedule misses its target)."""
