"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """An enumeration or search would exceed its configured cap."""


class NotApplicableError(ValueError):
    """A quantity is undefined for the given object (e.g. bound needs equal ranks)."""


class InconsistentCodeError(ValueError):
    """A word or code violates the structure it claims to have."""
