class SizeLimitError(ValueError):
    """Instance too large for an exhaustive or state-vector routine."""


class DataError(ValueError):
    """Input data is present but unusable (missing assets, too few rows)."""


class InvariantViolation(RuntimeError):
    """A result failed a structural check it is required to satisfy."""
