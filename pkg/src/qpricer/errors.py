"""Package-level exceptions."""


class AllShotsRejectedError(RuntimeError):
    """Every shot of an experiment failed the unary post-selection check."""
