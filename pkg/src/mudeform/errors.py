"""Exceptions shared across the package."""


class EvaluationError(RuntimeError):
    """A numeric evaluation failed to meet its accuracy contract.

    Carries the best available estimate (when one exists) in ``best`` so
    callers can degrade gracefully.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
