"""Exception types shared across the package."""


class AdmissibilityError(ValueError):
    """Parameters fall outside the window where a construction is valid."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to converge.

    ``diagnostics`` carries whatever partial information was available
    when the routine gave up.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
