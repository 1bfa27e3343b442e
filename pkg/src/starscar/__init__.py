"""Half-scarred eigenvectors on quantum star graphs."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import AdmissibilityError, ConvergenceError

__all__ = ["AdmissibilityError", "ConvergenceError", "__version__"]
