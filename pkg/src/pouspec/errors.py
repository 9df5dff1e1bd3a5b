"""Exception types shared across the package."""

from __future__ import annotations

import numpy as np


class DomainError(ValueError):
    """Evaluation or integration was requested outside a function's domain."""


class ConfigError(ValueError):
    """Invalid construction parameters or a malformed analysis configuration."""


class NotConstructibleError(RuntimeError):
    """A requested analytic construction (e.g. a kernel witness) does not
    exist for the given combination of functional kinds."""


class UnsupportedSizeError(ValueError):
    """Matrix dimension outside the supported range of an operation."""


class EigensolverError(RuntimeError):
    """QR iteration failed to converge within the sweep budget.

    ``partial`` holds the eigenvalues that deflated before the failure.
    """

    def __init__(self, message: str, partial: np.ndarray | None = None):
        super().__init__(message)
        self.partial = partial if partial is not None else np.empty(0, dtype=complex)
