# util/errors.py
# ---------------------------------------------------------
# Exception hierarchy shared by every package.
# The CLI maps these onto process exit codes (see pipeline.py).
# ---------------------------------------------------------

import numpy as np


class EstimationToolkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(EstimationToolkitError, ValueError):
    """Bad sizes, indices or shapes handed to an operation."""


class SingularSystemError(EstimationToolkitError, np.linalg.LinAlgError):
    """A least-squares system cannot be solved uniquely."""

    def __init__(self, message: str, block: str | None = None):
        super().__init__(message)
        self.block = block


class ConfigError(EstimationToolkitError, ValueError):
    """Experiment configuration is malformed or names unknown things."""
