"""Exception hierarchy shared across the package."""


class PolarityError(Exception):
    """Base class for all package errors."""


class InputError(PolarityError, ValueError):
    """Bad argument: dimension mismatch, non-finite values, out-of-range k, ..."""


class ModelFormatError(PolarityError):
    """Model/pool file could not be parsed (carries position context when known)."""


class ValidationError(PolarityError):
    """Parsed file is structurally readable but violates an invariant."""


class ConfigError(PolarityError):
    """Experiment configuration is inconsistent or refers to missing resources."""


class StateError(PolarityError):
    """Operation called on an object in the wrong state (e.g. incomplete atlas)."""


class ScaleError(PolarityError):
    """Problem size exceeds what the exact desk-scale oracles support."""


class SamplingTimeout(PolarityError):
    """Online rejection sampling stalled.

    Attributes:
        rejections: number of rejected candidates before giving up.
        acceptance_rate: empirical acceptance-rate estimate at the time of failure.
    """

    def __init__(self, rejections, acceptance_rate):
        self.rejections = rejections
        self.acceptance_rate = acceptance_rate
        super().__init__(
            f"rejection sampling stalled after {rejections} rejections "
            f"(estimated acceptance rate {acceptance_rate:.3e})"
        )
