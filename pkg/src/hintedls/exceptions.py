"""Error types raised across the package."""


class HintedLSError(Exception):
    """Base class for package-specific errors."""


class NonConvergenceError(HintedLSError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class TrajectoryOverflowError(HintedLSError):
    """A simulated state left the numeric safety envelope (mis-specified system)."""


class DivergenceError(HintedLSError):
    """An observer rollout diverged (non-stabilizing gain)."""


class NotApplicableError(HintedLSError):
    """The requested quantity is undefined for the given configuration."""


class NotObservableError(HintedLSError):
    """The (A, C) pair is not observable; gain design is impossible."""


class EmptyGridError(HintedLSError):
    """No candidate gain in the search grid passed certification."""


class InvalidLevelError(ValueError, HintedLSError):
    """A robustness level parameter is outside its domain."""


class LengthMismatchError(ValueError, HintedLSError):
    """Paired series have different lengths."""


class DegenerateFitError(HintedLSError):
    """Too few points for a meaningful regression fit."""


class UnknownPresetError(KeyError, HintedLSError):
    """No experiment preset registered under the requested name."""


class ConfigError(ValueError, HintedLSError):
    """Malformed experiment configuration (unknown or invalid keys)."""


class ProtocolViolationError(HintedLSError):
    """The prediction protocol was broken (observation read before committing)."""
