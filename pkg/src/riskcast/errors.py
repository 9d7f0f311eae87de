"""Shared exception types for the riskcast package."""


class RiskcastError(Exception):
    """Base class for all riskcast errors."""


class InsufficientDataError(RiskcastError):
    """Not enough observations to evaluate a formula or fill a window."""


class DegenerateVolatilityError(RiskcastError):
    """Zero sample variance in a volatility window; log of zero is undefined."""


class EmptyPanelError(RiskcastError):
    """A log-volatility panel with no valid rows."""


class NumericalFailureError(RiskcastError):
    """Non-finite value encountered in a numerical routine."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DiagnosticsUnavailableError(RiskcastError):
    """Convergence diagnostics need at least two chains."""


class FormatError(RiskcastError):
    """Malformed binary or text input file."""


class SplitViolationError(RiskcastError):
    """Train/test temporal split violated by a manifest."""


class EmptyDatasetError(RiskcastError):
    """A dataset or split with no samples."""


class OversizedSentenceError(RiskcastError):
    """A single sentence exceeds the chunking character budget."""


class UpstreamError(RiskcastError):
    """An upstream LLM call failed after exhausting the retry budget."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ProtocolError(RiskcastError):
    """An upstream response violated the expected response contract."""
