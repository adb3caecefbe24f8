"""Exception hierarchy shared across the elss package."""


class ElssError(Exception):
    """Base class for all elss errors."""


# --- raster ---------------------------------------------------------------

class MissingSidecar(ElssError):
    pass


class MalformedHeader(ElssError):
    pass


class DimensionMismatch(ElssError):
    pass


class UnknownClassIndex(ElssError):
    pass


class UnresolvableClassName(ElssError):
    pass


class ShapeMismatch(ElssError):
    pass


class OutOfBounds(ElssError):
    pass


# --- proposal engine ------------------------------------------------------

class InvalidHalfWidth(ElssError):
    pass


class RasterTooSmall(ElssError):
    pass


class EmptyResponse(ElssError):
    pass


class BelowFloor(ElssError):
    """Raised when the response maximum does not exceed the configured floor.

    Signals normal termination of the proposal loop, not a failure.
    """


# --- verifier -------------------------------------------------------------

class VerifierTransportError(ElssError):
    """Base for remote-verifier failures. Carries the candidate identity
    (when known) so the proposal loop can surface a partial trace."""

    def __init__(self, message, candidate=None):
        super().__init__(message)
        self.candidate = candidate


class VerifierTimeout(VerifierTransportError):
    pass


class AuthFailure(VerifierTransportError):
    pass


class MalformedResponse(VerifierTransportError):
    pass


class LoopAborted(ElssError):
    """Verifier transport failure inside the proposal loop; ``partial_trace``
    holds everything recorded before the failing iteration."""

    def __init__(self, cause, partial_trace):
        super().__init__(f"proposal loop aborted: {cause}")
        self.cause = cause
        self.partial_trace = partial_trace


# --- context ranker -------------------------------------------------------

class FrameMismatch(ElssError):
    pass


class EmptyInput(ElssError):
    pass


# --- eval harness ---------------------------------------------------------

class NoMatchingEntries(ElssError):
    pass


class MissingGroundTruth(ElssError):
    pass


class UndefinedMetric(ElssError):
    """A metric denominator is zero; reported explicitly, never silently 0."""


class IdMismatch(ElssError):
    pass


class SchemaViolation(ElssError):
    pass


class NotFourCandidates(SchemaViolation):
    pass


# --- cli / pipeline -------------------------------------------------------

class ConfigError(ElssError):
    pass
