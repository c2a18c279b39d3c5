"""Exception hierarchy for rmtlab."""


class RmtlabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(RmtlabError, ValueError):
    pass


class DomainError(RmtlabError, ValueError):
    """Argument outside the region where an evaluator is valid."""


class NoOneCutSolutionError(RmtlabError):
    pass


class DegenerateSupportError(RmtlabError):
    pass


class NotCriticalError(RmtlabError):
    pass


class InstabilityError(RmtlabError):
    """Recurrence lost positivity; the quadrature needs more nodes."""


class AccuracyError(RmtlabError):
    pass


class IntegrationError(RmtlabError):
    pass


class TruncationError(RmtlabError):
    pass


class IrregularEdgeError(RmtlabError):
    """The density does not vanish like a square root at the requested edge."""


class ExperimentError(RmtlabError):
    """A per-n stage of an experiment failed; the message names the n."""
