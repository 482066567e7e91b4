"""Exception hierarchy shared by all modules."""


class HyptypeError(Exception):
    """Base class for library errors."""


class GraphError(HyptypeError, ValueError):
    """Malformed graph, curve, or operation argument."""


class DisconnectedError(GraphError):
    """An operation would disconnect the graph."""


class InvalidInvolutionError(GraphError):
    """A map on half-edges is not a weight/length preserving involution."""


class SizeGuardError(HyptypeError):
    """Input exceeds the desk-scale limits of an exhaustive search."""


class PipelineError(HyptypeError):
    """A constructive step failed; carries a diagnostic message."""
