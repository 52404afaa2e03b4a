"""Exception types raised by graphclust."""


class GraphClustError(Exception):
    """Base class for all graphclust errors."""


class ShapeMismatch(GraphClustError):
    pass


class IndexOutOfRange(GraphClustError):
    pass


class NonScalarLoss(GraphClustError):
    pass


class MissingLabels(GraphClustError):
    pass


class AllIsolated(GraphClustError):
    pass


class EmptyEdgeSet(GraphClustError):
    pass


class NoDisconnectedPairs(GraphClustError):
    pass


class TooFewPoints(GraphClustError):
    pass


class LengthMismatch(GraphClustError):
    pass


class NonFiniteLoss(GraphClustError):
    pass


class CorruptBundle(GraphClustError):
    pass


class ParseError(GraphClustError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
