"""Exception hierarchy shared by all solver modules."""


class PreserverError(Exception):
    """Base class for every error raised by this package."""


class UnreachablePair(PreserverError):
    def __init__(self, s, t):
        super().__init__(f"node {t} is unreachable from node {s}")
        self.pair = (s, t)


class NonShortestWitness(PreserverError):
    pass


class PathExplosion(PreserverError):
    def __init__(self, cap, what="path combinations"):
        super().__init__(f"more than {cap} {what}")
        self.cap = cap


class CyclicAfterContraction(PreserverError):
    pass


class LpInfeasible(PreserverError):
    pass


class LpNumericalFailure(PreserverError):
    pass


class DimensionMismatch(PreserverError):
    pass


class NonConservingInput(PreserverError):
    pass


class AlreadyDirected(PreserverError):
    pass


class InfeasibleInput(PreserverError):
    pass


class InvalidPartition(PreserverError):
    pass


class StructureViolation(PreserverError):
    pass


class ValidationError(PreserverError):
    pass


class ParseError(PreserverError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class InfeasibleParameters(PreserverError):
    pass
