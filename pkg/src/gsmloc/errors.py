"""Exception hierarchy shared by every gsmloc module."""


class GsmLocError(Exception):
    """Base class for all domain errors raised by gsmloc."""


# topology / databases
class TopologyError(GsmLocError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateCell(TopologyError):
    pass


class OrphanLa(TopologyError):
    pass


class ConflictingLa(TopologyError):
    """An LA was assigned to more than one MSC."""


class EmptyTopology(TopologyError):
    pass


class UnknownImsi(GsmLocError):
    pass


class UnknownCell(GsmLocError):
    pass


class UnknownLa(GsmLocError):
    pass


# procedures
class LaMismatch(GsmLocError):
    pass


class SubscriberDetached(GsmLocError):
    """The subscriber has no serving VLR."""


class CalleeDetached(SubscriberDetached):
    pass


class CallerDetached(SubscriberDetached):
    pass


class NotRegisteredHere(GsmLocError):
    pass


# fuzzy engine
class NoBranchMatches(GsmLocError):
    pass


class EmptyInput(GsmLocError):
    pass


class FuzzySpecError(GsmLocError):
    pass


# tiered VLR
class EmptyWindow(GsmLocError):
    pass


class DayOutOfWindow(GsmLocError):
    pass


# harness
class TraceError(GsmLocError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TraceOutOfOrder(TraceError):
    pass


class UnresolvableId(TraceError):
    pass


class DominanceViolation(GsmLocError):
    """The intelligent scheme issued more HLR queries, or routed differently, than baseline."""


class ConfigError(GsmLocError):
    pass
