"""Exception hierarchy shared by all commnet modules."""


class CommnetError(Exception):
    """Base class for every error raised by commnet."""

    exit_code = 1


class NetworkError(CommnetError):
    exit_code = 8


class SelfLoop(NetworkError):
    pass


class EmptyLabelSet(NetworkError):
    pass


class DuplicateRespondentId(NetworkError):
    pass


class InvalidNetwork(NetworkError):
    pass


class EmptyResult(NetworkError):
    pass


class ConflictError(CommnetError):
    """A tie is flagged both from_project and pre_existing under the reject policy."""

    exit_code = 6


class MeasureError(CommnetError):
    exit_code = 9


class TooFewNodes(MeasureError):
    pass


class NoEdges(MeasureError):
    pass


class DegenerateAttribute(MeasureError):
    pass


class UnknownEgo(MeasureError):
    exit_code = 10


class NoAlters(MeasureError):
    pass


class IsolatedEgo(MeasureError):
    pass


class TooFewNeighbors(MeasureError):
    pass


class NotAnEgo(MeasureError):
    pass


class SamePair(MeasureError):
    pass


class TooFewEgos(MeasureError):
    pass


class EgoSetMismatch(MeasureError):
    exit_code = 10


class IngestError(CommnetError):
    pass


class MissingFile(IngestError):
    exit_code = 3


class SchemaMismatch(IngestError):
    exit_code = 4


class EmptyInput(IngestError):
    exit_code = 5


class AliasCycle(IngestError):
    exit_code = 7


class ReportError(CommnetError):
    exit_code = 12


class ConventionMismatch(ReportError):
    pass


class UnsupportedFormat(ReportError):
    pass


class InvalidConfig(CommnetError):
    exit_code = 11
