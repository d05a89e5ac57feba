"""Exception hierarchy.

``DataError`` subclasses signal bad input data (exit code 2 from the CLI),
``ConfigError`` signals bad usage or configuration (exit code 1).
"""


class TouchstoneError(Exception):
    pass


class DataError(TouchstoneError):
    pass


class ConfigError(TouchstoneError):
    pass


class IoFailureError(TouchstoneError):
    pass


# -- traces ------------------------------------------------------------------

class TraceFormatError(DataError):
    pass


class MissingFileError(TraceFormatError):
    pass


class MalformedActionError(TraceFormatError):
    pass


class GapInStepsError(TraceFormatError):
    pass


# -- view hierarchies ----------------------------------------------------------

class VhError(DataError):
    pass


class XmlSyntaxError(VhError):
    pass


class BadBoundsError(VhError):
    pass


class BadAttributeError(VhError):
    pass


class EmptyHierarchyError(VhError):
    pass


class NodeNotInTreeError(VhError):
    pass


class BadXPathSyntaxError(VhError):
    pass


class NodeNotFoundError(VhError):
    pass


# -- annotations ---------------------------------------------------------------

class AnnotationError(DataError):
    pass


class AnnotationSyntaxError(AnnotationError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class UnknownKeywordError(AnnotationSyntaxError):
    pass


class DuplicateKeyStateError(AnnotationSyntaxError):
    pass


class NonMonotoneStepsError(AnnotationSyntaxError):
    pass


# -- matching / metrics --------------------------------------------------------

class MissingPackagesSnapshotError(DataError):
    pass


class ExternalServiceUnavailable(TouchstoneError):
    pass


class EmptyInputError(DataError):
    pass


class MissingLabelError(DataError):
    pass


class DatasetTraceMismatchError(DataError):
    pass


# -- simulated device ----------------------------------------------------------

class PackError(DataError):
    pass


class PackSyntaxError(PackError):
    pass


class DanglingScreenError(PackError):
    pass


class AmbiguousTransitionError(PackError):
    pass


class SessionError(TouchstoneError):
    pass


class SessionTerminatedError(SessionError):
    pass


class CoordinatesOutOfRangeError(SessionError):
    pass
