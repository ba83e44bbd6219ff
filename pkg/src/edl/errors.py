"""Exception types shared across the pipeline."""


class EdlError(Exception):
    """Base class for all pipeline errors."""


class MalformedInput(EdlError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class DuplicateDocId(EdlError):
    pass


class UnknownEntityType(EdlError):
    pass


class CrossingSpans(EdlError):
    pass


class UnmatchedBracket(EdlError):
    pass


class PlaceholderCountMismatch(EdlError):
    pass


class ShapeMismatch(EdlError):
    pass


class NonFiniteLoss(EdlError):
    pass


class EmptySentence(EdlError):
    pass


class EmptyTrainingSet(EdlError):
    pass


class AlphabetMismatch(EdlError):
    pass


class DuplicateKbId(EdlError):
    pass


class EmptyList(EdlError):
    pass


class EmptyInput(EdlError):
    pass


class MissingArtifact(EdlError):
    pass
