"""Exception hierarchy shared by every advtext module."""


class AdvTextError(Exception):
    """Base class for all advtext errors."""


class ConfigError(AdvTextError):
    """Invalid run configuration. ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DataError(AdvTextError):
    """Problem with an input file or with the data it holds."""


class MalformedRecord(DataError):
    pass


class UnknownLabel(DataError):
    pass


class EmptyFile(DataError):
    pass


class DimensionMismatch(DataError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class NotBinary(DataError):
    pass


class EmptyClass(DataError):
    pass


class UnknownGenre(DataError):
    pass


class CorruptFile(DataError):
    pass


class VersionMismatch(DataError):
    def __init__(self, found, supported):
        super().__init__(
            f"model file format version {found} is newer than supported version {supported}"
        )
        self.found = found
        self.supported = supported


class LengthMismatch(DataError):
    pass


class EmptyDocument(AdvTextError):
    pass


class IndexOutOfRange(AdvTextError, IndexError):
    pass


class EmptyDocumentWarning(UserWarning):
    """Emitted when a posterior is requested for a document with no tokens."""
