"""Exception hierarchy shared by every layer of the codec."""


class LcpError(Exception):
    """Base class for all codec errors."""


class TruncatedStream(LcpError):
    """The stream ended before the expected number of bits or bytes."""


class CorruptStream(LcpError):
    """The stream is structurally invalid."""


class BadMagic(CorruptStream):
    """The container does not start with the expected magic bytes."""


class UnsupportedVersion(CorruptStream):
    """The container version is not understood by this reader."""


class OutOfRange(LcpError, ValueError):
    """A scaled measurement does not fit in a signed 16-bit integer."""


class ParseError(LcpError, ValueError):
    """A CSV cell or row could not be parsed.

    ``row`` is the 1-based line number in the input and ``column`` the
    0-based column index (``None`` when the whole row is at fault).
    """

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
