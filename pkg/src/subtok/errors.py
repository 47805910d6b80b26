"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: parameter/format problems
exit 2, I/O and decoding problems exit 1, numerical failures exit 3.
"""


class SubtokError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SubtokError, ValueError):
    """An argument violates a documented precondition."""


class FormatError(SubtokError, ValueError):
    """A file does not match its declared on-disk format."""


class CorpusDecodeError(SubtokError, ValueError):
    """Input bytes are not valid UTF-8."""

    def __init__(self, byte_offset: int, detail: str = ""):
        self.byte_offset = byte_offset
        msg = f"invalid UTF-8 at byte offset {byte_offset}"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class ShapeError(SubtokError, ValueError):
    """Tensor operands have incompatible shapes."""


class NumericalError(SubtokError, ArithmeticError):
    """A computation produced non-finite values."""
