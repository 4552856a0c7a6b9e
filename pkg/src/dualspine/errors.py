class DualSpineError(Exception):
    """Base class for errors raised by this package."""


class ParseError(DualSpineError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column}")
        super().__init__(f"{', '.join(loc)}: {message}" if loc else message)
        self.message = message

    def at_line(self, line: int) -> "ParseError":
        return ParseError(self.message, line=line, column=self.column)


class GroupMismatchError(DualSpineError, ValueError):
    pass


class ShapeError(DualSpineError, ValueError):
    pass


class VerificationError(DualSpineError):
    """An exact identity failed; ``degree`` and ``entry`` locate the first failure."""

    def __init__(self, message, degree=None, entry=None, stage=None):
        self.degree = degree
        self.entry = entry
        self.stage = stage
        parts = [message]
        if stage is not None:
            parts.insert(0, f"[{stage}]")
        if degree is not None:
            parts.append(f"(degree {degree}" + (f", entry {entry})" if entry is not None else ")"))
        super().__init__(" ".join(parts))


class PreconditionError(DualSpineError):
    def __init__(self, message, stage=None):
        self.stage = stage
        super().__init__(f"[{stage}] {message}" if stage else message)


class UnsupportedError(DualSpineError):
    """The question is not decided over the given ring (reported, not guessed)."""


class MoveError(DualSpineError, ValueError):
    pass


class PresentationError(DualSpineError, ValueError):
    pass
