"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed formula text. Carries the 1-based line and column of the offending token."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class HorizonError(ValueError):
    """A formula looks further into the future than the trajectories it is evaluated on allow."""
