"""Exception hierarchy shared by all spacefp modules."""


class SpaceFPError(Exception):
    """Base class for every error raised by this package."""


class EmptyDataset(SpaceFPError, ValueError):
    pass


class EmptyInput(SpaceFPError, ValueError):
    pass


class InvalidParameters(SpaceFPError, ValueError):
    pass


class IncomparableVectors(SpaceFPError, ValueError):
    pass


class InsufficientData(SpaceFPError, ValueError):
    pass


class InvalidConfig(SpaceFPError, ValueError):
    pass


class InvalidInput(SpaceFPError, ValueError):
    pass


class ParseError(SpaceFPError, ValueError):
    """Malformed detection CSV. ``line`` is 1-based and counts the header."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
