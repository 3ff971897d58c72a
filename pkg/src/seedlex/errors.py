"""Exception hierarchy shared by all modules."""


class DataError(ValueError):
    """Malformed or inconsistent input data (files, dictionaries, matrices)."""


class FormatError(DataError):
    """A file does not follow its expected text format."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class DimensionError(DataError):
    """Vector or matrix dimensions do not agree."""


class TranslationError(DataError):
    """A translation provider failed on a batch of words."""

    def __init__(self, message, batch):
        self.batch = list(batch)
        super().__init__(f"{message} (batch of {len(self.batch)} words starting with {self.batch[:3]!r})")
