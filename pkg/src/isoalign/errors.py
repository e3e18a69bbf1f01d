"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed input file. Carries the path and 1-based line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class DuplicateWordError(ParseError):
    pass


class ZeroVectorError(ValueError):
    """A row that cannot be length-normalised. Names the offending word."""

    def __init__(self, word):
        self.word = word
        super().__init__(f"cannot length-normalise zero vector for word {word!r}")


class CoverageError(ValueError):
    """Too few usable dictionary pairs for the requested operation."""

    def __init__(self, message, found=None, needed=None):
        self.found = found
        self.needed = needed
        super().__init__(message)


class UndefinedCorrelationError(ValueError):
    """Correlation of a zero-variance sequence is undefined."""


class UnreachableBudgetError(ValueError):
    """A snapshot budget lies beyond the planned token stream."""

    def __init__(self, budgets, available):
        self.budgets = list(budgets)
        self.available = available
        super().__init__(
            "snapshot budget(s) %s exceed the planned stream of %d tokens"
            % (", ".join(str(b) for b in self.budgets), available)
        )


class DivergenceError(RuntimeError):
    """Training produced non-finite values."""

    def __init__(self, token_position):
        self.token_position = token_position
        super().__init__(
            f"non-finite vectors detected near token {token_position}; "
            "try a lower learning rate"
        )
