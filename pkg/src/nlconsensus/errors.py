"""Exception hierarchy shared by all modules."""


class ConsensusError(Exception):
    """Base class for every error raised by nlconsensus."""


class NotStronglyConnected(ConsensusError):
    pass


class DegenerateNullspace(ConsensusError):
    pass


class NonPositiveEntry(ConsensusError):
    pass


class NonMonotone(ConsensusError):
    pass


class NonFiniteState(ConsensusError):
    pass


class InvariantViolation(ConsensusError):
    pass


class Incomparable(ConsensusError):
    pass


class ParseError(ConsensusError):
    """Malformed input file. Carries 1-based ``line`` and ``column``."""

    def __init__(self, message, line=None, column=None, path=None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(str(self))

    def __str__(self):
        where = []
        if self.path is not None:
            where.append(str(self.path))
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column}")
        prefix = ", ".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message
