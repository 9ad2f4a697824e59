"""Exception hierarchy shared by all modules."""


class DistributionError(Exception):
    """Base class for every error raised by reconfdist."""


class InterfaceOverlap(DistributionError):
    pass


class UniverseMismatch(DistributionError):
    pass


class NotDeterministic(DistributionError):
    pass


class NotCommunicationClosed(DistributionError):
    pass


class BadPartition(DistributionError):
    pass


class BadIndex(DistributionError):
    pass


class CompanionMissing(DistributionError):
    pass


class NoValidPartition(DistributionError):
    pass


class LabelInconsistentBlock(DistributionError):
    pass


class BlockPropertyViolation(DistributionError):
    """A compressed system broke the initiate/react block properties."""


class EmptyMealy(DistributionError):
    pass


class InvalidSystem(DistributionError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(f"system is not well formed:\n{lines}")


class VerificationFailed(DistributionError):
    """Recomposition is not bisimilar to the source; carries the evidence."""

    def __init__(self, message, trace=None, witness=None):
        super().__init__(message)
        self.trace = trace
        self.witness = witness


class ParseError(DistributionError):
    def __init__(self, message, line=None, column=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if field is not None:
            where.append(f"field {field!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
        self.line = line
        self.column = column
        self.field = field


class SchemaError(DistributionError):
    def __init__(self, message, missing=(), extra=()):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        parts = [message]
        if self.missing:
            parts.append("missing: " + ", ".join(self.missing))
        if self.extra:
            parts.append("unexpected: " + ", ".join(self.extra))
        super().__init__("; ".join(parts))
