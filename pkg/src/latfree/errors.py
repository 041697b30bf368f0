"""Exception hierarchy shared by all engine modules."""

from __future__ import annotations


class LatfreeError(Exception):
    """Base class for every error raised by the engine."""


class ParseError(LatfreeError):
    def __init__(self, message: str, pos: int | None = None, line: int | None = None):
        self.pos = pos
        self.line = line
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif pos is not None:
            where = f" (at offset {pos})"
        super().__init__(message + where)


class SignatureError(LatfreeError):
    """Unknown symbol, arity mismatch, or incompatible signatures."""


class UnboundGenerator(LatfreeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"generator {name!r} has no binding")


class BudgetExceeded(LatfreeError):
    """A configured combinatorial or elimination cap was hit."""


class NotAHomomorphism(LatfreeError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class PreconditionError(LatfreeError):
    """A documented precondition failed; ``witness`` pins down where."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class NotALattice(PreconditionError):
    pass


class NotDistributive(PreconditionError):
    pass
