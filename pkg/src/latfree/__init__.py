"""Term algebras, finite algebras, free lattices, and free vector lattice algebras."""

from .errors import (
    BudgetExceeded,
    LatfreeError,
    NotAHomomorphism,
    NotALattice,
    NotDistributive,
    ParseError,
    PreconditionError,
    SignatureError,
    UnboundGenerator,
)
from .terms import App, Gen, GeneratorSet, Identity, Signature, parse_identity, parse_term, to_sexpr
from .theories import theory

__version__ = "0.1.0"

__all__ = [
    "App",
    "BudgetExceeded",
    "Gen",
    "GeneratorSet",
    "Identity",
    "LatfreeError",
    "NotAHomomorphism",
    "NotALattice",
    "NotDistributive",
    "ParseError",
    "PreconditionError",
    "Signature",
    "SignatureError",
    "UnboundGenerator",
    "parse_identity",
    "parse_term",
    "theory",
    "to_sexpr",
]
