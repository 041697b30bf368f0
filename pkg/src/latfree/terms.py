"""Signatures, terms, S-expression I/O, substitution and height.

Terms are immutable and hash by structure, so they can be used directly as
dictionary keys during congruence closure.  Surface syntax is prefix::

    (vee (wedge x y) z)      (scale 3/7 x)      zero      (gen a)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .errors import ParseError, SignatureError, UnboundGenerator

# unicode spellings accepted by the parser; printing always uses ASCII
ALIASES = {
    "⊔": "vee",
    "⊓": "wedge",
    "⊕": "plus",
    "⊖": "neg",
    "⊙": "dot",
    "0": "zero",
    "1": "one",
}


class Gen:
    """A generator (or identity variable) leaf."""

    __slots__ = ("name", "_hash")

    height = 0
    size = 1

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("gen", name)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return isinstance(other, Gen) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Gen({self.name!r})"

    def __str__(self):
        return to_sexpr(self)

    def __reduce__(self):
        return (Gen, (self.name,))


class App:
    """Application of an operation symbol; ``scalar`` indexes scalar families."""

    __slots__ = ("op", "args", "scalar", "height", "size", "_hash")

    def __init__(self, op: str, args: tuple = (), scalar: Fraction | None = None):
        args = tuple(args)
        if scalar is not None:
            scalar = Fraction(scalar)
        set_ = object.__setattr__
        set_(self, "op", op)
        set_(self, "args", args)
        set_(self, "scalar", scalar)
        set_(self, "height", 1 + max(a.height for a in args) if args else 0)
        set_(self, "size", 1 + sum(a.size for a in args))
        set_(self, "_hash", hash((op, scalar, args)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.op == other.op
            and self.scalar == other.scalar
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.op!r}, {self.args!r}" + (
            f", scalar={self.scalar!r})" if self.scalar is not None else ")"
        )

    def __str__(self):
        return to_sexpr(self)

    def __reduce__(self):
        return (App, (self.op, self.args, self.scalar))


Term = Union[Gen, App]


def gen(name: str) -> Gen:
    return Gen(name)


def app(op: str, *args: Term, scalar=None) -> App:
    return App(op, args, scalar)


def var(i: int) -> Gen:
    """The i-th variable of the identity pool ``v1, v2, ...``."""
    return Gen(f"v{i}")


def _natural_key(name: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name)]


@dataclass(frozen=True)
class Signature:
    """Operation symbols with arities; ``scalar_ops`` are unary families m_q, q rational."""

    symbols: tuple[tuple[str, int], ...]
    scalar_ops: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple((str(n), int(a)) for n, a in self.symbols))
        object.__setattr__(self, "scalar_ops", frozenset(self.scalar_ops))
        names = [n for n, _ in self.symbols] + sorted(self.scalar_ops)
        if not names:
            raise SignatureError("a signature needs at least one symbol")
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate symbol names in {names}")
        for n, a in self.symbols:
            if a < 0:
                raise SignatureError(f"negative arity for {n}")

    def arity(self, name: str) -> int:
        if name in self.scalar_ops:
            return 1
        for n, a in self.symbols:
            if n == name:
                return a
        raise SignatureError(f"unknown symbol {name!r}")

    def __contains__(self, name) -> bool:
        return name in self.scalar_ops or any(n == name for n, _ in self.symbols)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.symbols] + sorted(self.scalar_ops)

    @property
    def constants(self) -> list[str]:
        return [n for n, a in self.symbols if a == 0]

    @property
    def operations(self) -> list[tuple[str, int]]:
        return [(n, a) for n, a in self.symbols if a > 0]

    def extend(self, symbols=(), scalar_ops=()) -> "Signature":
        return Signature(self.symbols + tuple(symbols), self.scalar_ops | frozenset(scalar_ops))

    def restrict(self, drop: Iterable[str]) -> "Signature":
        drop = set(drop)
        return Signature(
            tuple(s for s in self.symbols if s[0] not in drop),
            frozenset(s for s in self.scalar_ops if s not in drop),
        )

    def is_subsignature_of(self, other: "Signature") -> bool:
        return all(n in other and other.arity(n) == a for n, a in self.symbols) and (
            self.scalar_ops <= other.scalar_ops
        )

    def to_text(self) -> str:
        lines = [f"{n} {a}" for n, a in self.symbols]
        lines += [f"{n} 1 scalar" for n in sorted(self.scalar_ops)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Signature":
        """Parse one ``name arity`` per line; ``name 1 scalar`` declares a scalar family."""
        symbols, scalar_ops = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) == 3 and parts[2] == "scalar" and parts[1] == "1":
                scalar_ops.append(parts[0])
            elif len(parts) == 2 and parts[1].isdigit():
                symbols.append((parts[0], int(parts[1])))
            else:
                raise ParseError(f"bad signature line {raw!r}", line=lineno)
        return cls(tuple(symbols), frozenset(scalar_ops))


@dataclass(frozen=True)
class GeneratorSet:
    ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        if not self.ids:
            raise SignatureError("generator set must be non-empty")
        if len(set(self.ids)) != len(self.ids):
            raise SignatureError("duplicate generator names")

    def check_disjoint(self, sig: Signature) -> "GeneratorSet":
        clash = [g for g in self.ids if g in sig]
        if clash:
            raise SignatureError(f"generators clash with signature symbols: {clash}")
        return self

    def __iter__(self):
        return iter(self.ids)

    def __len__(self):
        return len(self.ids)

    def __contains__(self, name):
        return name in self.ids


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    label: str = ""

    @property
    def variables(self) -> list[str]:
        return sorted(generators_of(self.lhs) | generators_of(self.rhs), key=_natural_key)

    def __str__(self):
        return f"{to_sexpr(self.lhs)} = {to_sexpr(self.rhs)}"


# ---------------------------------------------------------------- traversal


def subterms(t: Term) -> Iterator[Term]:
    """Post-order walk over all subterm occurrences (children before parents)."""
    stack = [(t, False)]
    while stack:
        node, done = stack.pop()
        if done or isinstance(node, Gen) or not node.args:
            yield node
            continue
        stack.append((node, True))
        for child in reversed(node.args):
            stack.append((child, False))


def generators_of(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Gen)}


def height(t: Term) -> int:
    return t.height


def check_term(t: Term, sig: Signature, gens: Iterable[str] | None = None) -> Term:
    allowed = None if gens is None else set(gens)
    for s in subterms(t):
        if isinstance(s, Gen):
            if allowed is not None and s.name not in allowed:
                raise SignatureError(f"unknown generator {s.name!r}")
            continue
        if s.op not in sig:
            raise SignatureError(f"unknown symbol {s.op!r}")
        if len(s.args) != sig.arity(s.op):
            raise SignatureError(f"{s.op} expects {sig.arity(s.op)} arguments, got {len(s.args)}")
        if (s.scalar is not None) != (s.op in sig.scalar_ops):
            raise SignatureError(f"scalar index misuse on {s.op!r}")
    return t


def substitute(t: Term, binding: Mapping[str, Term]) -> Term:
    """Simultaneously replace generators by terms; every occurring generator must be bound."""
    memo: dict[Term, Term] = {}
    for s in subterms(t):
        if s in memo:
            continue
        if isinstance(s, Gen):
            if s.name not in binding:
                raise UnboundGenerator(s.name)
            memo[s] = binding[s.name]
        elif not s.args:
            memo[s] = s
        else:
            memo[s] = App(s.op, tuple(memo[a] for a in s.args), s.scalar)
    return memo[t]


# ---------------------------------------------------------------- text I/O


def _fmt_scalar(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_sexpr(t: Term, sig: Signature | None = None) -> str:
    """Render a term; generators that would read as symbols are wrapped in ``(gen ..)``."""
    memo: dict[Term, str] = {}
    for s in subterms(t):
        if s in memo:
            continue
        if isinstance(s, Gen):
            clash = (sig is not None and s.name in sig) or s.name in ("gen",) or s.name in ALIASES
            clash = clash or not _ATOM_RE.fullmatch(s.name)
            memo[s] = f"(gen {s.name})" if clash else s.name
        elif not s.args:
            memo[s] = s.op
        else:
            parts = [s.op]
            if s.scalar is not None:
                parts.append(_fmt_scalar(s.scalar))
            parts.extend(memo[a] for a in s.args)
            memo[s] = "(" + " ".join(parts) + ")"
    return memo[t]


_TOKEN_RE = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_ATOM_RE = re.compile(r"[^\s()]+")


def _tokenize(src: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        tok = m.group(1) or m.group(2) or m.group(3)
        if tok is None:
            break
        out.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return out


def _parse_scalar(tok: str, pos: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad scalar {tok!r}", pos) from None


def parse_term(src: str, sig: Signature, gens: Iterable[str] | GeneratorSet | None = None) -> Term:
    """Parse a prefix S-expression over ``sig``.

    Bare atoms that are not symbols of ``sig`` are generators; when ``gens``
    is given they must belong to it.  ``(gen name)`` forces a generator.
    """
    allowed = None if gens is None else set(gens)
    tokens = _tokenize(src)
    if not tokens:
        raise ParseError("empty term", 0)
    i = 0

    def canon(tok):
        return ALIASES.get(tok, tok) if ALIASES.get(tok, tok) in sig else tok

    def make_gen(name, pos):
        if allowed is not None and name not in allowed:
            raise ParseError(f"unknown symbol {name!r}", pos)
        return Gen(name)

    def atom(tok, pos):
        name = canon(tok)
        if name in sig:
            if name in sig.scalar_ops or sig.arity(name) != 0:
                raise ParseError(f"arity mismatch: {name} needs {sig.arity(name)} argument(s)", pos)
            return App(name)
        return make_gen(tok, pos)

    def parse():
        nonlocal i
        if i >= len(tokens):
            raise ParseError("unbalanced parentheses: unexpected end of input", len(src))
        tok, pos = tokens[i]
        i += 1
        if tok == ")":
            raise ParseError("unbalanced parentheses: unexpected ')'", pos)
        if tok != "(":
            return atom(tok, pos)
        if i >= len(tokens):
            raise ParseError("unbalanced parentheses: missing ')'", len(src))
        head, hpos = tokens[i]
        i += 1
        if head in ("(", ")"):
            raise ParseError("expected an operation symbol", hpos)
        if head == "gen":
            if i >= len(tokens) or tokens[i][0] in "()":
                raise ParseError("(gen ...) expects a name", hpos)
            name, npos = tokens[i]
            i += 1
            _expect_close(hpos)
            return make_gen(name, npos)
        name = canon(head)
        if name not in sig:
            raise ParseError(f"unknown symbol {head!r}", hpos)
        scalar = None
        if name in sig.scalar_ops:
            if i >= len(tokens) or tokens[i][0] in "()":
                raise ParseError(f"{name} expects a rational index", hpos)
            scalar = _parse_scalar(*tokens[i])
            i += 1
        args = []
        while i < len(tokens) and tokens[i][0] != ")":
            args.append(parse())
        _expect_close(hpos)
        want = sig.arity(name)
        if len(args) != want:
            raise ParseError(f"arity mismatch: {name} expects {want} argument(s), got {len(args)}", hpos)
        return App(name, tuple(args), scalar)

    def _expect_close(open_pos):
        nonlocal i
        if i >= len(tokens):
            raise ParseError("unbalanced parentheses: missing ')'", open_pos)
        if tokens[i][0] != ")":
            raise ParseError(f"unexpected token {tokens[i][0]!r}", tokens[i][1])
        i += 1

    t = parse()
    if i != len(tokens):
        raise ParseError(f"trailing input {tokens[i][0]!r}", tokens[i][1])
    return t


def parse_identity(src: str, sig: Signature) -> Identity:
    """``lhs = rhs`` with both sides in prefix syntax."""
    if src.count("=") != 1:
        raise ParseError("identity needs exactly one '='", 0)
    left, right = src.split("=")
    return Identity(parse_term(left, sig), parse_term(right, sig), src.strip())
