"""Finite abstract algebras: homomorphisms, congruences, quotients, products,
subalgebras, and (quasi-)identity satisfaction.

Carriers are ``range(n)``; each operation is a numpy integer table of shape
``(n,) * arity``.  Identity checks evaluate both sides over every assignment at
once by fancy indexing, which keeps exhaustive sweeps of ~10^6 assignments cheap.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    NotAHomomorphism,
    ParseError,
    PreconditionError,
    SignatureError,
)
from .termalg import Evaluation, evaluate
from .terms import App, Gen, Identity, Signature, Term, _natural_key, subterms

DEFAULT_BUDGET = 10**6
DEFAULT_SAMPLES = 10_000
MAX_PRODUCT_SIZE = 4096


class FiniteAlgebra:
    """An abstract algebra on ``{0, ..., size-1}`` with one total table per symbol."""

    def __init__(self, sig: Signature, size: int, tables: Mapping[str, object], name: str = ""):
        if sig.scalar_ops:
            raise SignatureError("finite algebras cannot carry scalar-indexed families")
        if size < 1:
            raise ValueError("carrier must be non-empty")
        self.sig = sig
        self.size = int(size)
        self.name = name
        self.tables: dict[str, np.ndarray] = {}
        for sym, arity in sig.symbols:
            if sym not in tables:
                raise SignatureError(f"missing table for {sym!r}")
            arr = np.asarray(tables[sym], dtype=np.int64)
            if arr.shape != (self.size,) * arity:
                raise ValueError(f"table for {sym!r} has shape {arr.shape}, expected {(self.size,) * arity}")
            if arr.size and (arr.min() < 0 or arr.max() >= self.size):
                raise ValueError(f"table for {sym!r} has entries outside the carrier")
            arr.setflags(write=False)
            self.tables[sym] = arr
        extra = set(tables) - set(sig.names)
        if extra:
            raise SignatureError(f"tables for unknown symbols {sorted(extra)}")

    @classmethod
    def from_functions(cls, sig: Signature, size: int, funcs: Mapping[str, object], name: str = ""):
        """Build tables from Python callables (or ints for constants)."""
        tables = {}
        for sym, arity in sig.symbols:
            f = funcs[sym]
            if arity == 0:
                tables[sym] = f() if callable(f) else f
            else:
                arr = np.empty((size,) * arity, dtype=np.int64)
                for idx in itertools.product(range(size), repeat=arity):
                    arr[idx] = f(*idx)
                tables[sym] = arr
        return cls(sig, size, tables, name)

    @property
    def carrier(self) -> range:
        return range(self.size)

    def constant(self, name: str) -> int:
        return int(self.tables[name])

    def operate(self, name: str, args: Sequence[int], scalar=None) -> int:
        return int(self.tables[name][tuple(args)])

    def __eq__(self, other):
        return (
            isinstance(other, FiniteAlgebra)
            and self.sig == other.sig
            and self.size == other.size
            and all(np.array_equal(self.tables[s], other.tables[s]) for s in self.tables)
        )

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FiniteAlgebra{label} size={self.size} ops={self.sig.names}>"

    def evaluate_all(self, t: Term, columns: Mapping[str, np.ndarray]) -> np.ndarray:
        """Evaluate ``t`` for a batch of assignments given column-wise."""
        memo: dict[Term, np.ndarray] = {}
        n = len(next(iter(columns.values()))) if columns else 1
        for s in subterms(t):
            if s in memo:
                continue
            if isinstance(s, Gen):
                memo[s] = columns[s.name]
            elif not s.args:
                memo[s] = np.full(n, self.tables[s.op], dtype=np.int64)
            else:
                memo[s] = self.tables[s.op][tuple(memo[a] for a in s.args)]
        return memo[t]

    # -- file format
    def to_text(self) -> str:
        lines = [f"size {self.size}"]
        for sym, arity in self.sig.symbols:
            lines.append(f"op {sym} {arity}")
            tab = self.tables[sym]
            if arity == 0:
                lines.append(str(int(tab)))
            elif arity == 1:
                lines.append(" ".join(map(str, tab.tolist())))
            else:
                rows = tab.reshape(-1, self.size)
                lines.extend(" ".join(map(str, r)) for r in rows.tolist())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "FiniteAlgebra":
        """Read ``size n`` then blocks ``op name arity`` followed by n^arity entries (row-major)."""
        tokens = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            for tok in raw.split("#", 1)[0].split():
                tokens.append((tok, lineno))
        if len(tokens) < 2 or tokens[0][0] != "size":
            raise ParseError("algebra file must start with 'size n'", line=1)
        try:
            size = int(tokens[1][0])
        except ValueError:
            raise ParseError("bad size", line=tokens[1][1]) from None
        i = 2
        symbols, tables = [], {}
        while i < len(tokens):
            tok, lineno = tokens[i]
            if tok != "op" or i + 2 >= len(tokens):
                raise ParseError(f"expected 'op name arity', got {tok!r}", line=lineno)
            sym = tokens[i + 1][0]
            try:
                arity = int(tokens[i + 2][0])
            except ValueError:
                raise ParseError("bad arity", line=tokens[i + 2][1]) from None
            i += 3
            count = size**arity
            body = tokens[i : i + count]
            if len(body) < count:
                raise ParseError(f"table for {sym} is truncated", line=lineno)
            try:
                vals = [int(t) for t, _ in body]
            except ValueError:
                raise ParseError(f"non-integer entry in table for {sym}", line=lineno) from None
            i += count
            symbols.append((sym, arity))
            tables[sym] = np.array(vals, dtype=np.int64).reshape((size,) * arity) if arity else vals[0]
        return cls(Signature(tuple(symbols)), size, tables, name)


def load_algebra(path) -> FiniteAlgebra:
    with open(path) as fh:
        return FiniteAlgebra.from_text(fh.read(), name=str(path))


class FiniteHom:
    """A map between finite algebras, verified exhaustively on construction."""

    def __init__(self, dom: FiniteAlgebra, cod: FiniteAlgebra, mapping: Sequence[int]):
        if dom.sig != cod.sig:
            raise SignatureError("homomorphisms need a shared signature")
        m = np.asarray(mapping, dtype=np.int64)
        if m.shape != (dom.size,):
            raise ValueError("mapping must have one entry per domain element")
        if m.min() < 0 or m.max() >= cod.size:
            raise ValueError("mapping leaves the codomain")
        m.setflags(write=False)
        self.dom, self.cod, self.map = dom, cod, m
        bad = hom_violation(dom, cod, m)
        if bad is not None:
            raise NotAHomomorphism(f"map does not commute with {bad[0]} at {bad[1]}", witness=bad)

    def __call__(self, a: int) -> int:
        return int(self.map[a])

    def is_injective(self) -> bool:
        return len(set(self.map.tolist())) == self.dom.size


def hom_violation(dom: FiniteAlgebra, cod: FiniteAlgebra, m: np.ndarray):
    """First (symbol, argument tuple) where ``m`` fails to commute, else None."""
    for sym, arity in dom.sig.symbols:
        left = m[dom.tables[sym]]
        if arity == 0:
            right = cod.tables[sym]
        else:
            right = cod.tables[sym][np.ix_(*([m] * arity))]
        diff = np.argwhere(left != right)
        if arity == 0 and left != right:
            return (sym, ())
        if arity and len(diff):
            return (sym, tuple(int(x) for x in diff[0]))
    return None


class CongruenceRelation:
    """An equivalence on ``range(n)`` stored as block representatives (least member)."""

    def __init__(self, reps: Sequence[int]):
        reps = [int(r) for r in reps]
        # normalise to least member of each block
        first: dict[int, int] = {}
        labels = [first.setdefault(r, i) for i, r in enumerate(reps)]
        # labels map through the first occurrence of each raw label
        self.reps = tuple(labels)

    @classmethod
    def discrete(cls, n: int) -> "CongruenceRelation":
        return cls(range(n))

    @classmethod
    def full(cls, n: int) -> "CongruenceRelation":
        return cls([0] * n)

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "CongruenceRelation":
        reps = list(range(n))
        for b in blocks:
            b = sorted(b)
            for x in b:
                reps[x] = b[0]
        return cls(reps)

    @property
    def size(self) -> int:
        return len(self.reps)

    def related(self, a: int, b: int) -> bool:
        return self.reps[a] == self.reps[b]

    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for x, r in enumerate(self.reps):
            out.setdefault(r, []).append(x)
        return list(out.values())

    def pairs(self) -> set[tuple[int, int]]:
        return {(a, b) for blk in self.blocks() for a in blk for b in blk}

    def __le__(self, other: "CongruenceRelation") -> bool:
        return all(other.related(x, r) for x, r in enumerate(self.reps))

    def __eq__(self, other):
        return isinstance(other, CongruenceRelation) and self.reps == other.reps

    def __hash__(self):
        return hash(self.reps)

    def __repr__(self):
        return f"CongruenceRelation({self.blocks()})"

    def compatibility_violation(self, A: FiniteAlgebra):
        """A (symbol, tuple1, tuple2) of related tuples with unrelated images, if any."""
        reps = np.asarray(self.reps)
        for sym, arity in A.sig.symbols:
            if arity == 0:
                continue
            tab = A.tables[sym]
            seen: dict[tuple, tuple] = {}
            for idx in itertools.product(range(A.size), repeat=arity):
                key = tuple(int(reps[i]) for i in idx)
                prev = seen.get(key)
                if prev is None:
                    seen[key] = idx
                elif reps[tab[idx]] != reps[tab[prev]]:
                    return (sym, prev, idx)
        return None

    def is_congruence(self, A: FiniteAlgebra) -> bool:
        return self.size == A.size and self.compatibility_violation(A) is None


def kernel(h: FiniteHom) -> CongruenceRelation:
    return CongruenceRelation(h.map.tolist())


def _uf_find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _uf_union(parent: list[int], a: int, b: int) -> bool:
    ra, rb = _uf_find(parent, a), _uf_find(parent, b)
    if ra == rb:
        return False
    if ra > rb:
        ra, rb = rb, ra
    parent[rb] = ra
    return True


def generate_congruence(A: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> CongruenceRelation:
    """Least congruence containing ``pairs``: union-find plus compatibility propagation."""
    parent = list(range(A.size))
    for a, b in pairs:
        if not (0 <= a < A.size and 0 <= b < A.size):
            raise ValueError(f"pair {(a, b)} outside the carrier")
        _uf_union(parent, a, b)
    ops = [(sym, arity, A.tables[sym]) for sym, arity in A.sig.symbols if arity > 0]
    changed = True
    while changed:
        changed = False
        reps = [_uf_find(parent, x) for x in range(A.size)]
        for sym, arity, tab in ops:
            image_of: dict[tuple, int] = {}
            for idx in itertools.product(range(A.size), repeat=arity):
                key = tuple(reps[i] for i in idx)
                img = int(tab[idx])
                prev = image_of.setdefault(key, img)
                if prev != img and _uf_union(parent, prev, img):
                    changed = True
    return CongruenceRelation([_uf_find(parent, x) for x in range(A.size)])


def quotient(A: FiniteAlgebra, theta: CongruenceRelation) -> tuple[FiniteAlgebra, FiniteHom]:
    """A/θ with induced tables and the canonical map q_θ."""
    bad = theta.compatibility_violation(A)
    if bad is not None or theta.size != A.size:
        raise PreconditionError("relation is not a congruence on this algebra", witness=bad)
    blocks = theta.blocks()
    label = {}
    for i, blk in enumerate(blocks):
        for x in blk:
            label[x] = i
    k = len(blocks)
    reps = [blk[0] for blk in blocks]
    tables = {}
    for sym, arity in A.sig.symbols:
        tab = A.tables[sym]
        if arity == 0:
            tables[sym] = label[int(tab)]
            continue
        arr = np.empty((k,) * arity, dtype=np.int64)
        for idx in itertools.product(range(k), repeat=arity):
            arr[idx] = label[int(tab[tuple(reps[i] for i in idx)])]
        tables[sym] = arr
    Q = FiniteAlgebra(A.sig, k, tables, name=f"{A.name}/θ" if A.name else "")
    return Q, FiniteHom(A, Q, [label[x] for x in range(A.size)])


def factor_hom(h: FiniteHom, theta: CongruenceRelation) -> FiniteHom:
    """The unique h̄ with h = h̄ ∘ q_θ; requires θ ⊆ ker h."""
    for x, r in enumerate(theta.reps):
        if h.map[x] != h.map[r]:
            raise PreconditionError(
                f"θ is not contained in ker h: ({r}, {x}) ∈ θ but h({r}) != h({x})",
                witness=(r, x),
            )
    Q, q = quotient(h.dom, theta)
    bar = [0] * Q.size
    for x in range(h.dom.size):
        bar[q(x)] = int(h.map[x])
    return FiniteHom(Q, h.cod, bar)


def product(algebras: Sequence[FiniteAlgebra], max_size: int = MAX_PRODUCT_SIZE) -> FiniteAlgebra:
    """Coordinatewise product; element (a_1..a_k) is encoded mixed-radix, first factor most significant."""
    if not algebras:
        raise ValueError("a product needs at least one factor")
    sig = algebras[0].sig
    if any(B.sig != sig for B in algebras):
        raise SignatureError("factors must share a signature")
    sizes = [B.size for B in algebras]
    total = int(np.prod(sizes))
    if total > max_size:
        raise BudgetExceeded(f"product size {total} exceeds bound {max_size}")
    if len(algebras) == 1:
        B = algebras[0]
        return FiniteAlgebra(sig, B.size, B.tables, B.name)
    coords = list(itertools.product(*(range(s) for s in sizes)))
    encode = {c: i for i, c in enumerate(coords)}
    tables = {}
    for sym, arity in sig.symbols:
        if arity == 0:
            tables[sym] = encode[tuple(int(B.tables[sym]) for B in algebras)]
            continue
        arr = np.empty((total,) * arity, dtype=np.int64)
        for idx in itertools.product(range(total), repeat=arity):
            args = [coords[i] for i in idx]
            arr[idx] = encode[
                tuple(int(B.tables[sym][tuple(a[k] for a in args)]) for k, B in enumerate(algebras))
            ]
        tables[sym] = arr
    return FiniteAlgebra(sig, total, tables, name=" × ".join(B.name or "?" for B in algebras))


def projections(algebras: Sequence[FiniteAlgebra], P: FiniteAlgebra | None = None) -> list[FiniteHom]:
    P = product(algebras) if P is None else P
    sizes = [B.size for B in algebras]
    coords = list(itertools.product(*(range(s) for s in sizes)))
    return [FiniteHom(P, B, [c[k] for c in coords]) for k, B in enumerate(algebras)]


def generated_subalgebra(A: FiniteAlgebra, seeds: Iterable[int]) -> frozenset[int]:
    """Least subset containing the seeds and constants, closed under every table."""
    current = set(int(s) for s in seeds)
    if any(not 0 <= s < A.size for s in current):
        raise ValueError("seed outside the carrier")
    current |= {int(A.tables[c]) for c in A.sig.constants}
    ops = [(A.tables[sym], arity) for sym, arity in A.sig.operations]
    while True:
        members = sorted(current)
        fresh = set()
        for tab, arity in ops:
            for idx in itertools.product(members, repeat=arity):
                v = int(tab[idx])
                if v not in current:
                    fresh.add(v)
        if not fresh:
            return frozenset(current)
        current |= fresh


def subalgebra(A: FiniteAlgebra, subset: Iterable[int]) -> tuple[FiniteAlgebra, list[int]]:
    """The closed subset as an algebra in its own right, plus the inclusion map."""
    members = sorted(subset)
    pos = {x: i for i, x in enumerate(members)}
    tables = {}
    for sym, arity in A.sig.symbols:
        tab = A.tables[sym]
        if arity == 0:
            tables[sym] = pos[int(tab)]
            continue
        arr = np.empty((len(members),) * arity, dtype=np.int64)
        for idx in itertools.product(range(len(members)), repeat=arity):
            v = int(tab[tuple(members[i] for i in idx)])
            if v not in pos:
                raise PreconditionError("subset is not closed under the operations", witness=(sym, idx))
            arr[idx] = pos[v]
        tables[sym] = arr
    return FiniteAlgebra(A.sig, len(members), tables), members


# ---------------------------------------------------------------- satisfaction


@dataclass
class Verdict:
    """Outcome of an identity check; only ``exhaustive`` verdicts certify ``holds``."""

    holds: bool
    exhaustive: bool
    checked: int
    counterexample: dict | None = None

    def __bool__(self):
        return self.holds

    @property
    def mode(self) -> str:
        return "exhaustive" if self.exhaustive else "sampled"


def _assignment_columns(names, size, budget, samples, rng):
    count = size ** len(names)
    if count <= budget:
        if not names:
            return {}, 1, True
        grids = np.meshgrid(*([np.arange(size)] * len(names)), indexing="ij")
        return {n: g.reshape(-1) for n, g in zip(names, grids)}, count, True
    gen = np.random.default_rng(rng.getrandbits(64))
    cols = {n: gen.integers(0, size, samples) for n in names}
    return cols, samples, False


def _check_signature(A, idents):
    for ident in idents:
        for side in (ident.lhs, ident.rhs):
            for s in subterms(side):
                if isinstance(s, App) and (s.op not in A.sig or A.sig.arity(s.op) != len(s.args)):
                    raise SignatureError(f"identity uses {s.op!r} which the algebra lacks")


def satisfies(
    A,
    ident: Identity,
    budget: int = DEFAULT_BUDGET,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    elements: Sequence | None = None,
) -> Verdict:
    """Does A satisfy the identity under every assignment of its elements to the variables?

    Exhaustive while the assignment count fits ``budget``; beyond that a
    uniform sample is drawn and the verdict is marked non-exhaustive.  Pass
    ``elements`` to check a structure that is not a ``FiniteAlgebra`` over an
    explicit finite element list.
    """
    return satisfies_quasi(A, [], ident, budget, samples, seed, elements)


def satisfies_quasi(
    A,
    premises: Sequence[Identity],
    conclusion: Identity | Sequence[Identity],
    budget: int = DEFAULT_BUDGET,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    elements: Sequence | None = None,
) -> Verdict:
    """Every assignment satisfying all premises satisfies the conclusion(s)."""
    conclusions = [conclusion] if isinstance(conclusion, Identity) else list(conclusion)
    idents = list(premises) + conclusions
    names = sorted({v for i in idents for v in i.variables}, key=_natural_key)
    rng = random.Random(seed)
    if elements is not None or not isinstance(A, FiniteAlgebra):
        if elements is None:
            raise ValueError("non-finite structures need an explicit element list")
        return _satisfies_generic(A, premises, conclusions, names, list(elements), budget, samples, rng)
    _check_signature(A, idents)
    cols, count, exhaustive = _assignment_columns(names, A.size, budget, samples, rng)
    mask = np.ones(count, dtype=bool)
    for p in premises:
        mask &= A.evaluate_all(p.lhs, cols) == A.evaluate_all(p.rhs, cols)
    bad = np.zeros(count, dtype=bool)
    for c in conclusions:
        bad |= A.evaluate_all(c.lhs, cols) != A.evaluate_all(c.rhs, cols)
    bad &= mask
    hits = np.flatnonzero(bad)
    if len(hits):
        i = int(hits[0])
        cex = {n: int(cols[n][i]) for n in names}
        return Verdict(False, exhaustive, count, cex)
    return Verdict(True, exhaustive, count)


def _satisfies_generic(A, premises, conclusions, names, elements, budget, samples, rng):
    count = len(elements) ** len(names)
    if count <= budget:
        assignments = itertools.product(elements, repeat=len(names))
        exhaustive = True
    else:
        assignments = ([rng.choice(elements) for _ in names] for _ in range(samples))
        exhaustive, count = False, samples
    checked = 0
    for values in assignments:
        checked += 1
        ev = Evaluation(A, dict(zip(names, values)))
        memo: dict = {}
        if not all(evaluate(p.lhs, ev, memo) == evaluate(p.rhs, ev, memo) for p in premises):
            continue
        if any(evaluate(c.lhs, ev, memo) != evaluate(c.rhs, ev, memo) for c in conclusions):
            return Verdict(False, exhaustive, checked, dict(zip(names, values)))
    return Verdict(True, exhaustive, checked)


def substitution_pairs(A: FiniteAlgebra, ident: Identity) -> list[tuple[int, int]]:
    """(h(t1), h(t2)) for every assignment h into A; the pairs forced into any θ with A/θ ⊨ t1≈t2."""
    names = ident.variables
    cols, count, _ = _assignment_columns(names, A.size, float("inf"), 0, random.Random(0))
    left = A.evaluate_all(ident.lhs, cols)
    right = A.evaluate_all(ident.rhs, cols)
    if not names:
        return [(int(left[0]), int(right[0]))]
    return list(zip(left.tolist(), right.tolist()))
