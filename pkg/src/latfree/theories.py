"""Built-in equational theories and the order/algebraic lattice conversion.

Theories: LAT, DLAT, VS, VL, VLA, VLA1, VLA1P.  The vector-lattice-algebra
identities are numbered (1)..(20) as clauses; a clause may bundle two
equations (e.g. (13) is ``1⊙x = x`` together with ``x⊙1 = x``).  Scalar
indexed clauses are schemas that get instantiated over a finite set of
rationals.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import NotALattice, PreconditionError, SignatureError
from .finite import FiniteAlgebra, satisfies
from .termalg import Evaluation, evaluate
from .terms import App, Identity, Signature, Term, parse_identity, var

# ---------------------------------------------------------------- syntax helpers

ZERO = App("zero")
ONE = App("one")


def vee(a: Term, b: Term) -> App:
    return App("vee", (a, b))


def wedge(a: Term, b: Term) -> App:
    return App("wedge", (a, b))


def plus(a: Term, b: Term) -> App:
    return App("plus", (a, b))


def neg(a: Term) -> App:
    return App("neg", (a,))


def scale(q, a: Term) -> App:
    return App("scale", (a,), Fraction(q))


def dot(a: Term, b: Term) -> App:
    return App("dot", (a, b))


def minus(a: Term, b: Term) -> App:
    return plus(a, neg(b))


def absval(a: Term) -> App:
    return vee(a, neg(a))


LAT_SIG = Signature((("wedge", 2), ("vee", 2)))
VS_SIG = Signature((("zero", 0), ("plus", 2), ("neg", 1)), frozenset({"scale"}))
VL_SIG = VS_SIG.extend((("wedge", 2), ("vee", 2)))
VLA_SIG = VL_SIG.extend((("dot", 2),))
VLA1_SIG = VLA_SIG.extend((("one", 0),))

DEFAULT_PROBE = tuple(
    Fraction(q) for q in ("0", "1", "-1", "2", "-2", "1/2", "-1/2", "3/7", "-3/7")
)

x, y, z = var(1), var(2), var(3)


@dataclass(frozen=True)
class Clause:
    """One numbered clause; ``build(*scalars)`` returns its equations."""

    label: str
    build: Callable[..., tuple]
    n_scalars: int = 0
    nonneg: bool = False

    @property
    def scalar_indexed(self) -> bool:
        return self.n_scalars > 0

    def scalar_combos(self, scalars: Iterable) -> list[tuple]:
        qs = [Fraction(q) for q in scalars]
        if self.nonneg:
            qs = [q for q in qs if q >= 0]
        return list(itertools.product(qs, repeat=self.n_scalars))

    def instances(self, scalars: Iterable = DEFAULT_PROBE) -> list[Identity]:
        if not self.n_scalars:
            return [Identity(l, r, self.label) for l, r in self.build()]
        out = []
        for combo in self.scalar_combos(scalars):
            tag = ",".join(str(q) for q in combo)
            out.extend(Identity(l, r, f"{self.label}[{tag}]") for l, r in self.build(*combo))
        return out


def _c(label, build, n=0, nonneg=False):
    return Clause(label, build, n, nonneg)


LAT_CLAUSES = (
    _c("wedge-assoc", lambda: ((wedge(x, wedge(y, z)), wedge(wedge(x, y), z)),)),
    _c("vee-assoc", lambda: ((vee(x, vee(y, z)), vee(vee(x, y), z)),)),
    _c("wedge-idem", lambda: ((wedge(x, x), x),)),
    _c("vee-idem", lambda: ((vee(x, x), x),)),
    _c("wedge-comm", lambda: ((wedge(x, y), wedge(y, x)),)),
    _c("vee-comm", lambda: ((vee(x, y), vee(y, x)),)),
    _c("wedge-absorb", lambda: ((wedge(x, vee(x, y)), x),)),
    _c("vee-absorb", lambda: ((vee(x, wedge(x, y)), x),)),
)

DISTRIBUTIVE_CLAUSES = (
    _c("wedge-distrib", lambda: ((wedge(x, vee(y, z)), vee(wedge(x, y), wedge(x, z))),)),
    _c("vee-distrib", lambda: ((vee(x, wedge(y, z)), wedge(vee(x, y), vee(x, z))),)),
)

VLA1_CLAUSES = (
    _c("(1)", lambda: ((plus(plus(x, y), z), plus(x, plus(y, z))),)),
    _c("(2)", lambda: ((plus(x, ZERO), x),)),
    _c("(3)", lambda: ((plus(x, neg(x)), ZERO),)),
    _c("(4)", lambda: ((plus(x, y), plus(y, x)),)),
    _c("(5)", lambda l: ((scale(l, plus(x, y)), plus(scale(l, x), scale(l, y))),), 1),
    _c("(6)", lambda l, m: ((scale(l + m, x), plus(scale(l, x), scale(m, x))),), 2),
    _c("(7)", lambda l, m: ((scale(l * m, x), scale(l, scale(m, x))),), 2),
    _c("(8)", lambda: ((scale(1, x), x),)),
    _c("(9)", lambda: ((dot(dot(x, y), z), dot(x, dot(y, z))),)),
    _c("(10)", lambda: ((dot(x, plus(y, z)), plus(dot(x, y), dot(x, z))),)),
    _c("(11)", lambda: ((dot(plus(x, y), z), plus(dot(x, z), dot(y, z))),)),
    _c(
        "(12)",
        lambda l: (
            (scale(l, dot(x, y)), dot(scale(l, x), y)),
            (scale(l, dot(x, y)), dot(x, scale(l, y))),
        ),
        1,
    ),
    _c("(13)", lambda: ((dot(ONE, x), x), (dot(x, ONE), x))),
    _c("(14)", lambda: ((wedge(x, wedge(y, z)), wedge(wedge(x, y), z)), (vee(x, vee(y, z)), vee(vee(x, y), z)))),
    _c("(15)", lambda: ((wedge(x, x), x), (vee(x, x), x))),
    _c("(16)", lambda: ((wedge(x, y), wedge(y, x)), (vee(x, y), vee(y, x)))),
    _c("(17)", lambda: ((wedge(x, vee(x, y)), x), (vee(x, wedge(x, y)), x))),
    _c("(18)", lambda: ((plus(x, wedge(y, z)), wedge(plus(x, y), plus(x, z))),)),
    _c("(19)", lambda l: ((scale(l, wedge(ZERO, x)), wedge(ZERO, scale(l, x))),), 1, True),
    _c("(20)", lambda: ((wedge(ZERO, dot(wedge(x, neg(x)), wedge(y, neg(y)))), ZERO),)),
)

POSITIVE_ONE = _c("(1+)", lambda: ((wedge(ZERO, ONE), ZERO),))

_BY_LABEL = {c.label: c for c in VLA1_CLAUSES}


def _pick(*labels) -> tuple[Clause, ...]:
    return tuple(_BY_LABEL[f"({i})"] for i in labels)


@dataclass(frozen=True)
class Theory:
    name: str
    sig: Signature
    clauses: tuple[Clause, ...]

    def identities(self, scalars: Iterable = DEFAULT_PROBE) -> list[Identity]:
        out = []
        for c in self.clauses:
            out.extend(c.instances(scalars))
        return out

    def clause(self, label: str) -> Clause:
        for c in self.clauses:
            if c.label == label:
                return c
        raise KeyError(label)

    def __len__(self):
        return len(self.clauses)


_THEORIES = {
    "LAT": Theory("LAT", LAT_SIG, LAT_CLAUSES),
    "DLAT": Theory("DLAT", LAT_SIG, LAT_CLAUSES + DISTRIBUTIVE_CLAUSES),
    "VS": Theory("VS", VS_SIG, _pick(1, 2, 3, 4, 5, 6, 7, 8)),
    "VL": Theory("VL", VL_SIG, _pick(1, 2, 3, 4, 5, 6, 7, 8, 14, 15, 16, 17, 18, 19)),
    "VLA": Theory("VLA", VLA_SIG, _pick(*range(1, 13), *range(14, 21))),
    "VLA1": Theory("VLA1", VLA1_SIG, VLA1_CLAUSES),
    "VLA1P": Theory("VLA1P", VLA1_SIG, VLA1_CLAUSES + (POSITIVE_ONE,)),
}

THEORY_NAMES = tuple(_THEORIES)


def theory(name: str) -> Theory:
    try:
        return _THEORIES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown theory {name!r}; choose from {', '.join(THEORY_NAMES)}") from None


def load_theory(text: str, sig: Signature, name: str = "custom") -> Theory:
    """A user theory: one ``lhs = rhs`` identity per line."""
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        ident = parse_identity(line, sig)
        clauses.append(Clause(f"L{lineno}", lambda i=ident: ((i.lhs, i.rhs),)))
    return Theory(name, sig, tuple(clauses))


# ---------------------------------------------------------------- theory checks


@dataclass
class ClauseVerdict:
    label: str
    holds: bool
    mode: str  # "exhaustive" or "sampled"
    probe: bool  # scalar-indexed, checked on the probe set only
    checked: int
    witness: dict | None = None

    def line(self) -> str:
        status = "PASS" if self.holds else "FAIL"
        notes = [self.mode]
        if self.probe:
            notes.append("checked on probe set")
        out = f"{status} {self.label} ({', '.join(notes)}; {self.checked} assignments)"
        if self.witness:
            out += " witness: " + ", ".join(f"{k}={_fmt(v)}" for k, v in self.witness.items())
        return out


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return "(" + ", ".join(_fmt(a) for a in v) + ")"
    return str(v)


@dataclass
class TheoryReport:
    theory: str
    verdicts: list[ClauseVerdict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v.holds for v in self.verdicts)

    @property
    def exhaustive(self) -> bool:
        return all(v.mode == "exhaustive" for v in self.verdicts)

    def failures(self) -> list[ClauseVerdict]:
        return [v for v in self.verdicts if not v.holds]

    def lines(self) -> list[str]:
        return [v.line() for v in self.verdicts]


def check_theory(
    A,
    th: Theory,
    scalars: Sequence = DEFAULT_PROBE,
    samples: int = 1000,
    seed: int = 0,
    budget: int = 10**6,
) -> TheoryReport:
    """Per-clause verdicts for structure ``A`` against theory ``th``.

    Finite algebras are swept exhaustively within ``budget``; structures with a
    ``sample(rng)`` method (infinite carriers) are checked on ``samples``
    seeded random assignments per clause, cycling through every probe scalar
    combination.
    """
    if not th.sig.is_subsignature_of(A.sig):
        raise SignatureError(f"structure signature {A.sig.names} does not cover theory {th.name}")
    report = TheoryReport(th.name)
    if isinstance(A, FiniteAlgebra):
        for c in th.clauses:
            holds, checked, mode, wit = True, 0, "exhaustive", None
            for ident in c.instances(scalars):
                v = satisfies(A, ident, budget=budget, seed=seed)
                checked += v.checked
                if not v.exhaustive:
                    mode = "sampled"
                if not v.holds:
                    holds, wit = False, v.counterexample
                    break
            report.verdicts.append(ClauseVerdict(c.label, holds, mode, c.scalar_indexed, checked, wit))
        return report
    rng = random.Random(seed)
    for c in th.clauses:
        combos = c.scalar_combos(scalars) if c.scalar_indexed else [()]
        built = [c.build(*combo) for combo in combos]
        holds, wit, checked = True, None, 0
        for s in range(samples):
            eqs = built[s % len(built)]
            names = sorted({v for l, r in eqs for v in Identity(l, r).variables})
            assignment = {n: A.sample(rng) for n in names}
            ev = Evaluation(A, assignment)
            memo: dict = {}
            checked += 1
            for l, r in eqs:
                if evaluate(l, ev, memo) != evaluate(r, ev, memo):
                    holds = False
                    wit = dict(assignment)
                    if combos[s % len(combos)]:
                        wit["scalars"] = combos[s % len(combos)]
                    break
            if not holds:
                break
        report.verdicts.append(ClauseVerdict(c.label, holds, "sampled", c.scalar_indexed, checked, wit))
    return report


# ---------------------------------------------------------------- lattices as posets


@dataclass(frozen=True)
class LatticePoset:
    """A finite poset given by its order matrix; lattice-ness is checked on demand."""

    size: int
    order: tuple[tuple[bool, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        order = tuple(tuple(bool(v) for v in row) for row in self.order)
        object.__setattr__(self, "order", order)
        n = self.size
        if len(order) != n or any(len(r) != n for r in order):
            raise ValueError("order matrix must be n×n")
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(n)))
        elif len(self.names) != n:
            raise ValueError("need one name per element")
        for i in range(n):
            if not order[i][i]:
                raise PreconditionError("order is not reflexive", witness=(i, i))
            for j in range(n):
                if i != j and order[i][j] and order[j][i]:
                    raise PreconditionError("order is not antisymmetric", witness=(i, j))
                for k in range(n):
                    if order[i][j] and order[j][k] and not order[i][k]:
                        raise PreconditionError("order is not transitive", witness=(i, j, k))

    @classmethod
    def from_covers(cls, names: Sequence[str], covers: Iterable[tuple[str, str]]) -> "LatticePoset":
        """Order generated by ``lower < upper`` pairs (reflexive-transitive closure)."""
        idx = {n: i for i, n in enumerate(names)}
        n = len(names)
        rel = [[i == j for j in range(n)] for i in range(n)]
        for lo, hi in covers:
            rel[idx[lo]][idx[hi]] = True
        for k in range(n):
            for i in range(n):
                if rel[i][k]:
                    for j in range(n):
                        if rel[k][j]:
                            rel[i][j] = True
        return cls(n, tuple(map(tuple, rel)), tuple(names))

    def leq(self, i: int, j: int) -> bool:
        return self.order[i][j]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def meet(self, i: int, j: int) -> int | None:
        lower = [k for k in range(self.size) if self.order[k][i] and self.order[k][j]]
        best = [k for k in lower if all(self.order[m][k] for m in lower)]
        return best[0] if best else None

    def join(self, i: int, j: int) -> int | None:
        upper = [k for k in range(self.size) if self.order[i][k] and self.order[j][k]]
        best = [k for k in upper if all(self.order[k][m] for m in upper)]
        return best[0] if best else None

    def lattice_violation(self):
        for i in range(self.size):
            for j in range(i + 1, self.size):
                if self.meet(i, j) is None:
                    return ("meet", i, j)
                if self.join(i, j) is None:
                    return ("join", i, j)
        return None

    def is_lattice(self) -> bool:
        return self.lattice_violation() is None

    def relabel(self, perm: Sequence[int]) -> "LatticePoset":
        """Element i becomes perm[i]."""
        n = self.size
        inv = [0] * n
        for i, p in enumerate(perm):
            inv[p] = i
        order = tuple(tuple(self.order[inv[a]][inv[b]] for b in range(n)) for a in range(n))
        return LatticePoset(n, order, tuple(self.names[inv[a]] for a in range(n)))

    def canonical_key(self) -> tuple:
        """Isomorphism-invariant key (minimum over relabelings)."""
        n = self.size
        best = None
        for perm in itertools.permutations(range(n)):
            key = tuple(self.order[perm[a]][perm[b]] for a in range(n) for b in range(n))
            if best is None or key < best:
                best = key
        return (n, best)


def order_to_ops(L: LatticePoset) -> FiniteAlgebra:
    """Meet and join tables read off the order."""
    n = L.size
    meet = [[0] * n for _ in range(n)]
    join = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            m, k = L.meet(i, j), L.join(i, j)
            if m is None:
                raise NotALattice(f"{L.names[i]} and {L.names[j]} have no meet", witness=(i, j))
            if k is None:
                raise NotALattice(f"{L.names[i]} and {L.names[j]} have no join", witness=(i, j))
            meet[i][j], join[i][j] = m, k
    return FiniteAlgebra(LAT_SIG, n, {"wedge": meet, "vee": join}, name="lattice")


def ops_to_order(A: FiniteAlgebra, names: Sequence[str] = ()) -> LatticePoset:
    """x ≤ y iff x⊓y = x, after confirming all eight lattice identities."""
    if not LAT_SIG.is_subsignature_of(A.sig):
        raise SignatureError("algebra lacks wedge/vee")
    for c in LAT_CLAUSES:
        (ident,) = c.instances()
        v = satisfies(A, ident)
        if not v.holds:
            raise NotALattice(f"lattice identity {c.label} fails", witness=(c.label, v.counterexample))
    w = A.tables["wedge"]
    n = A.size
    L = LatticePoset(n, tuple(tuple(bool(w[i, j] == i) for j in range(n)) for i in range(n)), tuple(names))
    for i in range(n):
        for j in range(n):
            if L.meet(i, j) != int(w[i, j]) or L.join(i, j) != int(A.tables["vee"][i, j]):
                raise NotALattice("order-derived meet/join disagree with the tables", witness=(i, j))
    return L


def lattice_hom_iff_algebra_hom(f: Sequence[int], L1: LatticePoset, L2: LatticePoset) -> tuple[bool, bool]:
    """(preserves meets and joins in the order sense, is a FiniteHom of the converted algebras)."""
    from .errors import NotAHomomorphism
    from .finite import FiniteHom

    n = L1.size
    order_side = all(
        f[L1.meet(i, j)] == L2.meet(f[i], f[j]) and f[L1.join(i, j)] == L2.join(f[i], f[j])
        for i in range(n)
        for j in range(n)
    )
    try:
        FiniteHom(order_to_ops(L1), order_to_ops(L2), list(f))
        algebra_side = True
    except NotAHomomorphism:
        algebra_side = False
    return order_side, algebra_side


def enumerate_posets(n: int) -> list[LatticePoset]:
    """Every partial order on {0..n-1} for which i ≤ j implies i ≤ j numerically."""
    out = []

    def grow(rel: list[list[bool]], k: int):
        if k == n:
            out.append(LatticePoset(n, tuple(tuple(r[:n]) for r in rel)))
            return
        for mask in range(1 << k):
            down = [i for i in range(k) if mask >> i & 1]
            if any(rel[j][i] and not (mask >> j & 1) for i in down for j in range(k)):
                continue
            new = [row[:] for row in rel]
            for i in down:
                new[i][k] = True
            new[k][k] = True
            grow(new, k + 1)

    if n == 0:
        return []
    grow([[False] * n for _ in range(n)], 0)
    return out


def enumerate_lattices(max_size: int, up_to_iso: bool = False) -> list[LatticePoset]:
    out = []
    seen = set()
    for n in range(1, max_size + 1):
        for P in enumerate_posets(n):
            if not P.is_lattice():
                continue
            if up_to_iso:
                key = P.canonical_key()
                if key in seen:
                    continue
                seen.add(key)
            out.append(P)
    return out


# ---------------------------------------------------------------- presets


def chain(k: int) -> LatticePoset:
    if k == 2:
        names = ("bot", "top")
    else:
        names = tuple(f"c{i}" for i in range(k))
    return LatticePoset.from_covers(names, zip(names, names[1:]))


def m3() -> LatticePoset:
    names = ("bot", "a", "b", "c", "top")
    return LatticePoset.from_covers(names, [("bot", m) for m in "abc"] + [(m, "top") for m in "abc"])


def n5() -> LatticePoset:
    names = ("bot", "a", "b", "c", "top")
    return LatticePoset.from_covers(names, [("bot", "a"), ("a", "c"), ("c", "top"), ("bot", "b"), ("b", "top")])


def boolean(k: int) -> LatticePoset:
    """Subsets of a k-set; for k = 2 the names are bot, a, b, top."""
    if k == 2:
        names = ("bot", "a", "b", "top")
    else:
        names = tuple("{" + ",".join(str(i) for i in range(k) if m >> i & 1) + "}" for m in range(1 << k))
    covers = [(names[m], names[m | 1 << i]) for m in range(1 << k) for i in range(k) if not m >> i & 1]
    return LatticePoset.from_covers(names, covers)


LATTICE_PRESETS = {
    "chain2": lambda: chain(2),
    "chain3": lambda: chain(3),
    "M3": m3,
    "N5": n5,
    "B4": lambda: boolean(2),
    "B8": lambda: boolean(3),
}


def load_poset(text: str) -> LatticePoset:
    """``elements a b c ...`` followed by ``x < y`` lines (covers or any strict pairs)."""
    names: list[str] = []
    covers = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "elements":
            names = parts[1:]
        elif len(parts) == 3 and parts[1] in ("<", "<="):
            covers.append((parts[0], parts[2]))
        else:
            from .errors import ParseError

            raise ParseError(f"bad poset line {raw!r}", line=lineno)
    if not names:
        from .errors import ParseError

        raise ParseError("poset file needs an 'elements' line", line=1)
    unknown = {a for c in covers for a in c} - set(names)
    if unknown:
        from .errors import ParseError

        raise ParseError(f"unknown elements {sorted(unknown)}")
    return LatticePoset.from_covers(names, covers)
