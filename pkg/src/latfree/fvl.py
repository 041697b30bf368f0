"""The free vector lattice over n generators as piecewise-linear functions ℚⁿ → ℚ.

Elements are min-max forms ⋁ᵢ ⋀ⱼ ℓᵢⱼ of linear forms.  Order and equality are
decided exactly: a ≤ b fails iff some strict homogeneous system drawn from the
clause structure is feasible, which Fourier–Motzkin settles and which also
yields the witness point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, SignatureError
from .fm import strict_feasible
from .terms import App, Gen, Term, gen

PIECE_CAP = 1024
EXPANSION_CAP = 10_000


@dataclass(frozen=True)
class LinForm:
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: "LinForm") -> "LinForm":
        return LinForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LinForm") -> "LinForm":
        return LinForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "LinForm":
        return LinForm(tuple(-a for a in self.coeffs))

    def scale(self, q) -> "LinForm":
        q = Fraction(q)
        return LinForm(tuple(q * a for a in self.coeffs))

    def __call__(self, point: Sequence) -> Fraction:
        return sum((a * Fraction(p) for a, p in zip(self.coeffs, point)), Fraction(0))

    def __str__(self):
        terms = [f"{c}*x{i + 1}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


def _gt(a: Sequence[LinForm], b: LinForm) -> list[tuple]:
    """Rows for ℓ(x) > b(x), ℓ ∈ a."""
    return [tuple(x - y for x, y in zip(l.coeffs, b.coeffs)) for l in a]


def _clause_leq_clause(c: Sequence[LinForm], d: Sequence[LinForm]) -> bool:
    """⋀c ≤ ⋀d everywhere: for each m in d, no x has every ℓ ∈ c above m."""
    n = c[0].n
    return all(strict_feasible(_gt(c, m), n) is None for m in d)


@lru_cache(maxsize=None)
def _probe_points(n: int) -> np.ndarray:
    """Fixed directions used to rule out redundancy cheaply before any exact check."""
    if n <= 3:
        pts = [p for p in itertools.product(range(-3, 4), repeat=n) if any(p)]
        # small, mostly positive points first so witnesses read well
        pts.sort(key=lambda p: (sum(map(abs, p)), sum(v < 0 for v in p), p))
    else:
        rng = np.random.default_rng(n)
        pts = rng.integers(-6, 7, (600, n)).tolist()
    return np.array(pts, dtype=float).T


def _piece_values(c: Sequence[LinForm]) -> np.ndarray:
    return np.array([[float(a) for a in l.coeffs] for l in c]) @ _probe_points(c[0].n)


_TOL = 1e-9


@lru_cache(maxsize=None)
def _hash_points(n: int) -> tuple:
    rng = np.random.default_rng(7919 + n)
    return tuple(tuple(int(v) for v in row) for row in rng.integers(-9, 10, (3, n)))


def _simplify_clause(c: Sequence[LinForm]) -> tuple[LinForm, ...]:
    forms = list(dict.fromkeys(c))
    vals = _piece_values(forms) if len(forms) > 1 else None
    keep = list(range(len(forms)))
    i = 0
    while i < len(keep) and len(keep) > 1:
        k = keep[i]
        others = keep[:i] + keep[i + 1 :]
        # forms[k] is redundant when min(others) ≤ forms[k] everywhere
        if (vals[others].min(axis=0) > vals[k] + _TOL * (1 + np.abs(vals[k]))).any():
            i += 1
            continue
        if strict_feasible(_gt([forms[j] for j in others], forms[k]), forms[k].n) is None:
            keep = others
        else:
            i += 1
    return tuple(sorted((forms[j] for j in keep), key=lambda l: l.coeffs))


def _simplify(clauses: Iterable[Sequence[LinForm]]) -> tuple[tuple[LinForm, ...], ...]:
    cs = list(dict.fromkeys(_simplify_clause(c) for c in clauses))
    if len(cs) > 1:
        vals = np.array([_piece_values(c).min(axis=0) for c in cs])
        tol = _TOL * (1 + np.abs(vals))
        alive = [True] * len(cs)
        for i in range(len(cs)):
            for j in range(len(cs)):
                if i == j or not alive[j] or (vals[i] > vals[j] + tol[i]).any():
                    continue
                if _clause_leq_clause(cs[i], cs[j]):
                    alive[i] = False
                    break
        cs = [c for c, a in zip(cs, alive) if a]
    pieces = sum(len(c) for c in cs)
    if pieces > PIECE_CAP:
        raise BudgetExceeded(f"min-max form has {pieces} linear pieces (cap {PIECE_CAP})")
    return tuple(sorted(cs, key=lambda c: [l.coeffs for l in c]))


def _check_expansion(count: int) -> None:
    if count > EXPANSION_CAP:
        raise BudgetExceeded(f"distribution would create {count} clauses (cap {EXPANSION_CAP})")


@dataclass(frozen=True, eq=False)
class MinMaxForm:
    """⋁ over clauses of ⋀ over the clause's linear forms.

    Equality is equality of functions (decided exactly), and the hash is
    taken from values at fixed integer points, so forms work as set members
    and dict keys even though one function has many min-max presentations.
    """

    n: int
    clauses: tuple[tuple[LinForm, ...], ...]
    _simplified: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.clauses or any(not c for c in self.clauses):
            raise ValueError("a min-max form needs nonempty clauses")
        for c in self.clauses:
            for l in c:
                if l.n != self.n:
                    raise SignatureError(f"linear form of length {l.n} in a form over {self.n} generators")
        if not self._simplified:
            object.__setattr__(self, "clauses", _simplify(self.clauses))
            object.__setattr__(self, "_simplified", True)

    # constructors

    @classmethod
    def linear(cls, coeffs: Sequence) -> "MinMaxForm":
        l = LinForm(tuple(coeffs))
        return cls(l.n, ((l,),))

    @classmethod
    def variable(cls, i: int, n: int) -> "MinMaxForm":
        return cls.linear([1 if k == i else 0 for k in range(n)])

    @classmethod
    def zero(cls, n: int) -> "MinMaxForm":
        return cls.linear([0] * n)

    # vector lattice operations

    def _same(self, other: "MinMaxForm") -> None:
        if self.n != other.n:
            raise SignatureError(f"forms over {self.n} and {other.n} generators")

    def join(self, other: "MinMaxForm") -> "MinMaxForm":
        self._same(other)
        return MinMaxForm(self.n, self.clauses + other.clauses)

    def meet(self, other: "MinMaxForm") -> "MinMaxForm":
        self._same(other)
        _check_expansion(len(self.clauses) * len(other.clauses))
        return MinMaxForm(self.n, tuple(a + b for a in self.clauses for b in other.clauses))

    def __add__(self, other: "MinMaxForm") -> "MinMaxForm":
        self._same(other)
        _check_expansion(len(self.clauses) * len(other.clauses))
        return MinMaxForm(
            self.n,
            tuple(tuple(l + m for l in a for m in b) for a in self.clauses for b in other.clauses),
        )

    def __neg__(self) -> "MinMaxForm":
        # −⋁ᵢ⋀ⱼ ℓᵢⱼ = ⋀ᵢ⋁ⱼ −ℓᵢⱼ, folded one clause at a time so each partial meet is simplified
        out = None
        for c in self.clauses:
            part = MinMaxForm(self.n, tuple((-l,) for l in c))
            out = part if out is None else out.meet(part)
        return out

    def __sub__(self, other: "MinMaxForm") -> "MinMaxForm":
        return self + (-other)

    def scale(self, q) -> "MinMaxForm":
        q = Fraction(q)
        if q == 0:
            return MinMaxForm.zero(self.n)
        if q < 0:
            return (-self).scale(-q)
        return MinMaxForm(self.n, tuple(tuple(l.scale(q) for l in c) for c in self.clauses), True)

    def abs(self) -> "MinMaxForm":
        return self.join(-self)

    def pos(self) -> "MinMaxForm":
        return self.join(MinMaxForm.zero(self.n))

    # evaluation

    def __call__(self, point: Sequence) -> Fraction:
        if len(point) != self.n:
            raise ValueError(f"point of length {len(point)} for a form over {self.n} generators")
        return max(min(l(point) for l in c) for c in self.clauses)

    def __eq__(self, other):
        if not isinstance(other, MinMaxForm):
            return NotImplemented
        if self.n != other.n:
            return False
        return self.clauses == other.clauses or fvl_eq(self, other)

    def __hash__(self):
        return hash((self.n, tuple(self(p) for p in _hash_points(self.n))))

    @property
    def pieces(self) -> int:
        return sum(len(c) for c in self.clauses)

    def __str__(self):
        return " ∨ ".join("(" + " ∧ ".join(str(l) for l in c) + ")" for c in self.clauses)


# ---------------------------------------------------------------- terms <-> forms


def from_term(t: Term, gens: Sequence[str]) -> MinMaxForm:
    """Evaluate a vector lattice term in the function model, generator k ↦ x_k."""
    idx = {g: i for i, g in enumerate(gens)}
    n = len(gens)
    memo: dict = {}

    def go(u):
        if u in memo:
            return memo[u]
        if isinstance(u, Gen):
            if u.name not in idx:
                raise SignatureError(f"unknown generator {u.name!r}")
            r = MinMaxForm.variable(idx[u.name], n)
        else:
            args = [go(a) for a in u.args]
            op = u.op
            if op == "zero":
                r = MinMaxForm.zero(n)
            elif op == "plus":
                r = args[0] + args[1]
            elif op == "neg":
                r = -args[0]
            elif op == "scale":
                r = args[0].scale(u.scalar)
            elif op == "vee":
                r = args[0].join(args[1])
            elif op == "wedge":
                r = args[0].meet(args[1])
            else:
                raise SignatureError(f"{op!r} is not a vector lattice operation")
        memo[u] = r
        return r

    return go(t)


def linform_term(l: LinForm, gens: Sequence[str]) -> Term:
    out = None
    for c, g in zip(l.coeffs, gens):
        if c == 0:
            continue
        piece = gen(g) if c == 1 else App("scale", (gen(g),), c)
        out = piece if out is None else App("plus", (out, piece))
    return out if out is not None else App("zero")


def to_term(a: MinMaxForm, gens: Sequence[str]) -> Term:
    joins = []
    for c in a.clauses:
        t = linform_term(c[0], gens)
        for l in c[1:]:
            t = App("wedge", (t, linform_term(l, gens)))
        joins.append(t)
    out = joins[0]
    for t in joins[1:]:
        out = App("vee", (out, t))
    return out


# ---------------------------------------------------------------- order decisions


def fvl_counterexample(a: MinMaxForm, b: MinMaxForm) -> tuple[Fraction, ...] | None:
    """A point x with a(x) > b(x), or None when a ≤ b everywhere.

    a(x) > b(x) iff for some clause A of a and every clause B of b there is a
    piece m_B ∈ B with every ℓ ∈ A above m_B.  The search keeps an open cone
    of candidates with a point inside it; only a clause B that blocks that
    point (⋀B ≥ ⋀A there) is branched on, and a branched clause can never
    block again inside the narrowed cone, so the depth is at most |b|.
    """
    a._same(b)
    n = a.n
    P = _probe_points(n)
    va = np.max([_piece_values(c).min(axis=0) for c in a.clauses], axis=0)
    vb = np.max([_piece_values(c).min(axis=0) for c in b.clauses], axis=0)
    for k in np.flatnonzero(va > vb + 1e-6 * (1 + np.abs(vb))):
        pt = tuple(Fraction(int(v)) for v in P[:, k])
        if a(pt) > b(pt):
            return pt
    for A in a.clauses:
        pt = _search(A, b.clauses, [], strict_feasible([], n), n)
        if pt is not None:
            return pt
    return None


def _search(A, Bs, rows, x, n):
    top = min(l(x) for l in A)
    blocking = [B for B in Bs if min(m(x) for m in B) >= top]
    if not blocking:
        return x
    for m in min(blocking, key=len):
        new = rows + _gt(A, m)
        pt = strict_feasible(new, n)
        if pt is None:
            continue
        found = _search(A, Bs, new, pt, n)
        if found is not None:
            return found
    return None


def fvl_leq(a: MinMaxForm, b: MinMaxForm) -> bool:
    return fvl_counterexample(a, b) is None


def fvl_eq(a: MinMaxForm, b: MinMaxForm) -> bool:
    return fvl_leq(a, b) and fvl_leq(b, a)


def fvl_difference(a: MinMaxForm, b: MinMaxForm) -> tuple[Fraction, ...] | None:
    """A point where a and b differ, or None when equal."""
    return fvl_counterexample(a, b) or fvl_counterexample(b, a)


# ---------------------------------------------------------------- vectorized exact evaluation


def integer_values(forms: Sequence[MinMaxForm], points: np.ndarray) -> list[np.ndarray]:
    """Values of each form at integer points, all scaled by one positive common denominator.

    Comparisons between the returned arrays are exact comparisons of the forms
    at those points (and, by homogeneity, at any positive rescaling of them).
    """
    den = 1
    for f in forms:
        for c in f.clauses:
            for l in c:
                for q in l.coeffs:
                    den = lcm(den, q.denominator)
    pts = np.asarray(points)
    bound = max((abs(int(q * den)) for f in forms for c in f.clauses for l in c for q in l.coeffs), default=0)
    big = bound * max(1, int(np.abs(pts).max()) if pts.size else 1) * max(1, pts.shape[1]) >= 2**62
    if big:
        pts = pts.astype(object)
    out = []
    for f in forms:
        clause_vals = []
        for c in f.clauses:
            mat = np.array([[int(q * den) for q in l.coeffs] for l in c], dtype=object if big else np.int64)
            clause_vals.append((pts @ mat.T).min(axis=1))
        out.append(np.max(np.stack(clause_vals), axis=0))
    return out


def random_points(rng: np.random.Generator, count: int, n: int, scale: int = 1000) -> np.ndarray:
    """Integer points; read as rationals with a common denominator ``scale``."""
    return rng.integers(-scale, scale + 1, size=(count, n))


def differ_on_sample(a: MinMaxForm, b: MinMaxForm, points: np.ndarray) -> tuple | None:
    va, vb = integer_values([a, b], points)
    hits = np.flatnonzero(va != vb)
    if len(hits):
        return tuple(int(v) for v in points[hits[0]])
    return None


# ---------------------------------------------------------------- seminorms


def _in_cube(p: Sequence) -> bool:
    return all(-1 <= Fraction(v) <= 1 for v in p)


@dataclass(frozen=True)
class SeminormEstimate:
    """value = max over witnesses of |a(point)|; a lower bound for ρ(a)."""

    value: Fraction
    witnesses: tuple[tuple[Fraction, ...], ...]
    best: tuple[Fraction, ...] | None


def rho_lower_bound(a: MinMaxForm, points: Iterable[Sequence]) -> SeminormEstimate:
    """Point evaluations at unit-cube points are lattice homomorphisms into ℚ that
    are contractive on the generators, so each |a(p)| bounds ρ(a) from below."""
    pts = tuple(tuple(Fraction(v) for v in p) for p in points)
    for p in pts:
        if len(p) != a.n:
            raise ValueError(f"point {p} has the wrong length")
        if not _in_cube(p):
            raise ValueError(f"point {tuple(str(v) for v in p)} lies outside [-1, 1]^{a.n}")
    best, value = None, Fraction(0)
    for p in pts:
        v = abs(a(p))
        if best is None or v > value:
            best, value = p, v
    return SeminormEstimate(value, pts, best)


@dataclass(frozen=True)
class PointSeminorm:
    """σ(a) = max over a finite point set of |a(p)|."""

    points: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(Fraction(v) for v in p) for p in self.points))
        if not self.points:
            raise ValueError("a point seminorm needs at least one point")

    def __call__(self, a: MinMaxForm) -> Fraction:
        return max(abs(a(p)) for p in self.points)

    def axiom_failures(self, a: MinMaxForm, b: MinMaxForm, q=Fraction(-3, 2)) -> list[str]:
        """Triangle inequality, absolute homogeneity, and the lattice-seminorm monotonicity."""
        out = []
        if self(a + b) > self(a) + self(b):
            out.append("triangle")
        q = Fraction(q)
        if self(a.scale(q)) != abs(q) * self(a):
            out.append("homogeneity")
        if fvl_leq(a.abs(), b.abs()) and self(a) > self(b):
            out.append("monotone")
        if fvl_leq(b.abs(), a.abs()) and self(b) > self(a):
            out.append("monotone")
        return out


@dataclass
class KernelQuotient:
    classes: list[list[int]]
    axiom_failures: list[tuple[int, int, str]]


def kernel_quotient(elements: Sequence[MinMaxForm], sigma: PointSeminorm) -> KernelQuotient:
    """Group elements with σ(a − b) = 0, i.e. equal values at every point of σ."""
    groups: dict = {}
    for i, a in enumerate(elements):
        key = tuple(a(p) for p in sigma.points)
        groups.setdefault(key, []).append(i)
    fails = []
    for i, j in itertools.combinations(range(len(elements)), 2):
        for f in sigma.axiom_failures(elements[i], elements[j]):
            fails.append((i, j, f))
    return KernelQuotient(sorted(groups.values()), fails)


def parse_points(text: str) -> list[tuple[Fraction, ...]]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if line:
            out.append(tuple(Fraction(v) for v in line.split()))
    return out

