"""Free lattices and free distributive lattices over a finite generator set.

``free_lattice_leq`` is Whitman's recursive test; ``dlat_normal_form`` is the
join-of-meets antichain.  ``birkhoff_embed`` and ``collapse_witness`` cover the
two sides of the question "when is j: L -> free vector lattice over L injective":
distributive lattices embed in 0/1 vectors, and a failing distributive triple
makes j identify two distinct elements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import NotDistributive, SignatureError
from .finite import satisfies
from .terms import App, Gen, Term, _natural_key, gen, to_sexpr
from .theories import DISTRIBUTIVE_CLAUSES, LatticePoset, order_to_ops, vee, wedge


def _check_lat(t: Term) -> None:
    if isinstance(t, App) and (t.op not in ("wedge", "vee") or len(t.args) != 2):
        raise SignatureError(f"{t.op!r} is not a lattice operation")


# ---------------------------------------------------------------- free lattice


@lru_cache(maxsize=1 << 18)
def free_lattice_leq(s: Term, t: Term) -> bool:
    """s ≤ t in the free lattice (Whitman's condition)."""
    _check_lat(s)
    _check_lat(t)
    if s == t:
        return True
    if isinstance(s, App) and s.op == "vee":
        return free_lattice_leq(s.args[0], t) and free_lattice_leq(s.args[1], t)
    if isinstance(t, App) and t.op == "wedge":
        return free_lattice_leq(s, t.args[0]) and free_lattice_leq(s, t.args[1])
    # s is a generator or a meet; t is a generator or a join
    if isinstance(s, Gen) and isinstance(t, Gen):
        return False
    if isinstance(s, App) and (free_lattice_leq(s.args[0], t) or free_lattice_leq(s.args[1], t)):
        return True
    if isinstance(t, App) and (free_lattice_leq(s, t.args[0]) or free_lattice_leq(s, t.args[1])):
        return True
    return False


def free_lattice_eq(s: Term, t: Term) -> bool:
    return free_lattice_leq(s, t) and free_lattice_leq(t, s)


# ---------------------------------------------------------------- free distributive lattice


@dataclass(frozen=True)
class DlatNormalForm:
    """⋁ over clauses of ⋀ over each clause's generators; clauses form an antichain."""

    clauses: frozenset

    def __str__(self):
        parts = ["{" + ",".join(sorted(c, key=_natural_key)) + "}" for c in self.sorted_clauses()]
        return "{" + ",".join(parts) + "}"

    def sorted_clauses(self) -> list[tuple[str, ...]]:
        return sorted((tuple(sorted(c, key=_natural_key)) for c in self.clauses), key=lambda c: (len(c), c))

    def to_term(self) -> Term:
        meets = []
        for c in self.sorted_clauses():
            t = gen(c[0])
            for g in c[1:]:
                t = wedge(t, gen(g))
            meets.append(t)
        out = meets[0]
        for m in meets[1:]:
            out = vee(out, m)
        return out


def _minimize(sets) -> frozenset:
    sets = set(sets)
    return frozenset(s for s in sets if not any(o < s for o in sets))


def dlat_join(a: DlatNormalForm, b: DlatNormalForm) -> DlatNormalForm:
    return DlatNormalForm(_minimize(a.clauses | b.clauses))


def dlat_meet(a: DlatNormalForm, b: DlatNormalForm) -> DlatNormalForm:
    return DlatNormalForm(_minimize(p | q for p in a.clauses for q in b.clauses))


def dlat_generator(name: str) -> DlatNormalForm:
    return DlatNormalForm(frozenset({frozenset({name})}))


def dlat_normal_form(t: Term) -> DlatNormalForm:
    memo: dict = {}

    def go(u):
        if u in memo:
            return memo[u]
        _check_lat(u)
        if isinstance(u, Gen):
            r = dlat_generator(u.name)
        else:
            a, b = go(u.args[0]), go(u.args[1])
            r = dlat_meet(a, b) if u.op == "wedge" else dlat_join(a, b)
        memo[u] = r
        return r

    return go(t)


def dlat_eq(s: Term, t: Term) -> bool:
    return dlat_normal_form(s) == dlat_normal_form(t)


def all_dlat_normal_forms(gens) -> list[DlatNormalForm]:
    """Every nonempty antichain of nonempty subsets of ``gens``, by direct enumeration."""
    gens = list(gens)
    subsets = [frozenset(c) for r in range(1, len(gens) + 1) for c in itertools.combinations(gens, r)]
    out = []
    for mask in range(1, 1 << len(subsets)):
        chosen = [s for i, s in enumerate(subsets) if mask >> i & 1]
        if all(not (a < b or b < a) for a, b in itertools.combinations(chosen, 2)):
            out.append(DlatNormalForm(frozenset(chosen)))
    return out


# ---------------------------------------------------------------- distributivity and Birkhoff


def distributive_violation(L: LatticePoset) -> tuple[int, int, int] | None:
    """First (x, y, z) with x⊓(y⊔z) ≠ (x⊓y)⊔(x⊓z), or None."""
    A = order_to_ops(L)
    (ident,) = DISTRIBUTIVE_CLAUSES[0].instances()
    v = satisfies(A, ident)
    if v.holds:
        return None
    c = v.counterexample
    return (c["v1"], c["v2"], c["v3"])


def is_distributive(L: LatticePoset) -> bool:
    A = order_to_ops(L)
    return all(satisfies(A, i).holds for c in DISTRIBUTIVE_CLAUSES for i in c.instances())


def join_irreducibles(L: LatticePoset) -> list[int]:
    """Elements with exactly one lower cover (so not bottom and not a join of smaller ones)."""
    out = []
    for j in range(L.size):
        below = [k for k in range(L.size) if k != j and L.leq(k, j)]
        covers = [k for k in below if not any(m != k and L.leq(k, m) for m in below)]
        if len(covers) == 1:
            out.append(j)
    return out


@dataclass(frozen=True)
class BirkhoffEmbedding:
    lattice: LatticePoset
    irreducibles: tuple[int, ...]
    vectors: tuple[tuple[int, ...], ...]

    def __call__(self, element: int) -> tuple[int, ...]:
        return self.vectors[element]

    def by_name(self) -> dict[str, tuple[int, ...]]:
        return {self.lattice.names[i]: v for i, v in enumerate(self.vectors)}


def birkhoff_embed(L: LatticePoset) -> BirkhoffEmbedding:
    """x ↦ (1 if j ≤ x else 0) over join-irreducibles j; meets go to min, joins to max."""
    bad = distributive_violation(L)
    if bad is not None:
        names = tuple(L.names[i] for i in bad)
        raise NotDistributive(f"lattice is not distributive at {names}", witness=names)
    irr = tuple(join_irreducibles(L))
    vecs = tuple(tuple(int(L.leq(j, x)) for j in irr) for x in range(L.size))
    return BirkhoffEmbedding(L, irr, vecs)


# ---------------------------------------------------------------- collapse of j


@dataclass(frozen=True)
class DerivationStep:
    term: Term
    reason: str


@dataclass(frozen=True)
class CollapseWitness:
    """j(first) = j(second) in the free vector lattice over L, with first ≠ second."""

    first: str
    second: str
    triple: tuple[str, str, str]
    steps: tuple[DerivationStep, ...]
    certified: bool

    def lines(self) -> list[str]:
        out = [f"j({self.first}) = j({self.second})  via failing triple {self.triple}"]
        for i, s in enumerate(self.steps):
            lead = "   " if i == 0 else " = "
            out.append(f"{lead}{to_sexpr(s.term)}    [{s.reason}]")
        return out


def collapse_witness(L: LatticePoset) -> CollapseWitness | None:
    """None when L is distributive; otherwise two distinct elements glued by j.

    Generator names stand for j-images of lattice elements.  Steps alternate
    between the defining relations j(u⊓v) = j(u)⊓j(v), j(u⊔v) = j(u)⊔j(v) and
    one application of vector-lattice distributivity, which is certified by an
    exact check in the free vector lattice on three generators.
    """
    bad = distributive_violation(L)
    if bad is None:
        return None
    x, y, z = bad
    nm = L.names
    w = L.join(y, z)
    p = L.meet(x, w)
    xy, xz = L.meet(x, y), L.meet(x, z)
    r = L.join(xy, xz)
    J = lambda i: gen(nm[i])  # noqa: E731
    steps = (
        DerivationStep(J(p), f"{nm[p]} = {nm[x]}⊓{nm[w]} in L"),
        DerivationStep(wedge(J(x), J(w)), f"relation j({nm[x]}⊓{nm[w]}) = j({nm[x]})⊓j({nm[w]})"),
        DerivationStep(wedge(J(x), vee(J(y), J(z))), f"relation j({nm[y]}⊔{nm[z]}) = j({nm[y]})⊔j({nm[z]})"),
        DerivationStep(vee(wedge(J(x), J(y)), wedge(J(x), J(z))), "vector lattice distributivity"),
        DerivationStep(vee(J(xy), J(xz)), "relations for the two meets"),
        DerivationStep(J(r), f"relation j({nm[xy]}⊔{nm[xz]}) = j({nm[xy]})⊔j({nm[xz]}); {nm[r]} = {nm[xy]}⊔{nm[xz]} in L"),
    )
    from .fvl import MinMaxForm, fvl_eq

    a, b, c = (MinMaxForm.variable(i, 3) for i in range(3))
    certified = fvl_eq(a.meet(b.join(c)), a.meet(b).join(a.meet(c)))
    return CollapseWitness(nm[p], nm[r], (nm[x], nm[y], nm[z]), steps, certified)
