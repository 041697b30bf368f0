"""Free (unital) vector lattice algebras over sets, vector spaces, vector lattices,
vector lattice algebras and lattices, presented as quotients of free objects
over sets by relation pairs.

A handle records the base object, the target class, the relation pairs that
generate the quotient congruence, and how base elements are named.  Equality
questions get one of three answers:

PROVED     the terms are congruent modulo the target theory plus relations
           (e-graph saturation, an exact decision, or an exact bi-ideal test);
SEPARATED  an explicit evaluation into a concrete model respects every
           relation exactly and sends the two terms to different values;
UNKNOWN    neither side succeeded within the budget.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import PreconditionError, SignatureError
from .fvl import MinMaxForm, fvl_difference, fvl_eq
from .lattice import birkhoff_embed, distributive_violation
from .structures import (
    FVLStructure,
    StructureVLA,
    coordinatewise,
    f_algebra_probe,
    matrices,
    rationals,
    unitise,
    vector_lattice,
    zero_product,
)
from .termalg import EGraph, Evaluation, Rule, SaturationStats, evaluate, rules_from_identities, run_saturation
from .terms import App, Gen, Identity, Term, check_term, gen, subterms, to_sexpr
from .theories import (
    DEFAULT_PROBE,
    LATTICE_PRESETS,
    ONE,
    ZERO,
    LatticePoset,
    absval,
    dot,
    neg,
    order_to_ops,
    plus,
    scale,
    theory,
    vee,
    wedge,
)

__all__ = [
    "PROVED",
    "SEPARATED",
    "UNKNOWN",
    "Budget",
    "FreeObjectHandle",
    "MatrixWitness",
    "ProofResult",
    "Separation",
    "compose",
    "f_algebra_probe",
    "make_free",
    "prove_equal",
    "unitise",
]

PROVED, SEPARATED, UNKNOWN = "PROVED", "SEPARATED", "UNKNOWN"

BASES = ("Set", "VS", "VL", "VLA", "VLA1", "Lat")
TARGETS = ("VS", "VL", "VLA", "VLA1", "VLA1P")
_CHAIN = ("VS", "VL", "VLA", "VLA1", "VLA1P")

# operations a morphism out of each base kind preserves
_RECIPE = {
    "Set": (),
    "VS": ("plus", "scale"),
    "VL": ("plus", "scale", "vee"),
    "VLA": ("plus", "scale", "vee", "dot"),
    "VLA1": ("plus", "scale", "vee", "dot", "one"),
    "Lat": ("wedge", "vee"),
}
# further operations preserved as a consequence (used by the on-demand base hook)
_DERIVED = {
    "VS": ("neg", "zero"),
    "VL": ("neg", "zero", "wedge"),
    "VLA": ("neg", "zero", "wedge"),
    "VLA1": ("neg", "zero", "wedge"),
}

LATTICE_LINEAR_OPS = frozenset({"zero", "plus", "neg", "scale", "vee", "wedge"})


def valid_pair(base: str, target: str) -> bool:
    if target not in TARGETS:
        return False
    if base == "Set":
        return True
    if base == "Lat":
        return target != "VS"
    if base not in _CHAIN:
        return False
    return _CHAIN.index(target) > _CHAIN.index(base)


def _canon_kind(name: str, allowed: Sequence[str]) -> str:
    for a in allowed:
        if a.lower() == name.lower():
            return a
    raise PreconditionError(f"unknown category {name!r}; choose from {', '.join(allowed)}")


# ---------------------------------------------------------------- base objects


class BaseModel:
    """Named elements of the base object and its operations."""

    kind = "Set"
    finite = True

    def __init__(self, names: Sequence[str]):
        self.generators = list(names)
        self._values = {n: n for n in names}

    def known(self, name: str) -> bool:
        return name in self._values

    def names(self) -> list[str]:
        return list(self._values)

    def value(self, name: str):
        return self._values[name]

    def name_of(self, value) -> str:
        if value in self._values:
            return value
        raise KeyError(value)

    def compute(self, op: str, vals: Sequence, scalar=None):
        raise PreconditionError("a set has no operations")

    @property
    def recipe_ops(self) -> tuple[str, ...]:
        return _RECIPE[self.kind]

    @property
    def hook_ops(self) -> tuple[str, ...]:
        return _RECIPE[self.kind] + _DERIVED.get(self.kind, ())

    def describe(self) -> str:
        return f"set {{{', '.join(self.generators)}}}"


class LatBase(BaseModel):
    kind = "Lat"

    def __init__(self, L: LatticePoset):
        self.lattice = L
        self.algebra = order_to_ops(L)
        self.generators = list(L.names)
        self._values = {n: i for i, n in enumerate(L.names)}

    def name_of(self, value) -> str:
        return self.lattice.names[value]

    def compute(self, op, vals, scalar=None):
        return int(self.algebra.tables[op][vals[0], vals[1]])

    def describe(self) -> str:
        return f"lattice with {self.lattice.size} elements"


def _vec_name(v) -> str:
    return "<" + ",".join(str(x) for x in v) + ">"


class VectorBase(BaseModel):
    """A finite-dimensional vector space / vector lattice / VLA on ℚᵈ."""

    finite = False

    def __init__(self, A: StructureVLA, kind: str, named: dict | None = None):
        self.kind = kind
        self.structure = A
        if named is None:
            labels = A.labels or tuple(f"e{i + 1}" for i in range(A.dim))
            named = {labels[i]: A.basis(i) for i in range(A.dim)}
        self.generators = list(named)
        self._values = {}
        self._names = {}
        for n, v in named.items():
            v = A.element(v)
            self._values[n] = v
            self._names.setdefault(v, n)

    def name_of(self, value) -> str:
        value = tuple(Fraction(x) for x in value)
        name = self._names.get(value)
        if name is None:
            name = _vec_name(value)
            self._names[value] = name
            self._values[name] = value
        return name

    def compute(self, op, vals, scalar=None):
        if op == "one":
            return self.structure.unit
        return self.structure.operate(op, vals, scalar)

    def describe(self) -> str:
        return f"{self.kind} {self.structure.name or 'Q^%d' % self.structure.dim}"


class FVLBase(BaseModel):
    """The free vector lattice over a finite set, realised by min-max forms.

    Registered forms are deduplicated up to equality in the free vector lattice,
    so equal base elements always receive the same name.
    """

    kind = "VL"
    finite = False

    def __init__(self, gens: Sequence[str]):
        self.generators = list(gens)
        self.n = len(gens)
        self.model = FVLStructure(self.n)
        self._values: dict[str, MinMaxForm] = {}
        self._exact: dict[MinMaxForm, str] = {}
        for i, g in enumerate(gens):
            self._register(g, MinMaxForm.variable(i, self.n))
        self._fresh = itertools.count(1)

    def _register(self, name, form):
        self._values[name] = form
        self._exact[form] = name

    def name_of(self, value: MinMaxForm) -> str:
        hit = self._exact.get(value)
        if hit is not None:
            return hit
        for name, f in self._values.items():
            if fvl_eq(f, value):
                self._exact[value] = name
                return name
        name = f"#f{next(self._fresh)}"
        self._register(name, value)
        return name

    def compute(self, op, vals, scalar=None):
        return self.model.operate(op, vals, scalar)

    def describe(self) -> str:
        return f"free vector lattice over {{{', '.join(self.generators)}}}"


# ---------------------------------------------------------------- handles


@dataclass(frozen=True)
class Relation:
    lhs: Term
    rhs: Term
    label: str = ""

    @property
    def element(self) -> Term:
        """lhs − rhs, the bi-ideal generator this pair stands for."""
        return plus(self.lhs, neg(self.rhs))

    def __str__(self):
        return f"{to_sexpr(self.lhs)} ≈ {to_sexpr(self.rhs)}"


@dataclass
class FreeObjectHandle:
    base: str
    target: str
    model: BaseModel
    relations: list[Relation]
    scalars: tuple = DEFAULT_PROBE
    internal: bool = False
    note: str = ""
    _rules: list | None = field(default=None, repr=False)

    @property
    def theory(self):
        return theory(self.target)

    @property
    def sig(self):
        return self.theory.sig

    @property
    def generators(self) -> list[str]:
        return self.model.generators

    def j(self, x) -> Gen:
        """Image of a base element (or of a base element's name)."""
        if isinstance(x, str) and self.model.known(x):
            return gen(x)
        return gen(self.model.name_of(x))

    def check(self, t: Term) -> Term:
        check_term(t, self.sig)
        for s in subterms(t):
            if isinstance(s, Gen) and not self.model.known(s.name):
                raise SignatureError(f"{s.name!r} is not a named element of the base {self.model.describe()}")
        return t

    def describe(self) -> str:
        return f"{self.base} -> {self.target} over {self.model.describe()}; {len(self.relations)} relation pair(s)"


def _recipe_relations(model: BaseModel, scalars: Sequence) -> list[Relation]:
    rels = []
    names = model.names()
    for op in model.recipe_ops:
        if op in ("wedge", "vee", "plus", "dot"):
            for x, y in itertools.product(names, repeat=2):
                v = model.compute(op, [model.value(x), model.value(y)])
                rels.append(Relation(gen(model.name_of(v)), App(op, (gen(x), gen(y))), f"j({op})"))
        elif op == "scale":
            for x in names:
                for q in scalars:
                    v = model.compute("scale", [model.value(x)], q)
                    rels.append(Relation(gen(model.name_of(v)), scale(q, gen(x)), "j(scale)"))
        elif op == "one":
            rels.append(Relation(gen(model.name_of(model.compute("one", []))), ONE, "j(1) = 1"))
    return rels


POSITIVE_UNIT = Relation(absval(ONE), ONE, "|1| = 1")


def make_free(
    base: str,
    target: str,
    generators: Sequence[str] | None = None,
    lattice: LatticePoset | None = None,
    structure: StructureVLA | None = None,
    named: dict | None = None,
    scalars: Sequence = DEFAULT_PROBE,
) -> FreeObjectHandle:
    """Handle for the free ``target`` object over a ``base`` object.

    Set bases take ``generators``; Lat bases take ``lattice``; VS, VL, VLA and
    VLA1 bases take ``structure`` (ℚᵈ with its operations) and optionally
    ``named`` elements (default: the basis).  Relations follow the recipe for
    the pair: the base operations must be respected by j, and a VLA1P target
    also forces |1| = 1.  For a VLA1 base the free VLA1P object is the quotient
    of the base itself, so the handle carries the single pair |1| ≈ 1.
    """
    base = _canon_kind(base, BASES)
    target = _canon_kind(target, TARGETS)
    if not valid_pair(base, target):
        raise PreconditionError(f"no free object from {base} to {target} in the diagram")
    scalars = tuple(Fraction(q) for q in scalars)
    if base == "Set":
        if not generators:
            raise PreconditionError("a Set base needs a non-empty generator list")
        model: BaseModel = BaseModel(generators)
    elif base == "Lat":
        if lattice is None:
            raise PreconditionError("a Lat base needs a finite lattice")
        model = LatBase(lattice)
    else:
        if structure is None:
            raise PreconditionError(f"a {base} base needs a finite presentation (a structure on Q^d)")
        if base == "VLA1" and structure.unit is None:
            raise PreconditionError("a VLA1 base needs a unital structure")
        if base in ("VLA", "VLA1") and not structure.with_product:
            raise PreconditionError(f"a {base} base needs a product")
        model = VectorBase(structure, base, named)
    if base == "VLA1":
        return FreeObjectHandle(base, target, model, [POSITIVE_UNIT], scalars, internal=True)
    rels = _recipe_relations(model, scalars)
    if target == "VLA1P":
        rels.append(POSITIVE_UNIT)
    return FreeObjectHandle(base, target, model, rels, scalars)


def compose(first: FreeObjectHandle, target: str) -> FreeObjectHandle:
    """Set → VS → target or Set → VL → target as a single handle over the intermediate object.

    The intermediate free object is realised concretely (ℚⁿ for VS, min-max
    forms for VL) and its generators keep the names of the set's elements.
    """
    target = _canon_kind(target, TARGETS)
    if first.base != "Set" or first.target not in ("VS", "VL"):
        raise PreconditionError("composition is supported after Set -> VS or Set -> VL")
    if not valid_pair(first.target, target):
        raise PreconditionError(f"no free object from {first.target} to {target}")
    gens = first.generators
    if first.target == "VS":
        S = vector_lattice(len(gens))
        named = {g: S.basis(i) for i, g in enumerate(gens)}
        model: BaseModel = VectorBase(S, "VS", named)
    else:
        model = FVLBase(gens)
    rels = _recipe_relations(model, first.scalars)
    if target == "VLA1P":
        rels.append(POSITIVE_UNIT)
    return FreeObjectHandle(
        first.target, target, model, rels, first.scalars, note=f"composite Set -> {first.target} -> {target}"
    )


# ---------------------------------------------------------------- results


@dataclass
class MatrixWitness:
    """k×k rational matrices assigned to generators (entrywise order)."""

    k: int
    entries: dict

    def lines(self) -> list[str]:
        out = []
        for name, m in self.entries.items():
            rows = ["[" + " ".join(str(v) for v in row) + "]" for row in m]
            out.append(f"{name} = {' '.join(rows)}")
        return out


@dataclass
class Separation:
    structure: str
    assignment: dict
    values: tuple
    relations_checked: int
    matrix: MatrixWitness | None = None

    def lines(self) -> list[str]:
        out = [f"model: {self.structure}"]
        if self.matrix is not None:
            out += ["  " + s for s in self.matrix.lines()]
        else:
            out += [f"  {k} ↦ {_show(v)}" for k, v in self.assignment.items()]
        out.append(f"  values: {_show(self.values[0])} vs {_show(self.values[1])}")
        out.append(f"  relations respected: {self.relations_checked} (exact)")
        return out


def _show(v) -> str:
    if isinstance(v, tuple):
        return "(" + ", ".join(str(x) for x in v) + ")"
    return str(v)


@dataclass
class ProofResult:
    status: str
    method: str = ""
    witness: Separation | None = None
    stats: SaturationStats | None = None
    trials: int = 0

    @property
    def proved(self) -> bool:
        return self.status == PROVED

    @property
    def separated(self) -> bool:
        return self.status == SEPARATED

    def lines(self) -> list[str]:
        out = [f"{self.status} ({self.method})" if self.method else self.status]
        if self.witness is not None:
            out += self.witness.lines()
        if self.stats is not None:
            s = self.stats
            out.append(f"saturation: rounds={s.rounds} nodes={s.nodes} classes={s.classes} stopped={s.stopped}")
        if self.status == UNKNOWN:
            out.append(f"separation trials: {self.trials}")
        return out


@dataclass
class Budget:
    rounds: int = 3
    max_nodes: int = 20_000
    trials: int = 200
    scalars: tuple = DEFAULT_PROBE


# ---------------------------------------------------------------- helpers


def _ops(t: Term) -> set[str]:
    return {s.op for s in subterms(t) if isinstance(s, App)}


def lattice_linear(t: Term) -> bool:
    return _ops(t) <= LATTICE_LINEAR_OPS


def _scalars_in(*ts: Term) -> set[Fraction]:
    return {s.scalar for t in ts for s in subterms(t) if isinstance(s, App) and s.scalar is not None}


def _names_in(terms: Iterable[Term]) -> list[str]:
    seen = {}
    for t in terms:
        for s in subterms(t):
            if isinstance(s, Gen):
                seen.setdefault(s.name, None)
    return list(seen)


def _evaluate_pair(W, assign: dict, t1: Term, t2: Term, rels: Sequence[Relation]):
    """(v1, v2) when every relation holds exactly under ``assign``; None otherwise."""
    ev = Evaluation(W, assign)
    memo: dict = {}
    for r in rels:
        if evaluate(r.lhs, ev, memo) != evaluate(r.rhs, ev, memo):
            return None
    return evaluate(t1, ev, memo), evaluate(t2, ev, memo)


def _matrix_witness(W, assign) -> MatrixWitness | None:
    if not W.name.startswith("M") or "entrywise" not in W.name:
        return None
    k = int(round(W.dim**0.5))
    return MatrixWitness(k, {n: tuple(tuple(v[i * k + j] for j in range(k)) for i in range(k)) for n, v in assign.items()})


# ---------------------------------------------------------------- separation candidates

_SMALL_VALUES = [Fraction(v) for v in ("0", "1", "-1", "2", "1/2", "-2")]


def _library(target: str) -> list[StructureVLA]:
    """Separating models admissible for the target class."""
    if target == "VS":
        return [vector_lattice(1), vector_lattice(2)]
    if target == "VL":
        return [vector_lattice(1), vector_lattice(2), vector_lattice(3)]
    unital = [rationals(), coordinatewise(2), matrices(2), unitise(zero_product(1), check=False), matrices(3)]
    if target == "VLA":
        return [rationals(), coordinatewise(2), matrices(2), zero_product(1), zero_product(2), matrices(3)]
    if target == "VLA1":
        # a unit that is not positive, so |1| = 1 can fail
        return unital + [dual_numbers()]
    return unital


def _deterministic_elements(W: StructureVLA, limit: int = 8) -> list[tuple]:
    """Basis elements first, then small combinations."""
    out = [W.basis(i) for i in range(W.dim)]
    if W.dim == 1:
        out = [(v,) for v in _SMALL_VALUES]
    else:
        for i, j in itertools.combinations(range(W.dim), 2):
            out.append(tuple(Fraction(int(k in (i, j))) for k in range(W.dim)))
            out.append(tuple(Fraction(int(k == i) - int(k == j)) for k in range(W.dim)))
    return out[: max(limit, W.dim)]


Candidate = tuple  # (structure, assignment dict over base names)


def _set_candidates(h, names, rng, random_phase: bool, trials: int):
    gens = h.generators
    for W in _library(h.target):
        if random_phase:
            for _ in range(max(1, trials // len(_library(h.target)))):
                yield W, {g: W.sample(rng) for g in gens}
        else:
            elems = _deterministic_elements(W)
            combos = itertools.product(elems, repeat=len(gens))
            for values in itertools.islice(combos, 400):
                yield W, dict(zip(gens, values))


def _prime_filters(L: LatticePoset) -> list[frozenset]:
    """Nonempty proper prime filters (lattice homomorphisms onto the 2-chain)."""
    n = L.size
    A = order_to_ops(L)
    meet, join = A.tables["wedge"], A.tables["vee"]
    out = []
    for mask in range(1, (1 << n) - 1):
        F = {i for i in range(n) if mask >> i & 1}
        ok = all(
            ((int(meet[a, b]) in F) == (a in F and b in F)) and ((int(join[a, b]) in F) == (a in F or b in F))
            for a in range(n)
            for b in range(n)
        )
        if ok:
            out.append(frozenset(F))
        if n > 12:
            break
    return out


def _lat_candidates(h, names, rng, random_phase: bool, trials: int):
    model: LatBase = h.model
    L = model.lattice
    filters = _prime_filters(L)
    if not random_phase:
        if distributive_violation(L) is None and L.size > 1:
            emb = birkhoff_embed(L)
            m = len(emb.irreducibles)
            W = replace(coordinatewise(m), name=f"Q^{m} (Birkhoff characteristic vectors)")
            yield W, {n: tuple(Fraction(c) for c in emb(model.value(n))) for n in model.names()}
        W = rationals()
        for F in filters:
            yield W, {n: (Fraction(int(model.value(n) in F)),) for n in model.names()}
        return
    if not filters:
        return
    for _ in range(trials):
        k = rng.randint(1, 3)
        W = coordinatewise(k)
        picks = [(rng.choice(filters), Fraction(rng.randint(1, 5)), Fraction(rng.randint(-3, 3))) for _ in range(k)]
        yield W, {
            n: tuple(off + w * int(model.value(n) in F) for F, w, off in picks) for n in model.names()
        }


def _linear_extension(W, images: dict, basis_names: Sequence[str]):
    """φ(v) = Σ vᵢ·images[basis_i] into W."""

    def phi(v):
        acc = W.zero()
        for c, b in zip(v, basis_names):
            if c:
                acc = W.operate("plus", [acc, W.operate("scale", [images[b]], c)])
        return acc

    return phi


def _vector_candidates(h, names, rng, random_phase: bool, trials: int):
    model: VectorBase = h.model
    A = model.structure
    d = A.dim
    all_names = model.names()
    if model.kind == "VS":
        basis = [f"_b{i}" for i in range(d)]
        for W in _library(h.target):
            if random_phase:
                combos = ([W.sample(rng) for _ in range(d)] for _ in range(max(1, trials // 4)))
            else:
                combos = itertools.islice(itertools.product(_deterministic_elements(W), repeat=d), 200)
            for imgs in combos:
                phi = _linear_extension(W, dict(zip(basis, imgs)), basis)
                yield W, {n: phi(model.value(n)) for n in all_names}
        return
    if model.kind == "VL":
        if random_phase:
            for _ in range(trials):
                m = rng.randint(1, 3)
                W = coordinatewise(m) if h.target != "VL" else vector_lattice(m)
                picks = [(rng.randrange(d), Fraction(rng.randint(1, 4))) for _ in range(m)]
                yield W, {n: tuple(w * model.value(n)[i] for i, w in picks) for n in all_names}
            return
        W = coordinatewise(d) if h.target != "VL" else vector_lattice(d)
        yield W, {n: model.value(n) for n in all_names}
        W1 = rationals()
        for i in range(d):
            yield W1, {n: (model.value(n)[i],) for n in all_names}
        # coordinates placed into matrix entries are lattice homomorphisms into M2
        if h.target in ("VLA", "VLA1", "VLA1P"):
            M = matrices(2)
            for placement in itertools.islice(itertools.product(range(-1, d), repeat=4), 300):
                yield M, {
                    n: tuple(Fraction(0) if p < 0 else model.value(n)[p] for p in placement) for n in all_names
                }
        return
    if model.kind == "VLA" and not random_phase:
        if h.target == "VLA":
            yield A, {n: model.value(n) for n in all_names}
        else:
            U = unitise(A, check=False)
            yield U, {n: (Fraction(0),) + model.value(n) for n in all_names}


def _fvl_candidates(h, names, rng, random_phase: bool, trials: int, hint=None):
    model: FVLBase = h.model
    W = rationals()
    n = model.n
    if not random_phase:
        pts = [hint] if hint is not None else []
        pts += [tuple(Fraction(v) for v in p) for p in itertools.product((0, 1, -1, 2), repeat=n)]
        for p in itertools.islice(pts, 300):
            yield W, {nm: (model.value(nm)(p),) for nm in model.names()}
        return
    for _ in range(trials):
        p = tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 7)) for _ in range(n))
        yield W, {nm: (model.value(nm)(p),) for nm in model.names()}


def _candidates(h, t1, t2, rng, random_phase: bool, trials: int):
    names = _names_in([t1, t2])
    model = h.model
    if model.kind == "Set":
        return _set_candidates(h, names, rng, random_phase, trials)
    if isinstance(model, LatBase):
        return _lat_candidates(h, names, rng, random_phase, trials)
    if isinstance(model, FVLBase):
        hint = None
        if not random_phase and lattice_linear(t1) and lattice_linear(t2):
            hint = fvl_difference(_fvl_value(model, t1), _fvl_value(model, t2))
        return _fvl_candidates(h, names, rng, random_phase, trials, hint)
    return _vector_candidates(h, names, rng, random_phase, trials)


def _fvl_value(model: FVLBase, t: Term) -> MinMaxForm:
    return evaluate(t, Evaluation(model.model, {n: model.value(n) for n in model.names()}))


def _search_separation(h, t1, t2, rng, random_phase: bool, trials: int) -> tuple[Separation | None, int]:
    tried = 0
    names = _names_in([t1, t2] + [s for r in h.relations for s in (r.lhs, r.rhs)])
    for W, assign in _candidates(h, t1, t2, rng, random_phase, trials):
        tried += 1
        if any(n not in assign for n in names):
            continue
        if not (_ops(t1) | _ops(t2)) <= set(W.sig.names):
            continue
        got = _evaluate_pair(W, assign, t1, t2, h.relations)
        if got is None or got[0] == got[1]:
            continue
        shown = {n: assign[n] for n in _names_in([t1, t2])}
        return Separation(W.name, shown, got, len(h.relations), _matrix_witness(W, shown)), tried
    return None, tried


# ---------------------------------------------------------------- exact paths


def _linear_images(h) -> tuple[int, dict]:
    model = h.model
    if model.kind == "Set":
        n = len(model.generators)
        return n, {g: MinMaxForm.variable(i, n) for i, g in enumerate(model.generators)}
    d = model.structure.dim
    return d, {nm: MinMaxForm.linear(model.value(nm)) for nm in model.names()}


def _decide_linear_base(h, t1, t2) -> ProofResult:
    """Set or VS base, lattice-linear terms: decide in the free vector lattice.

    Equal there means equal in every vector lattice, hence in the target.
    Otherwise a point p with different values gives the evaluation
    generator ↦ (its linear form at p) into ℚ, which respects every relation.
    """
    n, images = _linear_images(h)
    M = FVLStructure(n)
    ev = Evaluation(M, images)
    a, b = evaluate(t1, ev), evaluate(t2, ev)
    p = fvl_difference(a, b)
    if p is None:
        return ProofResult(PROVED, "free vector lattice decision")
    W = rationals() if h.target != "VS" and h.target != "VL" else vector_lattice(1)
    assign = {nm: (f(p),) for nm, f in images.items()}
    got = _evaluate_pair(W, assign, t1, t2, h.relations)
    assert got is not None and got[0] != got[1]
    shown = {nm: assign[nm] for nm in _names_in([t1, t2])}
    return ProofResult(SEPARATED, "point evaluation", Separation(W.name, shown, got, len(h.relations)))


def bi_ideal_support(A: StructureVLA, r: Sequence) -> frozenset[int]:
    """Coordinates spanning the bi-ideal of A generated by r.

    Order ideals of ℚᵈ with the coordinatewise order are coordinate subspaces,
    and products of basis vectors have nonnegative coordinates, so closing the
    support of r under eᵢ ↦ supp(eⱼeᵢ) ∪ supp(eᵢeⱼ) gives the bi-ideal exactly.
    """
    S = {i for i, v in enumerate(r) if v}
    stack = list(S)
    while stack:
        i = stack.pop()
        for j in range(A.dim):
            for k, _ in A._terms[i][j] + A._terms[j][i]:
                if k not in S:
                    S.add(k)
                    stack.append(k)
    return frozenset(S)


def quotient_structure(A: StructureVLA, S: frozenset[int]) -> tuple[StructureVLA, Callable]:
    keep = [i for i in range(A.dim) if i not in S]
    pos = {i: p for p, i in enumerate(keep)}
    c = [[{} for _ in keep] for _ in keep]
    for i in keep:
        for j in keep:
            c[pos[i]][pos[j]] = {pos[k]: v for k, v in A.consts[i][j].items() if k in pos}
    unit = tuple(A.unit[i] for i in keep) if A.unit is not None else None
    labels = tuple(A.labels[i] for i in keep) if A.labels else ()
    Q = StructureVLA(len(keep), c, unit, f"{A.name or 'A'}/I", labels=labels)
    return Q, lambda v: tuple(v[i] for i in keep)


def _decide_internal(h, t1, t2) -> ProofResult:
    A = h.model.structure
    one = A.unit
    r = tuple(abs(v) - v for v in one)
    S = bi_ideal_support(A, r)
    ev = Evaluation(A, {n: h.model.value(n) for n in h.model.names()})
    v1, v2 = evaluate(t1, ev), evaluate(t2, ev)
    if all(i in S for i, (a, b) in enumerate(zip(v1, v2)) if a != b):
        return ProofResult(PROVED, "bi-ideal membership (exact)")
    Q, q = quotient_structure(A, S)
    shown = {n: q(h.model.value(n)) for n in _names_in([t1, t2])}
    return ProofResult(SEPARATED, "quotient by the bi-ideal", Separation(Q.name, shown, (q(v1), q(v2)), 1))


# ---------------------------------------------------------------- saturation

_LEMMAS_VL = [
    ("wedge-over-vee", wedge(Gen("v1"), vee(Gen("v2"), Gen("v3"))), vee(wedge(Gen("v1"), Gen("v2")), wedge(Gen("v1"), Gen("v3")))),
    ("vee-over-wedge", vee(Gen("v1"), wedge(Gen("v2"), Gen("v3"))), wedge(vee(Gen("v1"), Gen("v2")), vee(Gen("v1"), Gen("v3")))),
    ("neg-vee", neg(vee(Gen("v1"), Gen("v2"))), wedge(neg(Gen("v1")), neg(Gen("v2")))),
    ("neg-wedge", neg(wedge(Gen("v1"), Gen("v2"))), vee(neg(Gen("v1")), neg(Gen("v2")))),
    ("plus-vee", plus(Gen("v1"), vee(Gen("v2"), Gen("v3"))), vee(plus(Gen("v1"), Gen("v2")), plus(Gen("v1"), Gen("v3")))),
]
_LEMMAS_VS = [
    ("neg-neg", neg(neg(Gen("v1"))), Gen("v1")),
    ("neg-zero", neg(ZERO), ZERO),
    ("zero-plus", plus(ZERO, Gen("v1")), Gen("v1")),
]
# x⊙0 = x⊙(0+0) = x⊙0 + x⊙0, so x⊙0 = 0; symmetrically 0⊙x = 0
_LEMMAS_RING = [
    ("dot-zero", dot(Gen("v1"), ZERO), ZERO),
    ("zero-dot", dot(ZERO, Gen("v1")), ZERO),
]

_CERTIFIED: dict[str, bool] = {}


def _certified(label, lhs, rhs) -> bool:
    """Vector-lattice lemmas are admitted only after an exact check in the free vector lattice."""
    if label not in _CERTIFIED:
        names = ["v1", "v2", "v3"]
        M = FVLStructure(3)
        ev = Evaluation(M, {n: MinMaxForm.variable(i, 3) for i, n in enumerate(names)})
        _CERTIFIED[label] = fvl_eq(evaluate(lhs, ev), evaluate(rhs, ev))
    return _CERTIFIED[label]


def lemma_identities(target: str) -> list[Identity]:
    out = [Identity(l, r, lab) for lab, l, r in _LEMMAS_VS if _certified(lab, l, r)]
    if target != "VS":
        out += [Identity(l, r, lab) for lab, l, r in _LEMMAS_VL if _certified(lab, l, r)]
    if target in ("VLA", "VLA1", "VLA1P"):
        out += [Identity(l, r, lab) for lab, l, r in _LEMMAS_RING]
    return out


def _rules(h, scalars) -> list[Rule]:
    idents = h.theory.identities(scalars) + lemma_identities(h.target)
    return rules_from_identities(idents)


def _base_hook(h, max_nodes: int):
    model = h.model
    ops = set(model.hook_ops)

    def hook(eg: EGraph):
        for _ in range(64):
            eg.rebuild()
            jname: dict[int, str] = {}
            for node, cid in eg.hashcons.items():
                if node[0] == "$gen" and model.known(node[1]):
                    jname.setdefault(eg.find(cid), node[1])
            changed = False
            for node, cid in list(eg.hashcons.items()):
                op, param, kids = node
                if op not in ops:
                    continue
                names = [jname.get(eg.find(k)) for k in kids]
                if any(n is None for n in names):
                    continue
                val = model.compute(op, [model.value(n) for n in names], param)
                gid = eg.add_node(("$gen", model.name_of(val), ()))
                if eg.union(gid, cid):
                    changed = True
            if not changed or eg.node_count > max_nodes:
                break
        eg.rebuild()

    return hook


def saturate_pair(h, t1, t2, budget: Budget) -> tuple[bool, SaturationStats]:
    eg = EGraph()
    for r in h.relations:
        eg.union(eg.add_term(r.lhs), eg.add_term(r.rhs))
    scalars = tuple(sorted(set(budget.scalars) | _scalars_in(t1, t2)))
    hooks = [] if h.model.kind == "Set" else [_base_hook(h, budget.max_nodes)]
    stats = run_saturation(eg, _rules(h, scalars), budget.rounds, budget.max_nodes, goal=(t1, t2), hooks=hooks)
    return stats.stopped == "goal", stats


# ---------------------------------------------------------------- the main entry


def prove_equal(h: FreeObjectHandle, t1: Term, t2: Term, budget: Budget | None = None, seed: int = 0) -> ProofResult:
    budget = budget or Budget()
    h.check(t1)
    h.check(t2)
    if t1 == t2:
        return ProofResult(PROVED, "syntactic")
    if h.internal:
        return _decide_internal(h, t1, t2)
    if h.model.kind in ("Set", "VS") and lattice_linear(t1) and lattice_linear(t2):
        return _decide_linear_base(h, t1, t2)
    rng = random.Random(seed)
    sep, tried = _search_separation(h, t1, t2, rng, False, budget.trials)
    if sep is not None:
        return ProofResult(SEPARATED, "evaluation search", sep, trials=tried)
    ok, stats = saturate_pair(h, t1, t2, budget)
    if ok:
        return ProofResult(PROVED, "congruence closure", stats=stats, trials=tried)
    sep, more = _search_separation(h, t1, t2, rng, True, budget.trials)
    if sep is not None:
        return ProofResult(SEPARATED, "random evaluation", sep, stats=stats, trials=tried + more)
    return ProofResult(UNKNOWN, "budget exhausted", stats=stats, trials=tried + more)


# ---------------------------------------------------------------- presets


def dual_numbers() -> StructureVLA:
    """ℚ[t]/(t²) on the basis u = 1 + t, t: positive product, identity u − t not positive."""
    c = [[{0: 1, 1: 1}, {1: 1}], [{1: 1}, {}]]
    return StructureVLA(2, c, (1, -1), "dual numbers", labels=("u", "t"))


STRUCTURE_HANDLE_PRESETS: dict[str, Callable[[], StructureVLA]] = {
    "Q": rationals,
    "Q2": lambda: coordinatewise(2),
    "Q3": lambda: coordinatewise(3),
    "m2": lambda: matrices(2),
    "m3": lambda: matrices(3),
    "dual": dual_numbers,
    "Q2-zero": lambda: zero_product(2),
}


def preset_handle(base: str, target: str, preset: str | None = None, gens: Sequence[str] = ()) -> FreeObjectHandle:
    base_c = _canon_kind(base, BASES)
    if base_c == "Set":
        return make_free("Set", target, generators=list(gens) or ["a", "b"])
    if base_c == "Lat":
        if preset not in LATTICE_PRESETS:
            raise PreconditionError(f"unknown lattice preset {preset!r}; choose from {', '.join(LATTICE_PRESETS)}")
        return make_free("Lat", target, lattice=LATTICE_PRESETS[preset]())
    if preset not in STRUCTURE_HANDLE_PRESETS:
        raise PreconditionError(f"unknown structure preset {preset!r}; choose from {', '.join(STRUCTURE_HANDLE_PRESETS)}")
    A = STRUCTURE_HANDLE_PRESETS[preset]()
    if base_c == "VS":
        A = StructureVLA(A.dim, A.consts, None, A.name, False, A.labels)
    elif base_c == "VL":
        A = StructureVLA(A.dim, A.consts, None, A.name, False, A.labels)
    elif base_c == "VLA" and A.unit is not None:
        A = StructureVLA(A.dim, A.consts, None, A.name, True, A.labels)
    return make_free(base_c, target, structure=A)
