"""Acceptance gate: one test per criterion, each checked against an oracle
written independently of the engine code it exercises."""

import itertools
import random
import time
from fractions import Fraction
from math import lcm

import numpy as np
import pytest

from latfree.errors import BudgetExceeded
from latfree.finite import (
    CongruenceRelation,
    FiniteAlgebra,
    generate_congruence,
    kernel,
    quotient,
    satisfies,
    substitution_pairs,
)
from latfree.fvl import (
    MinMaxForm,
    LinForm,
    PointSeminorm,
    fvl_difference,
    fvl_eq,
    integer_values,
    kernel_quotient,
    rho_lower_bound,
)
from latfree.lattice import (
    all_dlat_normal_forms,
    dlat_join,
    dlat_meet,
    dlat_generator,
    dlat_normal_form,
    free_lattice_eq,
)
from latfree.structures import FVLStructure, f_algebra_probe, matrices
from latfree.termalg import Evaluation, evaluate, is_homomorphic_on, terms_up_to_height
from latfree.terms import App, Gen, Identity, Signature, gen, parse_term
from latfree.theories import (
    LAT_CLAUSES,
    LAT_SIG,
    boolean,
    check_theory,
    enumerate_lattices,
    m3,
    ops_to_order,
    order_to_ops,
    theory,
    vee,
    wedge,
)
from latfree.vla import SEPARATED, PROVED, Budget, compose, make_free, prove_equal


def criterion(n, title):
    return pytest.mark.criterion(n, title)


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f}s, limit {self.limit}s"


# ---------------------------------------------------------------- helpers


def random_term(rng, sig, gens, h):
    """A random term of height at most h; leaves are generators or constants."""
    leaves = [Gen(g) for g in gens] + [App(c) for c in sig.constants]
    if h == 0 or rng.random() < 0.15:
        return rng.choice(leaves)
    op, arity = rng.choice(sig.operations)
    return App(op, tuple(random_term(rng, sig, gens, h - 1) for _ in range(arity)))


def naive_eval(t, tables, assign):
    if isinstance(t, Gen):
        return assign[t.name]
    vals = [naive_eval(a, tables, assign) for a in t.args]
    table = tables[t.op]
    for v in vals:
        table = table[v]
    return int(table)


def all_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def brute_congruences(A):
    out = []
    for part in all_partitions(list(range(A.size))):
        block = {x: i for i, b in enumerate(part) for x in b}
        ok = True
        tab = A.tables["f"]
        for a, b, c, d in itertools.product(range(A.size), repeat=4):
            if block[a] == block[b] and block[c] == block[d] and block[int(tab[a, c])] != block[int(tab[b, d])]:
                ok = False
                break
        if ok:
            out.append(block)
    return out


BIN = Signature((("f", 2),))


def binary_algebras():
    rng = np.random.default_rng(0)
    algs = []
    for size in range(1, 5):
        for _ in range(3):
            algs.append(FiniteAlgebra(BIN, size, {"f": rng.integers(0, size, (size, size))}))
    algs.append(FiniteAlgebra.from_functions(BIN, 4, {"f": lambda a, b: (a + b) % 4}, "Z4"))
    return algs


# ---------------------------------------------------------------- 1


@criterion(1, "term algebra freeness")
def test_c1_freeness():
    rng = random.Random(1)
    nprng = np.random.default_rng(1)
    with Clock(5):
        for _ in range(200):
            arities = [rng.randint(0, 3) for _ in range(rng.randint(1, 3))]
            if all(a == 0 for a in arities):
                arities[0] = 2
            sig = Signature(tuple((f"op{i}", a) for i, a in enumerate(arities)))
            size = rng.randint(1, 4)
            A = FiniteAlgebra(sig, size, {f"op{i}": nprng.integers(0, size, (size,) * a) for i, a in enumerate(arities)})
            gens = ["x", "y", "z"]
            assign = {g: rng.randrange(size) for g in gens}
            ts = [random_term(rng, sig, gens, 6) for _ in range(3)]
            ev = Evaluation(A, assign)
            assert is_homomorphic_on(ts, ev)
            for t in ts:
                assert evaluate(t, ev) == naive_eval(t, A.tables, assign)


# ---------------------------------------------------------------- 2


@criterion(2, "congruence generation and quotient kernels")
def test_c2_congruences():
    rng = random.Random(2)
    with Clock(30):
        for A in binary_algebras():
            cons = brute_congruences(A)
            n = A.size
            seeds = [[]] + [[(rng.randrange(n), rng.randrange(n)) for _ in range(k)] for k in (1, 1, 2, 3)]
            for pairs in seeds:
                containing = [c for c in cons if all(c[a] == c[b] for a, b in pairs)]
                least = [c for c in containing if all(sum(1 for x in range(n) for y in range(n) if c[x] == c[y]) <= sum(1 for x in range(n) for y in range(n) if d[x] == d[y]) for d in containing)]
                assert len(least) == 1
                want = {(x, y) for x in range(n) for y in range(n) if least[0][x] == least[0][y]}
                got = generate_congruence(A, pairs)
                assert got.pairs() == want
            for c in cons:
                theta = CongruenceRelation.from_blocks(n, [[x for x in range(n) if c[x] == v] for v in set(c.values())])
                _, h = quotient(A, theta)
                assert kernel(h).pairs() == theta.pairs()


# ---------------------------------------------------------------- 3


@criterion(3, "forced identities shadow")
def test_c3_forced_identities():
    f = lambda a, b: App("f", (a, b))  # noqa: E731
    x, y = gen("v1"), gen("v2")
    idents = [
        Identity(f(x, y), f(y, x)),
        Identity(f(x, x), x),
        Identity(f(f(x, y), y), f(x, y)),
        Identity(f(x, f(x, y)), f(x, y)),
        Identity(f(x, y), x),
    ]
    count = 0
    with Clock(30):
        for A in binary_algebras():
            for c in brute_congruences(A):
                n = A.size
                theta = CongruenceRelation.from_blocks(n, [[v for v in range(n) if c[v] == k] for k in set(c.values())])
                Q, _ = quotient(A, theta)
                for ident in idents:
                    count += 1
                    shadow = all(theta.related(a, b) for a, b in substitution_pairs(A, ident))
                    assert satisfies(Q, ident).holds == shadow
    assert count >= 50


# ---------------------------------------------------------------- 4


@criterion(4, "lattice order/operations round trip")
def test_c4_round_trip():
    with Clock(60):
        natural = enumerate_lattices(5)
        assert len(natural) == 12
        lats = {L.relabel(perm).order: L.relabel(perm) for L in natural for perm in itertools.permutations(range(L.size))}
        for L in lats.values():
            A = order_to_ops(L)
            for c in LAT_CLAUSES:
                for ident in c.instances(()):
                    assert satisfies(A, ident).holds
            back = ops_to_order(A, L.names)
            assert back.order == L.order
            for a, b in itertools.product(range(L.size), repeat=2):
                assert L.leq(a, b) == (int(A.tables["wedge"][a, b]) == a)
            assert ops_to_order(order_to_ops(back), L.names) == back
        # up to isomorphism: 1, 1, 1, 2, 5 lattices of sizes 1..5
        assert len(enumerate_lattices(5, up_to_iso=True)) == 10


# ---------------------------------------------------------------- 5


@criterion(5, "2x2 entrywise matrices are in VLA1P and not an f-algebra")
def test_c5_matrices():
    M2 = matrices(2)
    with Clock(10):
        rep = check_theory(M2, theory("VLA1P"), samples=1000, seed=0)
        assert len(rep.verdicts) == 21
        assert rep.ok, [v.line() for v in rep.failures()]
        assert all(v.checked == 1000 for v in rep.verdicts)
        f = f_algebra_probe(M2)
    assert not f.holds
    assert (f.witness["x"], f.witness["y"]) == ("E11", "E12")
    # independent check: E11 ⊓ E12 = 0, E12 ≥ 0, but E11·E12 = E12
    E11 = np.array([[1, 0], [0, 0]])
    E12 = np.array([[0, 1], [0, 0]])
    assert (np.minimum(E11, E12) == 0).all()
    assert (np.minimum(E11 @ E12, E12) != 0).any()


# ---------------------------------------------------------------- 6


def _antichain_oracle(gens):
    subsets = [frozenset(s) for r in range(1, len(gens) + 1) for s in itertools.combinations(gens, r)]
    out = set()
    for r in range(1, len(subsets) + 1):
        for fam in itertools.combinations(subsets, r):
            if all(not (a < b or b < a) for a, b in itertools.combinations(fam, 2)):
                out.add(frozenset(fam))
    return out


@criterion(6, "free distributive lattice on 3 generators has 18 elements")
def test_c6_dlat_count():
    gens = ["x", "y", "z"]
    with Clock(10):
        # normal forms are compositional, so the classes of height <= h+1 are the
        # classes of height <= h together with their pairwise joins and meets
        level = {dlat_generator(g) for g in gens}
        sizes = [len(level)]
        for _ in range(3):
            cur = list(level)
            level = level | {op(a, b) for a in cur for b in cur for op in (dlat_join, dlat_meet)}
            sizes.append(len(level))
        assert sizes[-1] == 18
        # direct enumeration at height <= 2 agrees with the compositional count
        direct = {dlat_normal_form(t) for t in terms_up_to_height(LAT_SIG, gens, 2)}
        assert len(direct) == sizes[2]
        oracle = _antichain_oracle(gens)
        assert len(oracle) == 18
        assert {nf.clauses for nf in level} == oracle
        assert {nf.clauses for nf in all_dlat_normal_forms(gens)} == oracle


# ---------------------------------------------------------------- 7


def _lattice_eval(t, L, assign):
    if isinstance(t, Gen):
        return assign[t.name]
    a, b = (_lattice_eval(s, L, assign) for s in t.args)
    return L.meet(a, b) if t.op == "wedge" else L.join(a, b)


@criterion(7, "Whitman decision is sound")
def test_c7_whitman():
    rng = random.Random(7)
    gens = ["x", "y", "z"]
    lats = enumerate_lattices(5, up_to_iso=True)
    with Clock(60):
        pairs = []
        for i in range(500):
            s = random_term(rng, LAT_SIG, gens, 3)
            if i % 2:
                # an equal partner built by absorption or commutation
                other = random_term(rng, LAT_SIG, gens, 1)
                s2 = rng.choice([wedge(s, vee(s, other)), vee(s, wedge(other, s)), vee(s, s)])
                t = s2 if rng.random() < 0.5 else App(s.op, s.args[::-1]) if isinstance(s, App) else s
            else:
                t = random_term(rng, LAT_SIG, gens, 3)
            pairs.append((s, t))
        equal = 0
        for s, t in pairs:
            if not free_lattice_eq(s, t):
                continue
            equal += 1
            for L in lats:
                for vals in itertools.product(range(L.size), repeat=3):
                    assign = dict(zip(gens, vals))
                    assert _lattice_eval(s, L, assign) == _lattice_eval(t, L, assign)
        assert equal >= 200
    lhs = parse_term("(wedge x (vee y z))", LAT_SIG)
    rhs = parse_term("(vee (wedge x y) (wedge x z))", LAT_SIG)
    assert not free_lattice_eq(lhs, rhs)
    M3 = m3()
    a, b, c = (M3.index(n) for n in ("a", "b", "c"))
    assign = {"x": a, "y": b, "z": c}
    assert M3.names[_lattice_eval(lhs, M3, assign)] == "a"
    assert M3.names[_lattice_eval(rhs, M3, assign)] == "bot"


# ---------------------------------------------------------------- 8


def random_form(rng, n, max_pieces=8):
    pieces = rng.randint(1, max_pieces)
    sizes = []
    while pieces > 0:
        k = rng.randint(1, pieces)
        sizes.append(k)
        pieces -= k
    lin = lambda: LinForm(tuple(rng.randint(-3, 3) for _ in range(n)))  # noqa: E731
    return MinMaxForm(n, tuple(tuple(lin() for _ in range(k)) for k in sizes))


def equal_partner(rng, a, n):
    """A form equal to ``a`` as a function, built another way, still within 8 pieces."""
    rewrites = [
        lambda c: a.meet(a.join(c)),
        lambda c: (a + c) - c,
        lambda c: a.pos() - (-a).pos(),
        lambda c: a.join(c) + a.meet(c) - c,
        lambda c: a.join(a.meet(c)),
    ]
    for _ in range(10):
        try:
            b = rng.choice(rewrites)(random_form(rng, n, 2))
        except BudgetExceeded:
            continue
        if b.pieces <= 8:
            return b
    clauses = [tuple(rng.sample(c, len(c))) for c in a.clauses]
    rng.shuffle(clauses)
    return MinMaxForm(n, tuple(clauses))


def rational_points(rng, count, n):
    """Random rational points with their denominators cleared.

    Min-max forms are positively homogeneous, so a(p) and b(p) compare the
    same way as a(Dp) and b(Dp) for the integer point Dp, D > 0."""
    out = np.empty((count, n), dtype=np.int64)
    for i in range(count):
        p = [Fraction(rng.randint(-50, 50), rng.randint(1, 12)) for _ in range(n)]
        d = lcm(*(v.denominator for v in p))
        out[i] = [int(v * d) for v in p]
    return out


@criterion(8, "FVL decision agrees with dense sampling")
def test_c8_fvl_vs_sampling():
    rng = random.Random(8)
    with Clock(120):
        proved = differ = 0
        for i in range(300):
            n = rng.randint(1, 3)
            a = random_form(rng, n)
            b = equal_partner(rng, a, n) if i % 2 else random_form(rng, n)
            assert a.pieces <= 8 and b.pieces <= 8
            verdict = fvl_eq(a, b)
            pts = rational_points(rng, 10_000, n)
            va, vb = integer_values([a, b], pts)
            sampled_diff = bool((va != vb).any())
            if verdict:
                proved += 1
                assert not sampled_diff
            else:
                w = fvl_difference(a, b)
                assert w is not None and a(w) != b(w)
            if sampled_diff:
                differ += 1
                assert not verdict
        assert proved >= 100 and differ >= 100
        # VL identities on random forms
        vl = theory("VL")
        for _ in range(20):
            n = rng.randint(1, 3)
            W = FVLStructure(n)
            for ident in vl.identities():
                assign = {v: random_form(rng, n, 4) for v in ident.variables}
                ev = Evaluation(W, assign)
                assert fvl_eq(evaluate(ident.lhs, ev), evaluate(ident.rhs, ev)), str(ident)


# ---------------------------------------------------------------- 9


@criterion(9, "seminorm pipeline")
def test_c9_seminorm():
    rng = random.Random(9)
    with Clock(5):
        n = 3
        s = MinMaxForm.variable(0, n)
        cube = [(1, 0, 0), (0, 1, 0), (Fraction(1, 2), -1, 1), (-1, -1, -1), (0, 0, 0)]
        est = rho_lower_bound(s, cube)
        assert est.value == 1
        assert est.best == (1, 0, 0)
        sigma = PointSeminorm([(1, 0, 0), (Fraction(-1, 3), 1, Fraction(1, 2))])
        for _ in range(100):
            a, b = random_form(rng, n, 4), random_form(rng, n, 4)
            q = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            assert sigma.axiom_failures(a, b, q) == []
        x1, x2 = MinMaxForm.variable(0, 2), MinMaxForm.variable(1, 2)
        kq = kernel_quotient([x1, x2, x2.scale(2), x1 + x2], PointSeminorm([(1, 0)]))
        assert [1, 2] in kq.classes
        assert not any(0 in c and 1 in c for c in kq.classes)
        assert kq.axiom_failures == []


# ---------------------------------------------------------------- 10


@criterion(10, "non-distributive lattices collapse, Boolean ones embed")
def test_c10_collapse():
    with Clock(60):
        h = make_free("Lat", "VL", lattice=m3())
        res = prove_equal(h, h.j("a"), h.j("bot"), Budget(rounds=3))
        assert res.status == PROVED
        assert res.stats is None or res.stats.rounds <= 3
        B = boolean(2)
        hb = make_free("Lat", "VL", lattice=B)
        for x, y in itertools.combinations(B.names, 2):
            r = prove_equal(hb, hb.j(x), hb.j(y), Budget(rounds=3))
            assert r.status == SEPARATED, (x, y, r.lines())
            assert "Birkhoff" in r.witness.structure or "characteristic" in r.witness.structure
            assert r.witness.values[0] != r.witness.values[1]


# ---------------------------------------------------------------- 11


@criterion(11, "free VLA1 on two generators is not commutative")
def test_c11_noncommutative():
    with Clock(10):
        h = make_free("Set", "VLA1", generators=["a", "b"])
        ab = App("dot", (gen("a"), gen("b")))
        ba = App("dot", (gen("b"), gen("a")))
        res = prove_equal(h, ab, ba)
    assert res.status == SEPARATED
    m = res.witness.matrix
    assert m is not None
    A = np.array(m.entries["a"], dtype=object)
    B = np.array(m.entries["b"], dtype=object)
    assert (A.dot(B) != B.dot(A)).any()
    assert res.witness.relations_checked == len(h.relations)


# ---------------------------------------------------------------- 12


def _suite():
    sig = theory("VL").sig
    srcs = [
        ("(vee a b)", "(plus (plus a b) (neg (wedge a b)))"),
        ("(vee a b)", "a"),
        ("(wedge a b)", "(neg (vee (neg a) (neg b)))"),
        ("(plus a b)", "(plus b a)"),
        ("(vee a (wedge a b))", "a"),
        ("(vee a zero)", "(plus a (vee (neg a) zero))"),
        ("(scale 2 a)", "(plus a a)"),
        ("(scale 1/2 (plus a a))", "a"),
        ("(vee a b)", "(vee b a)"),
        ("(wedge a (vee b c))", "(vee (wedge a b) (wedge a c))"),
        ("(plus (vee a b) c)", "(vee (plus a c) (plus b c))"),
        ("(vee a (neg a))", "(vee (vee a zero) (neg (wedge a zero)))"),
        ("(vee a (neg a))", "a"),
        ("(wedge a b)", "(wedge a c)"),
        ("(plus a (neg a))", "zero"),
        ("(scale -1 a)", "(neg a)"),
        ("(vee (scale 2 a) zero)", "(scale 2 (vee a zero))"),
        ("(vee (scale -2 a) zero)", "(scale -2 (vee a zero))"),
        ("(vee a (vee b c))", "(vee (vee a b) c)"),
        ("(wedge a zero)", "(neg (vee (neg a) zero))"),
    ]
    pairs = [(parse_term(l, sig), parse_term(r, sig)) for l, r in srcs]
    rng = random.Random(12)
    ops = [("vee", 2), ("wedge", 2), ("plus", 2), ("neg", 1)]
    while len(pairs) < 50:
        def rt(h):
            if h == 0 or rng.random() < 0.3:
                return rng.choice([gen("a"), gen("b"), gen("c"), App("zero")])
            op, k = rng.choice(ops)
            return App(op, tuple(rt(h - 1) for _ in range(k)))
        s = rt(3)
        t = rng.choice([rt(3), App("vee", (s, App("wedge", (s, rt(1))))), App("plus", (s, App("zero")))])
        pairs.append((s, t))
    return pairs


@criterion(12, "composite and direct free objects agree")
def test_c12_composition():
    gens = ["a", "b", "c"]
    direct = make_free("Set", "VLA1", generators=gens)
    comp = compose(make_free("Set", "VL", generators=gens), "VLA1")
    with Clock(60):
        for s, t in _suite():
            r1 = prove_equal(direct, s, t)
            r2 = prove_equal(comp, s, t)
            assert r1.status in (PROVED, SEPARATED)
            assert r1.status == r2.status, (str(s), str(t), r1.lines(), r2.lines())


if __name__ == "__main__":
    import sys

    failed = 0
    tests = [(name, fn) for name, fn in sorted(globals().items()) if name.startswith("test_c")]
    tests.sort(key=lambda kv: kv[1].pytestmark[0].args[0])
    for name, fn in tests:
        n, title = fn.pytestmark[0].args
        t0 = time.perf_counter()
        try:
            fn()
            ok, why = True, ""
        except Exception as e:  # noqa: BLE001
            ok, why = False, f"  ({type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''})"
        failed += not ok
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}  [{time.perf_counter() - t0:.1f}s]{why}")
    sys.exit(1 if failed else 0)
