"""The term algebra T(S), its evaluation homomorphisms, and bounded saturation.

The congruence generated by all substitution instances of a set of identities
is infinite, so everything here works on finite truncations: a finite universe
of terms plus finitely many instance pairs.  ``saturate`` computes the least
congruence on such a universe; ``EGraph`` is the same closure with on-the-fly
rule application, used by the free-object prover.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import BudgetExceeded, SignatureError, UnboundGenerator
from .terms import App, Gen, GeneratorSet, Identity, Signature, Term, subterms, substitute


class TermAlgebra:
    """T(S) as an evaluator: operations build terms."""

    def __init__(self, sig: Signature, gens: GeneratorSet | Sequence[str]):
        if not isinstance(gens, GeneratorSet):
            gens = GeneratorSet(tuple(gens))
        self.sig = sig
        self.gens = gens.check_disjoint(sig)

    def constant(self, name: str) -> Term:
        if name not in self.sig or self.sig.arity(name) != 0:
            raise SignatureError(f"{name!r} is not a constant")
        return App(name)

    def operate(self, name: str, args: Sequence[Term], scalar=None) -> Term:
        if self.sig.arity(name) != len(args):
            raise SignatureError(f"{name} expects {self.sig.arity(name)} arguments")
        return App(name, tuple(args), scalar)

    def generators(self) -> list[Term]:
        return [Gen(g) for g in self.gens]

    def terms_up_to_height(self, bound: int, scalars: Iterable = (), cap: int | None = None) -> list[Term]:
        return terms_up_to_height(self.sig, self.gens, bound, scalars, cap)


def terms_up_to_height(
    sig: Signature,
    gens: Iterable[str],
    bound: int,
    scalars: Iterable = (),
    cap: int | None = None,
) -> list[Term]:
    """All terms of height <= bound, listed by height; scalar families range over ``scalars``."""
    scalars = [Fraction(q) for q in scalars]
    ops: list[tuple[str, int, Fraction | None]] = [(n, a, None) for n, a in sig.operations]
    ops += [(n, 1, q) for n in sorted(sig.scalar_ops) for q in scalars]
    level = [Gen(g) for g in gens] + [App(c) for c in sig.constants]
    out = list(level)
    for _ in range(bound):
        fresh = []
        seen_old = list(out)
        newest = set(level)
        for name, arity, q in ops:
            for args in itertools.product(seen_old, repeat=arity):
                if not any(a in newest for a in args):
                    continue
                fresh.append(App(name, args, q))
                if cap is not None and len(out) + len(fresh) > cap:
                    raise BudgetExceeded(f"more than {cap} terms of height <= {bound}")
        if not fresh:
            break
        out.extend(fresh)
        level = fresh
    return out


@dataclass
class Evaluation:
    """A target structure plus an assignment of its elements to generators."""

    target: Any
    assignment: Mapping[str, Any]


def evaluate(t: Term, ev: Evaluation, memo: dict | None = None):
    """The unique homomorphic extension of the assignment, applied to ``t``."""
    memo = {} if memo is None else memo
    target, assignment = ev.target, ev.assignment
    for s in subterms(t):
        if s in memo:
            continue
        if isinstance(s, Gen):
            try:
                memo[s] = assignment[s.name]
            except KeyError:
                raise UnboundGenerator(s.name) from None
        elif not s.args:
            memo[s] = target.constant(s.op)
        else:
            memo[s] = target.operate(s.op, [memo[a] for a in s.args], s.scalar)
    return memo[t]


def is_homomorphic_on(samples: Iterable[Term], ev: Evaluation) -> bool:
    memo: dict = {}
    for t in samples:
        evaluate(t, ev, memo)
        for s in subterms(t):
            if isinstance(s, Gen):
                continue
            if not s.args:
                expected = ev.target.constant(s.op)
            else:
                expected = ev.target.operate(s.op, [memo[a] for a in s.args], s.scalar)
            if memo[s] != expected:
                return False
    return True


def instance_pairs(
    identities: Sequence[Identity],
    gens: Iterable[str],
    height_bound: int,
    sig: Signature,
    scalars: Iterable = (),
    cap: int = 100_000,
) -> list[tuple[Term, Term]]:
    """Substitution instances of each identity by terms of height <= height_bound."""
    if height_bound < 0:
        raise ValueError("height_bound must be non-negative")
    universe = terms_up_to_height(sig, gens, height_bound, scalars, cap=cap)
    total = sum(len(universe) ** len(ident.variables) for ident in identities)
    if total > cap:
        raise BudgetExceeded(f"{total} instance pairs exceed the cap of {cap}")
    pairs = []
    for ident in identities:
        names = ident.variables
        for choice in itertools.product(universe, repeat=len(names)):
            binding = dict(zip(names, choice))
            pairs.append((substitute(ident.lhs, binding), substitute(ident.rhs, binding)))
    return pairs


# ---------------------------------------------------------------- e-graph

_GEN = "$gen"


def _node_of(t: Term, child_ids: tuple) -> tuple:
    if isinstance(t, Gen):
        return (_GEN, t.name, ())
    return (t.op, t.scalar, child_ids)


class EGraph:
    """Hash-consed term DAG with a union-find over classes (congruence closure).

    Rebuilding is done wholesale after each batch of unions, which keeps the
    invariant maintenance trivial at the sizes this engine targets.
    """

    def __init__(self):
        self.parent: list[int] = []
        self.hashcons: dict[tuple, int] = {}
        self.term_ids: dict[Term, int] = {}
        self._classes: dict[int, list[tuple]] | None = None
        self._by_op: dict[tuple, list[tuple[tuple, int]]] | None = None
        self.unions = 0

    # union-find
    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.unions += 1
        self._classes = None
        self._by_op = None
        return True

    def canon(self, node: tuple) -> tuple:
        op, param, kids = node
        if not kids:
            return node
        return (op, param, tuple(self.find(k) for k in kids))

    def add_node(self, node: tuple) -> int:
        node = self.canon(node)
        cid = self.hashcons.get(node)
        if cid is not None:
            return self.find(cid)
        cid = len(self.parent)
        self.parent.append(cid)
        self.hashcons[node] = cid
        self._classes = None
        self._by_op = None
        return cid

    def add_term(self, t: Term) -> int:
        cached = self.term_ids.get(t)
        if cached is not None:
            return self.find(cached)
        for s in subterms(t):
            if s in self.term_ids:
                continue
            kids = () if isinstance(s, Gen) else tuple(self.find(self.term_ids[a]) for a in s.args)
            self.term_ids[s] = self.add_node(_node_of(s, kids))
        return self.find(self.term_ids[t])

    def rebuild(self) -> None:
        """Restore the congruence invariant: equal canonical nodes share a class."""
        while True:
            merged = False
            fresh: dict[tuple, int] = {}
            for node, cid in self.hashcons.items():
                cn = self.canon(node)
                r = self.find(cid)
                other = fresh.get(cn)
                if other is None:
                    fresh[cn] = r
                elif self.find(other) != r:
                    self.union(other, r)
                    merged = True
            self.hashcons = fresh
            if not merged:
                break
        self._classes = None
        self._by_op = None

    @property
    def node_count(self) -> int:
        return len(self.hashcons)

    def classes(self) -> dict[int, list[tuple]]:
        if self._classes is None:
            out: dict[int, list[tuple]] = {}
            for node, cid in self.hashcons.items():
                out.setdefault(self.find(cid), []).append(node)
            self._classes = out
        return self._classes

    def _index(self) -> dict[tuple, list[tuple[tuple, int]]]:
        if self._by_op is None:
            idx: dict[tuple, list] = {}
            for node, cid in self.hashcons.items():
                idx.setdefault((node[0], node[1], len(node[2])), []).append((node, self.find(cid)))
            self._by_op = idx
        return self._by_op

    def equiv(self, a: Term, b: Term) -> bool:
        return self.add_term(a) == self.add_term(b)

    def class_of(self, t: Term) -> int:
        return self.add_term(t)

    # pattern matching; Gen leaves of a pattern are variables
    def _match(self, pat: Term, cid: int, subst: dict) -> Iterable[dict]:
        if isinstance(pat, Gen):
            bound = subst.get(pat.name)
            if bound is None:
                new = dict(subst)
                new[pat.name] = cid
                yield new
            elif bound == cid:
                yield subst
            return
        key_op, key_param = pat.op, pat.scalar
        arity = len(pat.args)
        for node in self.classes().get(cid, ()):
            if node[0] == key_op and node[1] == key_param and len(node[2]) == arity:
                yield from self._match_args(pat.args, node[2], subst)

    def _match_args(self, pats, kids, subst):
        if not pats:
            yield subst
            return
        for s in self._match(pats[0], self.find(kids[0]), subst):
            yield from self._match_args(pats[1:], kids[1:], s)

    def ematch(self, pat: Term) -> list[tuple[int, dict]]:
        if isinstance(pat, Gen):
            raise ValueError("a bare variable is not a usable pattern")
        out = []
        seen = set()
        for node, cid in self._index().get((pat.op, pat.scalar, len(pat.args)), ()):
            for s in self._match_args(pat.args, node[2], {}):
                key = (cid, tuple(sorted(s.items())))
                if key not in seen:
                    seen.add(key)
                    out.append((cid, s))
        return out

    def instantiate(self, pat: Term, subst: Mapping[str, int]) -> int:
        memo: dict[Term, int] = {}
        for s in subterms(pat):
            if s in memo:
                continue
            if isinstance(s, Gen):
                memo[s] = subst[s.name]
            else:
                memo[s] = self.add_node((s.op, s.scalar, tuple(memo[a] for a in s.args)))
        return memo[pat]


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    label: str = ""


def rules_from_identities(identities: Iterable[Identity]) -> list[Rule]:
    """Usable orientations: the matched side is not a bare variable and binds every variable."""
    rules = []
    for ident in identities:
        lv = {s.name for s in subterms(ident.lhs) if isinstance(s, Gen)}
        rv = {s.name for s in subterms(ident.rhs) if isinstance(s, Gen)}
        if isinstance(ident.lhs, App) and rv <= lv:
            rules.append(Rule(ident.lhs, ident.rhs, ident.label))
        if isinstance(ident.rhs, App) and lv <= rv and ident.lhs != ident.rhs:
            rules.append(Rule(ident.rhs, ident.lhs, ident.label))
    return rules


@dataclass
class SaturationStats:
    rounds: int = 0
    nodes: int = 0
    classes: int = 0
    unions: int = 0
    stopped: str = ""


def run_saturation(
    eg: EGraph,
    rules: Sequence[Rule],
    rounds: int,
    max_nodes: int = 20_000,
    goal: tuple[Term, Term] | None = None,
    hooks: Sequence[Callable[[EGraph], None]] = (),
) -> SaturationStats:
    """Apply ``rules`` for up to ``rounds`` rounds; stop early once ``goal`` is merged."""
    stats = SaturationStats()
    goal_ids = None
    if goal is not None:
        goal_ids = (eg.add_term(goal[0]), eg.add_term(goal[1]))

    def reached():
        return goal_ids is not None and eg.find(goal_ids[0]) == eg.find(goal_ids[1])

    for hook in hooks:
        hook(eg)
    eg.rebuild()
    stats.stopped = "fixpoint"
    for r in range(rounds):
        if reached():
            stats.stopped = "goal"
            break
        before = (eg.node_count, eg.unions)
        matches = [(rule, cid, s) for rule in rules for cid, s in eg.ematch(rule.lhs)]
        for rule, cid, s in matches:
            eg.union(cid, eg.instantiate(rule.rhs, s))
            if eg.node_count > max_nodes:
                break
        for hook in hooks:
            hook(eg)
        eg.rebuild()
        stats.rounds = r + 1
        if eg.node_count > max_nodes:
            stats.stopped = "node-cap"
            break
        if (eg.node_count, eg.unions) == before:
            stats.stopped = "fixpoint"
            break
    else:
        stats.stopped = "rounds"
    if reached():
        stats.stopped = "goal"
    stats.nodes = eg.node_count
    stats.classes = len(eg.classes())
    stats.unions = eg.unions
    return stats


# ---------------------------------------------------------------- saturate


@dataclass
class Partition:
    """A partition of a finite list of terms."""

    blocks: list[list[Term]]
    index: dict[Term, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {t: i for i, b in enumerate(self.blocks) for t in b}

    def same(self, a: Term, b: Term) -> bool:
        return self.index[a] == self.index[b]

    def block_of(self, t: Term) -> list[Term]:
        return self.blocks[self.index[t]]

    def __len__(self):
        return len(self.blocks)

    def is_discrete(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)


def subterm_closure(terms: Iterable[Term]) -> list[Term]:
    seen: dict[Term, None] = {}
    for t in terms:
        for s in subterms(t):
            seen.setdefault(s, None)
    return list(seen)


def saturate(pairs: Iterable[tuple[Term, Term]], universe: Sequence[Term]) -> Partition:
    """Least congruence on the (subterm-closed) universe containing the pairs inside it."""
    universe = list(dict.fromkeys(universe))
    members = set(universe)
    for t in universe:
        if isinstance(t, App):
            missing = [a for a in t.args if a not in members]
            if missing:
                raise ValueError(f"universe is not closed under subterms: {missing[0]} missing")
    eg = EGraph()
    for t in universe:
        eg.add_term(t)
    for a, b in pairs:
        if a in members and b in members:
            eg.union(eg.term_ids[a], eg.term_ids[b])
    eg.rebuild()
    groups: dict[int, list[Term]] = {}
    for t in universe:
        groups.setdefault(eg.find(eg.term_ids[t]), []).append(t)
    return Partition(list(groups.values()))
