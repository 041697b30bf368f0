"""``latfree`` command line.

Exit status: 0 definite positive, 1 definite negative, 2 inconclusive,
64 usage error, 65 malformed input, 66 missing file, 75 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .errors import BudgetExceeded, LatfreeError, NotDistributive
from .finite import FiniteAlgebra, generate_congruence, quotient, satisfies_quasi
from .fvl import (
    PointSeminorm,
    fvl_counterexample,
    fvl_difference,
    from_term,
    kernel_quotient,
    parse_points,
    rho_lower_bound,
)
from .lattice import (
    birkhoff_embed,
    collapse_witness,
    dlat_normal_form,
    free_lattice_eq,
    free_lattice_leq,
)
from .structures import STRUCTURE_PRESETS, StructureVLA, f_algebra_probe, structure_from_text
from .termalg import instance_pairs, saturate, subterm_closure, terms_up_to_height
from .terms import Signature, parse_identity, parse_term, to_sexpr
from .theories import (
    DEFAULT_PROBE,
    LAT_SIG,
    LATTICE_PRESETS,
    VL_SIG,
    check_theory,
    load_poset,
    load_theory,
    order_to_ops,
    theory,
)
from .vla import (
    STRUCTURE_HANDLE_PRESETS,
    UNKNOWN,
    Budget,
    PROVED,
    SEPARATED,
    make_free,
    preset_handle,
    prove_equal,
)

EX_OK, EX_NEG, EX_UNKNOWN = 0, 1, 2
EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_TEMPFAIL = 64, 65, 66, 75


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Report:
    """Text lines plus the same content as a JSON object."""

    def __init__(self, status: int, lines: list[str], data: dict):
        self.status = status
        self.lines = lines
        self.data = data

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.data, indent=2, sort_keys=True, default=str)
        return "\n".join(self.lines)


def _read(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    return p.read_text()


def _scalars(text: str | None):
    if not text:
        return DEFAULT_PROBE
    return tuple(Fraction(s) for s in text.replace(",", " ").split())


def _load_model(args):
    """A finite algebra or a rational structure, from --algebra FILE or --preset NAME."""
    if getattr(args, "algebra", None):
        text = _read(args.algebra)
        head = next((ln.split()[0] for ln in text.splitlines() if ln.split() and not ln.startswith("#")), "")
        if head == "dim":
            return structure_from_text(text, Path(args.algebra).stem)
        return FiniteAlgebra.from_text(text, Path(args.algebra).stem)
    preset = getattr(args, "preset", None)
    if preset in STRUCTURE_PRESETS:
        return STRUCTURE_PRESETS[preset]()
    if preset in STRUCTURE_HANDLE_PRESETS:
        return STRUCTURE_HANDLE_PRESETS[preset]()
    if preset in LATTICE_PRESETS:
        return order_to_ops(LATTICE_PRESETS[preset]())
    raise UsageError("give --algebra FILE or --preset NAME")


# ---------------------------------------------------------------- subcommands


def cmd_check(args) -> Report:
    A = _load_model(args)
    if args.f_algebra:
        if not isinstance(A, StructureVLA):
            raise UsageError("--f-algebra needs a rational structure")
        rep = f_algebra_probe(A, samples=args.samples, seed=args.seed)
        return Report(EX_OK if rep.holds else EX_NEG, [f"f-algebra implication: {rep.line}"], {
            "holds": rep.holds, "mode": "sampled", "checked": rep.checked, "witness": rep.witness,
        })
    if args.identities:
        th = load_theory(_read(args.identities), A.sig)
    else:
        th = theory(args.theory)
    rep = check_theory(A, th, _scalars(args.scalars), samples=args.samples, seed=args.seed, budget=args.budget)
    lines = [f"theory {th.name} on {getattr(A, 'name', '') or 'algebra'}"] + rep.lines()
    lines.append("ALL PASS" if rep.ok else f"{len(rep.failures())} FAILED")
    data = {
        "theory": th.name,
        "ok": rep.ok,
        "verdicts": [
            {"label": v.label, "holds": v.holds, "mode": v.mode, "probe_set": v.probe, "checked": v.checked,
             "witness": v.witness}
            for v in rep.verdicts
        ],
    }
    return Report(EX_OK if rep.ok else EX_NEG, lines, data)


def cmd_sat(args) -> Report:
    A = _load_model(args)
    sig = A.sig
    concl = [parse_identity(s, sig) for s in args.identity]
    prem = [parse_identity(s, sig) for s in args.premise]
    if isinstance(A, FiniteAlgebra):
        v = satisfies_quasi(A, prem, concl, budget=args.budget, samples=args.samples, seed=args.seed)
    else:
        raise UsageError("sat works on finite algebras; use check for rational structures")
    line = f"{'HOLDS' if v.holds else 'FAILS'} ({v.mode}, {v.checked} assignments)"
    if v.counterexample:
        line += " counterexample: " + ", ".join(f"{k}={x}" for k, x in v.counterexample.items())
    return Report(EX_OK if v.holds else EX_NEG, [line], {
        "holds": v.holds, "mode": v.mode, "checked": v.checked, "counterexample": v.counterexample,
    })


def _lattice_arg(args):
    if args.preset:
        if args.preset not in LATTICE_PRESETS:
            raise UsageError(f"unknown lattice preset {args.preset!r}")
        return LATTICE_PRESETS[args.preset]()
    if not args.file:
        raise UsageError("give a poset file or --preset")
    return load_poset(_read(args.file))


def cmd_lat(args) -> Report:
    if args.action in ("eq", "leq"):
        if len(args.terms) != 2:
            raise UsageError(f"lat {args.action} needs two terms")
        s, t = (parse_term(x, LAT_SIG) for x in args.terms)
        ok = free_lattice_eq(s, t) if args.action == "eq" else free_lattice_leq(s, t)
        word = "=" if args.action == "eq" else "≤"
        return Report(EX_OK if ok else EX_NEG, [f"{'TRUE' if ok else 'FALSE'}: {to_sexpr(s)} {word} {to_sexpr(t)} in the free lattice"],
                      {"holds": ok, "relation": args.action})
    args.file = args.terms[0] if args.terms else None
    L = _lattice_arg(args)
    if args.action == "collapse":
        w = collapse_witness(L)
        if w is None:
            return Report(EX_NEG, ["distributive: j is injective, no collapse"], {"collapse": None})
        lines = w.lines() + [f"distributivity step certified in the free vector lattice: {w.certified}"]
        return Report(EX_OK, lines, {
            "collapse": [w.first, w.second], "triple": list(w.triple), "certified": w.certified,
            "steps": [{"term": to_sexpr(s.term), "reason": s.reason} for s in w.steps],
        })
    if args.action == "embed":
        try:
            emb = birkhoff_embed(L)
        except NotDistributive as e:
            return Report(EX_NEG, [f"not distributive; witness triple {e.witness}"], {"witness": list(e.witness)})
        irr = [L.names[i] for i in emb.irreducibles]
        lines = [f"join-irreducibles: {', '.join(irr)}"] + [f"{n} ↦ {v}" for n, v in emb.by_name().items()]
        return Report(EX_OK, lines, {"irreducibles": irr, "vectors": emb.by_name()})
    raise UsageError(f"unknown lat action {args.action!r}")


def cmd_dlat(args) -> Report:
    if args.action == "nf":
        if len(args.terms) != 1:
            raise UsageError("dlat nf needs one term")
        nf = dlat_normal_form(parse_term(args.terms[0], LAT_SIG))
        return Report(EX_OK, [str(nf)], {"normal_form": [list(c) for c in nf.sorted_clauses()]})
    if len(args.terms) != 2:
        raise UsageError("dlat eq needs two terms")
    a, b = (dlat_normal_form(parse_term(x, LAT_SIG)) for x in args.terms)
    ok = a == b
    return Report(EX_OK if ok else EX_NEG, [f"{'TRUE' if ok else 'FALSE'}: {a} vs {b}"], {"holds": ok})


def _gens_for(terms_text: list[str], n: int | None):
    import re

    idx = [int(m) for t in terms_text for m in re.findall(r"\bx(\d+)\b", t)]
    n = n or (max(idx) if idx else 1)
    return [f"x{i}" for i in range(1, n + 1)]


def _fvl_exprs(args) -> list[str]:
    if args.file:
        return [ln.strip() for ln in _read(args.file).splitlines() if ln.strip() and not ln.strip().startswith("#")]
    return list(args.expr)


def cmd_fvl(args) -> Report:
    exprs = _fvl_exprs(args)
    gens = _gens_for(exprs, args.n)
    forms = [from_term(parse_term(e, VL_SIG, gens), gens) for e in exprs]
    if args.action in ("eq", "leq"):
        if len(forms) != 2:
            raise UsageError(f"fvl {args.action} needs exactly two expressions")
        a, b = forms
        pt = fvl_difference(a, b) if args.action == "eq" else fvl_counterexample(a, b)
        ok = pt is None
        lines = [f"{'TRUE' if ok else 'FALSE'} (exact)"]
        data = {"holds": ok, "mode": "exact"}
        if pt is not None:
            shown = "(" + ", ".join(str(v) for v in pt) + ")"
            lines.append(f"witness point {shown}: {a(pt)} vs {b(pt)}")
            data["witness"] = [str(v) for v in pt]
        return Report(EX_OK if ok else EX_NEG, lines, data)
    if args.action == "rho":
        if not args.points:
            raise UsageError("fvl rho needs --points FILE")
        pts = parse_points(_read(args.points))
        est = rho_lower_bound(forms[0], pts)
        best = "(" + ", ".join(str(v) for v in est.best) + ")" if est.best else "-"
        return Report(EX_OK, [f"rho lower bound {est.value} attained at {best} ({len(pts)} points)"],
                      {"value": str(est.value), "best": [str(v) for v in est.best or ()]})
    if args.action == "kernel":
        if not args.points:
            raise UsageError("fvl kernel needs --points FILE")
        kq = kernel_quotient(forms, PointSeminorm(parse_points(_read(args.points))))
        lines = [f"class: {', '.join(exprs[i] for i in c)}" for c in kq.classes]
        lines.append(f"seminorm axiom failures: {len(kq.axiom_failures)}")
        return Report(EX_OK, lines, {"classes": kq.classes, "axiom_failures": kq.axiom_failures})
    raise UsageError(f"unknown fvl action {args.action!r}")


def _handle(args):
    base = args.base
    if args.lattice:
        return make_free("Lat", args.target, lattice=load_poset(_read(args.lattice)))
    if args.structure:
        return make_free(base, args.target, structure=structure_from_text(_read(args.structure), Path(args.structure).stem))
    gens = [g for g in (args.gens or "").split(",") if g]
    return preset_handle(base, args.target, args.preset, gens)


def cmd_free(args) -> Report:
    h = _handle(args)
    if args.action == "relations":
        lines = [h.describe()] + [str(r) for r in h.relations]
        return Report(EX_OK, lines, {"handle": h.describe(), "relations": [str(r) for r in h.relations]})
    if args.action != "prove" or len(args.terms) != 2:
        raise UsageError("usage: free ... prove T1 T2 | free ... relations")
    names = h.model.names()
    t1, t2 = (parse_term(x, h.sig, names) for x in args.terms)
    budget = Budget(rounds=args.rounds, max_nodes=args.max_nodes, trials=args.trials)
    res = prove_equal(h, t1, t2, budget, seed=args.seed)
    status = {PROVED: EX_OK, SEPARATED: EX_NEG, UNKNOWN: EX_UNKNOWN}[res.status]
    data = {"status": res.status, "method": res.method, "handle": h.describe()}
    if res.witness is not None:
        w = res.witness
        data["witness"] = {"model": w.structure, "assignment": {k: [str(x) for x in v] for k, v in w.assignment.items()},
                           "values": [[str(x) for x in v] for v in w.values]}
    if res.stats is not None:
        data["stats"] = vars(res.stats)
    return Report(status, [h.describe()] + res.lines(), data)


def cmd_quotient(args) -> Report:
    A = _load_model(args)
    if not isinstance(A, FiniteAlgebra):
        raise UsageError("quotient needs a finite algebra")
    pairs = []
    for p in args.pair:
        a, b = p.split(",")
        pairs.append((int(a), int(b)))
    theta = generate_congruence(A, pairs)
    Q, q = quotient(A, theta)
    lines = [f"blocks: {theta.blocks()}", f"quotient size {Q.size}", Q.to_text().rstrip()]
    return Report(EX_OK, lines, {"blocks": theta.blocks(), "size": Q.size, "map": q.map.tolist()})


def cmd_saturate(args) -> Report:
    if not args.signature and not args.theory:
        raise UsageError("saturate needs --signature FILE or --theory NAME")
    sig = Signature.from_text(_read(args.signature)) if args.signature else theory(args.theory).sig
    gens = [g for g in args.gens.split(",") if g]
    universe = terms_up_to_height(sig, gens, args.height, cap=args.cap)
    pairs = []
    for p in args.pair:
        ident = parse_identity(p, sig)
        pairs.append((ident.lhs, ident.rhs))
    if args.theory:
        # the truncated congruence of the theory: its identity instances up to the height bound
        pairs += instance_pairs(theory(args.theory).identities(), gens, args.height, sig, cap=args.cap or 100_000)
    extra = [t for pr in pairs for t in pr]
    query = parse_identity(args.query, sig) if args.query else None
    if query:
        extra += [query.lhs, query.rhs]
    universe = subterm_closure(list(universe) + extra)
    part = saturate(pairs, universe)
    lines = [f"universe {len(universe)} terms, {len(part)} classes"]
    data = {"universe": len(universe), "classes": len(part)}
    status = EX_OK
    if query:
        same = part.same(query.lhs, query.rhs)
        lines.append(f"{'RELATED' if same else 'NOT RELATED (within this finite universe)'}: {query}")
        data["related"] = same
        status = EX_OK if same else EX_UNKNOWN
    return Report(status, lines, data)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized step (default 0)")
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--jobs", type=int, default=1, help="worker count (default 1)")

    p = _Parser(prog="latfree", description="Free lattices, vector lattices and vector lattice algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="check a theory against an algebra or structure")
    c.add_argument("--theory", default="VLA1P")
    c.add_argument("--identities", help="custom identity file (one 'lhs = rhs' per line)")
    c.add_argument("--algebra")
    c.add_argument("--preset")
    c.add_argument("--scalars", help="probe scalars, e.g. '0 1 -1 1/2'")
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--budget", type=int, default=10**6)
    c.add_argument("--f-algebra", action="store_true", help="probe the f-algebra implication instead")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("sat", parents=[common], help="identity / quasi-identity satisfaction in a finite algebra")
    s.add_argument("--algebra")
    s.add_argument("--preset")
    s.add_argument("--identity", action="append", required=True)
    s.add_argument("--premise", action="append", default=[])
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--budget", type=int, default=10**6)
    s.set_defaults(func=cmd_sat)

    la = sub.add_parser("lat", parents=[common], help="free lattice decisions and lattice collapse")
    la.add_argument("action", choices=["eq", "leq", "collapse", "embed"])
    la.add_argument("terms", nargs="*")
    la.add_argument("--preset")
    la.set_defaults(func=cmd_lat)

    d = sub.add_parser("dlat", parents=[common], help="free distributive lattice normal forms")
    d.add_argument("action", choices=["nf", "eq"])
    d.add_argument("terms", nargs="+")
    d.set_defaults(func=cmd_dlat)

    f = sub.add_parser("fvl", parents=[common], help="free vector lattice function model")
    f.add_argument("action", choices=["eq", "leq", "rho", "kernel"])
    f.add_argument("file", nargs="?")
    f.add_argument("--expr", action="append", default=[])
    f.add_argument("--points")
    f.add_argument("--n", type=int)
    f.set_defaults(func=cmd_fvl)

    fr = sub.add_parser("free", parents=[common], help="free objects over sets, lattices and algebras")
    fr.add_argument("--base", required=True)
    fr.add_argument("--target", required=True)
    fr.add_argument("--preset")
    fr.add_argument("--gens", help="comma-separated generators for a Set base")
    fr.add_argument("--lattice", help="poset file for a Lat base")
    fr.add_argument("--structure", help="structure file for VS/VL/VLA/VLA1 bases")
    fr.add_argument("--rounds", type=int, default=3)
    fr.add_argument("--max-nodes", type=int, default=20_000)
    fr.add_argument("--trials", type=int, default=200)
    fr.add_argument("action", choices=["prove", "relations"])
    fr.add_argument("terms", nargs="*")
    fr.set_defaults(func=cmd_free)

    q = sub.add_parser("quotient", parents=[common], help="congruence generated by pairs, and the quotient")
    q.add_argument("--algebra")
    q.add_argument("--preset")
    q.add_argument("--pair", action="append", default=[], help="a,b (element indices)")
    q.set_defaults(func=cmd_quotient)

    sa = sub.add_parser("saturate", parents=[common], help="congruence closure on a finite term universe")
    sa.add_argument("--signature")
    sa.add_argument("--theory", help="add the identity instances of a built-in theory")
    sa.add_argument("--gens", default="x,y")
    sa.add_argument("--height", type=int, default=1)
    sa.add_argument("--cap", type=int, default=100_000)
    sa.add_argument("--pair", action="append", default=[])
    sa.add_argument("--query")
    sa.set_defaults(func=cmd_saturate)
    return p


def run(argv: list[str] | None = None) -> tuple[int, str]:
    """Execute one command; returns (exit status, text written to stdout)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        rep = args.func(args)
        return rep.status, rep.render(args.json)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EX_USAGE, ""
    except FileNotFoundError as e:
        print(f"latfree: file not found: {e}", file=sys.stderr)
        return EX_NOINPUT, ""
    except BudgetExceeded as e:
        print(f"latfree: budget exhausted: {e}", file=sys.stderr)
        return EX_TEMPFAIL, ""
    except (LatfreeError, ValueError, KeyError) as e:
        print(f"latfree: {e}", file=sys.stderr)
        return EX_DATAERR, ""


def main(argv: list[str] | None = None) -> int:
    status, out = run(argv)
    if out:
        print(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
