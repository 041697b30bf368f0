"""Concrete vector lattice algebras over ℚ used as models and separating witnesses.

Every structure here lives on ℚᵈ with the coordinatewise order, so meet and
join are coordinatewise min and max.  The product is bilinear, given by
structure constants c[i][j] = coordinates of eᵢ·eⱼ; it is positive exactly
when every constant is ≥ 0.  Elements are tuples of Fractions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import PreconditionError, SignatureError
from .fvl import MinMaxForm
from .theories import VL_SIG, VLA1_SIG, VLA_SIG, check_theory, theory

Vec = tuple  # tuple[Fraction, ...]

_SMALL = [Fraction(v) for v in (-3, -2, -1, 1, 2, 3)] + [Fraction(p, q) for p in (-2, -1, 1, 2) for q in (3, 7)]


def _sample_scalar(rng: random.Random) -> Fraction:
    r = rng.random()
    if r < 0.3:
        return Fraction(0)
    return rng.choice(_SMALL)


@dataclass
class StructureVLA:
    """ℚᵈ with coordinatewise order and a bilinear product given by structure constants.

    ``consts[i][j]`` is a sparse dict {k: c} with eᵢ·eⱼ = Σ c·e_k; ``unit`` is
    the identity element when the algebra is unital.  ``with_product=False``
    gives a plain vector lattice (no ⊙ in the signature).
    """

    dim: int
    consts: list
    unit: Vec | None = None
    name: str = ""
    with_product: bool = True
    labels: tuple = ()

    def __post_init__(self):
        if self.unit is not None:
            self.unit = tuple(Fraction(v) for v in self.unit)
        if self.with_product:
            self.sig = VLA1_SIG if self.unit is not None else VLA_SIG
        else:
            self.sig = VL_SIG
        self._terms = [
            [[(k, Fraction(c)) for k, c in self.consts[i][j].items() if c] for j in range(self.dim)]
            for i in range(self.dim)
        ]

    # element helpers

    def zero(self) -> Vec:
        return (Fraction(0),) * self.dim

    def basis(self, i: int) -> Vec:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def element(self, values: Sequence) -> Vec:
        v = tuple(Fraction(x) for x in values)
        if len(v) != self.dim:
            raise ValueError(f"element needs {self.dim} coordinates")
        return v

    def mul(self, a: Vec, b: Vec) -> Vec:
        out = [Fraction(0)] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self._terms[i]
            for j, bj in enumerate(b):
                if not bj:
                    continue
                for k, c in row[j]:
                    out[k] += c * ai * bj
        return tuple(out)

    def is_positive_product(self) -> bool:
        return all(c >= 0 for row in self._terms for cell in row for _, c in cell)

    # algebra interface

    def constant(self, name: str) -> Vec:
        if name == "zero":
            return self.zero()
        if name == "one" and self.unit is not None:
            return self.unit
        raise SignatureError(f"{self.name or 'structure'} has no constant {name!r}")

    def operate(self, name: str, args: Sequence[Vec], scalar=None) -> Vec:
        if name == "plus":
            return tuple(a + b for a, b in zip(*args))
        if name == "neg":
            return tuple(-a for a in args[0])
        if name == "scale":
            q = Fraction(scalar)
            return tuple(q * a for a in args[0])
        if name == "wedge":
            return tuple(min(a, b) for a, b in zip(*args))
        if name == "vee":
            return tuple(max(a, b) for a, b in zip(*args))
        if name == "dot" and self.with_product:
            return self.mul(*args)
        if name in ("zero", "one"):
            return self.constant(name)
        raise SignatureError(f"{self.name or 'structure'} has no operation {name!r}")

    def sample(self, rng: random.Random) -> Vec:
        return tuple(_sample_scalar(rng) for _ in range(self.dim))

    def leq(self, a: Vec, b: Vec) -> bool:
        return all(x <= y for x, y in zip(a, b))

    def show(self, a: Vec) -> str:
        return "(" + ", ".join(str(v) for v in a) + ")"

    def __repr__(self):
        return f"StructureVLA({self.name or self.dim})"


def _empty(d):
    return [[{} for _ in range(d)] for _ in range(d)]


def rationals() -> StructureVLA:
    c = _empty(1)
    c[0][0] = {0: 1}
    return StructureVLA(1, c, (1,), "Q")


def coordinatewise(d: int) -> StructureVLA:
    """ℚᵈ with coordinatewise product: a commutative f-algebra with positive identity."""
    c = _empty(d)
    for i in range(d):
        c[i][i] = {i: 1}
    return StructureVLA(d, c, (1,) * d, f"Q^{d}")


def vector_lattice(d: int) -> StructureVLA:
    """ℚᵈ as a plain vector lattice."""
    return StructureVLA(d, _empty(d), None, f"Q^{d} (VL)", with_product=False)


def zero_product(d: int) -> StructureVLA:
    """ℚᵈ with the zero multiplication: a commutative VLA without identity."""
    return StructureVLA(d, _empty(d), None, f"Q^{d} (zero product)")


def matrices(k: int) -> StructureVLA:
    """k×k rational matrices, entrywise order, matrix product, identity matrix.

    Coordinate i·k + j holds entry (i, j).
    """
    d = k * k
    c = _empty(d)
    for i in range(k):
        for j in range(k):
            for m in range(k):
                c[i * k + j][j * k + m] = {i * k + m: 1}
    unit = tuple(int(i == j) for i in range(k) for j in range(k))
    labels = tuple(f"E{i + 1}{j + 1}" for i in range(k) for j in range(k))
    return StructureVLA(d, c, unit, f"M{k}(Q) entrywise", labels=labels)


def matrix_unit(k: int, i: int, j: int) -> Vec:
    """E_ij (1-based) inside ``matrices(k)``."""
    return tuple(Fraction(int(r == (i - 1) * k + (j - 1))) for r in range(k * k))


def unitise(A: StructureVLA, check: bool = True, samples: int = 200, seed: int = 0) -> StructureVLA:
    """ℚ ⊕ A with (λ, a)(μ, b) = (λμ, λb + μa + ab) and the direct-sum order.

    Coordinate 0 is the scalar part.  The input is checked against the VLA
    identities first (sampled, all probe scalars).
    """
    if check:
        rep = check_theory(as_vla(A), theory("VLA"), samples=samples, seed=seed)
        if not rep.ok or not A.is_positive_product():
            bad = rep.failures()[0].label if rep.failures() else "positivity of the product"
            raise PreconditionError(f"input is not a vector lattice algebra ({bad})", witness=bad)
    d = A.dim + 1
    c = _empty(d)
    c[0][0] = {0: 1}
    for i in range(A.dim):
        c[0][i + 1] = {i + 1: 1}
        c[i + 1][0] = {i + 1: 1}
        for j in range(A.dim):
            c[i + 1][j + 1] = {k + 1: v for k, v in A.consts[i][j].items()}
    unit = (1,) + (0,) * A.dim
    labels = ("1",) + (A.labels or tuple(f"e{i + 1}" for i in range(A.dim)))
    return StructureVLA(d, c, unit, f"unitise({A.name})", labels=labels)


def inclusion(A: StructureVLA) -> Callable[[Vec], Vec]:
    """a ↦ (0, a), the embedding of A into its unitisation."""
    return lambda a: (Fraction(0),) + tuple(a)


def as_vla(A: StructureVLA) -> StructureVLA:
    if A.unit is None:
        return A
    return StructureVLA(A.dim, A.consts, None, A.name, A.with_product, A.labels)


def hom_failures(f: Callable, A, B, samples: int = 200, seed: int = 0) -> list[str]:
    """Operations of A's signature that ``f`` fails to preserve on random samples."""
    rng = random.Random(seed)
    fails = []
    for name, arity in A.sig.operations:
        if name not in B.sig:
            continue
        for _ in range(samples):
            args = [A.sample(rng) for _ in range(arity)]
            if f(A.operate(name, args)) != B.operate(name, [f(a) for a in args]):
                fails.append(name)
                break
    for name in A.sig.constants:
        if name in B.sig and f(A.constant(name)) != B.constant(name):
            fails.append(name)
    for _ in range(samples):
        a = A.sample(rng)
        q = rng.choice(_SMALL)
        if f(A.operate("scale", [a], q)) != B.operate("scale", [f(a)], q):
            fails.append("scale")
            break
    return fails


# ---------------------------------------------------------------- f-algebra probe


@dataclass
class FAlgebraReport:
    holds: bool
    checked: int
    witness: dict | None = None

    @property
    def line(self) -> str:
        if self.holds:
            return f"PASS (sampled, {self.checked} triples; evidence only)"
        w = ", ".join(f"{k}={v}" for k, v in self.witness.items())
        return f"FAIL witness {w}"


def f_algebra_violation(A: StructureVLA, x: Vec, y: Vec, z: Vec) -> str | None:
    """Which half of the f-algebra condition fails at (x, y, z), if any."""
    zero = A.zero()
    if A.operate("wedge", [x, y]) != zero or not A.leq(zero, z):
        return None
    if A.operate("wedge", [A.mul(x, z), y]) != zero:
        return "(x⊙z)⊓y ≠ 0"
    if A.operate("wedge", [A.mul(z, x), y]) != zero:
        return "(z⊙x)⊓y ≠ 0"
    return None


def f_algebra_probe(A: StructureVLA, samples: int = 1000, seed: int = 0) -> FAlgebraReport:
    """Search for x⊓y = 0, z ≥ 0 with (xz)⊓y ≠ 0 or (zx)⊓y ≠ 0.

    0/1 vectors are tried first in order of weight (so single basis elements
    come first), then random disjoint positive pairs with random positive z.
    A PASS is sampled evidence, never a proof.
    """
    import itertools

    d = A.dim
    checked = 0
    small = [tuple(Fraction(int(i in s)) for i in range(d)) for r in range(d + 1) for s in itertools.combinations(range(d), r)]
    small = small[: 1 + d + d * (d - 1) // 2] if d > 4 else small
    for x in small:
        for y in small:
            if A.operate("wedge", [x, y]) != A.zero():
                continue
            for z in small:
                checked += 1
                why = f_algebra_violation(A, x, y, z)
                if why:
                    return FAlgebraReport(False, checked, _named(A, x, y, z, why))
    rng = random.Random(seed)
    for _ in range(samples):
        u, v = A.sample(rng), A.sample(rng)
        diff = A.operate("plus", [u, A.operate("neg", [v])])
        x = A.operate("vee", [diff, A.zero()])
        y = A.operate("vee", [A.operate("neg", [diff]), A.zero()])
        z = A.operate("vee", [A.sample(rng), A.zero()])
        checked += 1
        why = f_algebra_violation(A, x, y, z)
        if why:
            return FAlgebraReport(False, checked, _named(A, x, y, z, why))
    return FAlgebraReport(True, checked)


def _named(A, x, y, z, why):
    def nm(v):
        if A.labels and sum(1 for c in v if c) == 1 and all(c in (0, 1) for c in v):
            return A.labels[[i for i, c in enumerate(v) if c][0]]
        return A.show(v)

    return {"x": nm(x), "y": nm(y), "z": nm(z), "fails": why}


# ---------------------------------------------------------------- the function model as a structure


@dataclass
class FVLStructure:
    """Min-max forms on n generators with the zero product: a commutative VLA."""

    n: int
    name: str = "free vector lattice (zero product)"

    def __post_init__(self):
        self.sig = VLA_SIG

    def constant(self, name):
        if name == "zero":
            return MinMaxForm.zero(self.n)
        raise SignatureError(f"no constant {name!r}")

    def operate(self, name, args, scalar=None):
        if name == "plus":
            return args[0] + args[1]
        if name == "neg":
            return -args[0]
        if name == "scale":
            return args[0].scale(scalar)
        if name == "wedge":
            return args[0].meet(args[1])
        if name == "vee":
            return args[0].join(args[1])
        if name == "dot":
            return MinMaxForm.zero(self.n)
        if name == "zero":
            return self.constant(name)
        raise SignatureError(f"no operation {name!r}")

    def sample(self, rng: random.Random):
        f = MinMaxForm.linear([_sample_scalar(rng) for _ in range(self.n)])
        if rng.random() < 0.5:
            g = MinMaxForm.linear([_sample_scalar(rng) for _ in range(self.n)])
            f = f.join(g) if rng.random() < 0.5 else f.meet(g)
        return f


STRUCTURE_PRESETS = {
    "Q": rationals,
    "Q2": lambda: coordinatewise(2),
    "Q3": lambda: coordinatewise(3),
    "m2": lambda: matrices(2),
    "m3": lambda: matrices(3),
    "Q-zero": lambda: zero_product(1),
    "Q2-zero": lambda: zero_product(2),
}


def structure_to_text(A: StructureVLA) -> str:
    """dim / unit / product lines ``i j : k c`` (0-based), as read by ``structure_from_text``."""
    lines = [f"dim {A.dim}"]
    if A.unit is not None:
        lines.append("unit " + " ".join(str(v) for v in A.unit))
    if not A.with_product:
        lines.append("noproduct")
    for i in range(A.dim):
        for j in range(A.dim):
            for k, c in sorted(A.consts[i][j].items()):
                if c:
                    lines.append(f"mul {i} {j} {k} {c}")
    return "\n".join(lines) + "\n"


def structure_from_text(text: str, name: str = "") -> StructureVLA:
    from .errors import ParseError

    dim, unit, with_product, entries = None, None, True, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "dim":
                dim = int(parts[1])
            elif parts[0] == "unit":
                unit = tuple(Fraction(v) for v in parts[1:])
            elif parts[0] == "noproduct":
                with_product = False
            elif parts[0] == "mul" and len(parts) == 5:
                entries.append((int(parts[1]), int(parts[2]), int(parts[3]), Fraction(parts[4])))
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise ParseError(f"bad structure line {raw!r}", line=lineno) from None
    if dim is None:
        raise ParseError("structure file needs a 'dim' line", line=1)
    if unit is not None and len(unit) != dim:
        raise ParseError("unit has the wrong length")
    c = _empty(dim)
    for i, j, k, v in entries:
        if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
            raise ParseError(f"index out of range in mul {i} {j} {k}")
        c[i][j][k] = c[i][j].get(k, 0) + v
    return StructureVLA(dim, c, unit, name, with_product)
