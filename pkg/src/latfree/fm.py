"""Exact Fourier–Motzkin elimination for strict homogeneous systems.

A system is a list of rational row vectors a_i; it is feasible when some
x ∈ ℚⁿ has a_i·x > 0 for every i.  Rows are stored as primitive integer
vectors (positive scaling does not change a strict inequality), which keeps
everything in Python ints.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd
from typing import Iterable, Sequence

from .errors import BudgetExceeded

DEFAULT_ROW_CAP = 20_000


def primitive(row: Sequence) -> tuple[int, ...]:
    """Scale a rational vector by a positive factor to coprime integers."""
    fr = [Fraction(v) for v in row]
    den = 1
    for v in fr:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in fr]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _eliminate(rows: set, k: int, cap: int) -> set:
    pos, negs, rest = [], [], set()
    for r in rows:
        c = r[k]
        if c > 0:
            pos.append(r)
        elif c < 0:
            negs.append(r)
        else:
            rest.add(r)
    if len(pos) * len(negs) + len(rest) > cap:
        raise BudgetExceeded(f"elimination would produce {len(pos) * len(negs) + len(rest)} rows (cap {cap})")
    for p in pos:
        for q in negs:
            a, b = p[k], -q[k]
            rest.add(primitive([b * pi + a * qi for pi, qi in zip(p, q)]))
    return rest


def _pick(lo: Fraction | None, hi: Fraction | None) -> Fraction:
    """A value strictly between lo and hi, preferring the integer nearest 0."""
    if (lo is None or lo < 0) and (hi is None or hi > 0):
        return Fraction(0)
    if lo is not None and lo >= 0:
        cand = Fraction(floor(lo) + 1)
    else:
        cand = Fraction(ceil(hi) - 1)
    if (lo is None or cand > lo) and (hi is None or cand < hi):
        return cand
    return (lo + hi) / 2


def strict_feasible(rows: Iterable[Sequence], n: int | None = None, cap: int = DEFAULT_ROW_CAP):
    """A rational point x with a·x > 0 for every row a, or None when none exists."""
    start = {primitive(r) for r in rows}
    if not start:
        return tuple(Fraction(0) for _ in range(n or 0))
    n = len(next(iter(start))) if n is None else n
    stages = [start]
    cur = start
    for k in range(n - 1, -1, -1):
        if any(not any(r) for r in cur):
            return None
        cur = _eliminate(cur, k, cap)
        stages.append(cur)
    if cur:
        return None  # only all-zero rows survive, i.e. 0 > 0
    x = [Fraction(0)] * n
    for k in range(n):
        rows_k = stages[n - 1 - k]
        lo = hi = None
        for r in rows_k:
            c = r[k]
            if c == 0:
                continue
            rest = sum((r[i] * x[i] for i in range(k)), Fraction(0))
            bound = -rest / c
            if c > 0:
                lo = bound if lo is None or bound > lo else lo
            else:
                hi = bound if hi is None or bound < hi else hi
        x[k] = _pick(lo, hi)
    return tuple(x)


def is_strict_feasible(rows, n=None, cap: int = DEFAULT_ROW_CAP) -> bool:
    return strict_feasible(rows, n, cap) is not None
