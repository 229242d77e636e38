"""Multi-index combinatorics and exact rational linear algebra.

Everything here works over :class:`fractions.Fraction`; nothing rounds.
Multi-indices are plain tuples of non-negative ints.
"""
from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial as _factorial
from typing import Optional, Sequence

MultiIndex = tuple[int, ...]
Rational = Fraction
Matrix = list[list[Fraction]]


class InconsistentSystem(ValueError):
    """Raised by :func:`solve` when the right-hand side is not in the image."""


# ---------------------------------------------------------------------------
# multi-indices
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def enumerate_multi_indices(dim: int, total: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of length ``dim`` and weight ``total``, graded-lex order.

    >>> enumerate_multi_indices(2, 2)
    ((2, 0), (1, 1), (0, 2))
    """
    if dim <= 0:
        return ((),) if total == 0 else ()
    if dim == 1:
        return ((total,),)
    out = []
    for first in range(total, -1, -1):
        for rest in enumerate_multi_indices(dim - 1, total - first):
            out.append((first,) + rest)
    return tuple(out)


def count_multi_indices(dim: int, total: int) -> int:
    if dim <= 0:
        return 1 if total == 0 else 0
    return comb(total + dim - 1, dim - 1)


def shift_up(index: MultiIndex, j: int) -> MultiIndex:
    if not 0 <= j < len(index):
        raise IndexError(f"position {j} out of range for {index}")
    return index[:j] + (index[j] + 1,) + index[j + 1:]


def shift_down(index: MultiIndex, i: int) -> Optional[MultiIndex]:
    """``index - 1_i``, or ``None`` when entry ``i`` is already zero."""
    if index[i] == 0:
        return None
    return index[:i] + (index[i] - 1,) + index[i + 1:]


def unit(dim: int, j: int) -> MultiIndex:
    return tuple(1 if t == j else 0 for t in range(dim))


def factorial(index: MultiIndex) -> int:
    out = 1
    for e in index:
        out *= _factorial(e)
    return out


# ---------------------------------------------------------------------------
# rationals
# ---------------------------------------------------------------------------

def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    text = str(text).strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def random_rational(rng: random.Random, num: int = 9, den: int = 4) -> Fraction:
    """Numerator in [-num, num], denominator in [1, den]."""
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence], cols: Optional[int] = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form with first-nonzero pivoting.

    Returns the nonzero rows of the reduced matrix and the pivot columns.
    """
    m = as_matrix(rows)
    if cols is None:
        cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pivot_row = m[r]
        inv = 1 / pivot_row[c]
        if inv != 1:
            pivot_row = [x * inv for x in pivot_row]
            m[r] = pivot_row
        nz = [t for t in range(c, cols) if pivot_row[t] != 0]
        for i in range(len(m)):
            if i != r:
                factor = m[i][c]
                if factor != 0:
                    row = m[i]
                    for t in nz:
                        row[t] -= factor * pivot_row[t]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], cols: Optional[int] = None) -> int:
    return len(rref(rows, cols)[1])


def nullspace(rows: Sequence[Sequence], cols: Optional[int] = None) -> list[list[Fraction]]:
    """Exact basis of ``{x : M x = 0}``, one vector per free column."""
    if cols is None:
        cols = len(rows[0]) if rows else 0
    reduced, pivots = rref(rows, cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * cols
        vec[free] = Fraction(1)
        for row, pc in zip(reduced, pivots):
            vec[pc] = -row[free]
        basis.append(vec)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, cols: Optional[int] = None) -> list[Fraction]:
    """One exact solution of ``M x = b``; free variables are set to zero."""
    if cols is None:
        cols = len(rows[0]) if rows else 0
    if len(rows) != len(rhs):
        raise ValueError("row count and right-hand side length differ")
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, cols + 1)
    if pivots and pivots[-1] == cols:
        raise InconsistentSystem("right-hand side is not in the image")
    x = [Fraction(0)] * cols
    for row, pc in zip(reduced, pivots):
        x[pc] = row[cols]
    return x


def mat_vec(rows: Sequence[Sequence], vec: Sequence) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in rows]


def same_row_space(a: Sequence[Sequence], b: Sequence[Sequence], cols: int) -> bool:
    ra, rb = rref(a, cols)[0], rref(b, cols)[0]
    return ra == rb
