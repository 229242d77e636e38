"""Sparse multivariate polynomials with exact rational coefficients.

Variables are hashable names.  Names sharing a first element (a "tag" such as
``"A"`` or ``"v"``) must share a tuple shape so monomials sort consistently.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Union

Var = Hashable
Monomial = tuple[tuple[Var, int], ...]

ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Poly:
    """Immutable sparse polynomial; ``terms`` maps monomials to nonzero Fractions."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms: dict[Monomial, Fraction] = dict(terms) if terms else {}

    # -- construction -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        c = Fraction(c)
        return cls({ONE: c}) if c else cls()

    @classmethod
    def var(cls, name: Var) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    # -- predicates / access ----------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"polynomial is not constant: {self}")
        return self.terms.get(ONE, Fraction(0))

    def variables(self) -> set:
        return {v for mono in self.terms for v, _ in mono}

    def degree(self, vars: Iterable[Var] | None = None) -> int:
        """Total degree, optionally counting only ``vars``; -1 for zero."""
        if not self.terms:
            return -1
        if vars is None:
            return max(sum(e for _, e in mono) for mono in self.terms)
        vs = set(vars)
        return max(sum(e for v, e in mono if v in vs) for mono in self.terms)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = as_poly(other)
        if not other.terms:
            return self
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            s = terms.get(mono, 0) + c
            if s:
                terms[mono] = s
            else:
                terms.pop(mono, None)
        return Poly._raw(terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = Fraction(other)
            if not c:
                return Poly()
            return Poly._raw({m: v * c for m, v in self.terms.items()})
        if not self.terms or not other.terms:
            return Poly()
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                s = terms.get(mono, 0) + c1 * c2
                if s:
                    terms[mono] = s
                else:
                    terms.pop(mono, None)
        return Poly._raw(terms)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Poly":
        return self * (1 / Fraction(c))

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        try:
            return self.terms == as_poly(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus / substitution ------------------------------------------
    def diff(self, var: Var) -> "Poly":
        terms: dict = {}
        for mono, c in self.terms.items():
            for pos, (v, e) in enumerate(mono):
                if v == var:
                    new = mono[:pos] + ((v, e - 1),) + mono[pos + 1:] if e > 1 else mono[:pos] + mono[pos + 1:]
                    terms[new] = terms.get(new, 0) + c * e
                    break
        return Poly._raw({m: c for m, c in terms.items() if c})

    def subs(self, mapping: Mapping[Var, object]) -> "Poly":
        """Simultaneous substitution of variables by polynomials or scalars."""
        if not mapping:
            return self
        images = {v: as_poly(p) for v, p in mapping.items()}
        powers: dict = {}

        def power(v, e):
            key = (v, e)
            if key not in powers:
                powers[key] = images[v] ** e
            return powers[key]

        out: dict = {}
        for mono, c in self.terms.items():
            kept = tuple((v, e) for v, e in mono if v not in images)
            term = Poly._raw({kept: c})
            for v, e in mono:
                if v in images:
                    term = term * power(v, e)
                    if not term.terms:
                        break
            for m, tc in term.terms.items():
                s = out.get(m, 0) + tc
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out)

    def evaluate(self, values: Mapping[Var, object]) -> "Poly":
        """Partial evaluation at scalar values (faster than ``subs``)."""
        out: dict = {}
        for mono, c in self.terms.items():
            kept = []
            for v, e in mono:
                if v in values:
                    c = c * Fraction(values[v]) ** e
                    if not c:
                        break
                else:
                    kept.append((v, e))
            if not c:
                continue
            k = tuple(kept)
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Poly._raw(out)

    def value(self, values: Mapping[Var, object]) -> Fraction:
        return self.evaluate(values).constant_value()

    def split(self, is_outer: Callable[[Var], bool]) -> dict[Monomial, "Poly"]:
        """Group terms by their monomial in the "outer" variables.

        Returns ``{outer monomial: coefficient polynomial in the other variables}``.
        """
        groups: dict[Monomial, dict] = {}
        for mono, c in self.terms.items():
            outer = tuple((v, e) for v, e in mono if is_outer(v))
            inner = tuple((v, e) for v, e in mono if not is_outer(v))
            groups.setdefault(outer, {})[inner] = c
        return {k: Poly._raw(v) for k, v in groups.items()}

    def linear_form(self) -> dict[Var, Fraction]:
        """Coefficients of a homogeneous linear polynomial."""
        out = {}
        for mono, c in self.terms.items():
            if len(mono) != 1 or mono[0][1] != 1:
                raise ValueError(f"not a homogeneous linear form: {self}")
            out[mono[0][0]] = c
        return out

    # -- display ------------------------------------------------------------
    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda t: repr(t[0])):
            factors = "*".join(_fmt_var(v) + (f"^{e}" if e > 1 else "") for v, e in mono)
            parts.append(f"{c}" + (f"*{factors}" if factors else ""))
        return "Poly(" + " + ".join(parts) + ")"


def _fmt_var(v) -> str:
    if isinstance(v, tuple):
        return str(v[0]) + "[" + ",".join(map(str, v[1:])) + "]"
    return str(v)


def as_poly(x: Union[Poly, int, Fraction]) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(x)


def poly_sum(items: Iterable) -> Poly:
    terms: dict = {}
    for p in items:
        for m, c in as_poly(p).terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
    return Poly._raw(terms)
