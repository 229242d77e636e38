"""Sections of partial extensions over the plane chart and the pasting conditions.

A section assigns to each plane ``A`` the restricted polynomial
``sum_lam v[lam, h](A) x^lam e_h`` (plain monomials), with each ``v`` a
polynomial in the ``A`` coordinates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .frames import u_var
from .indexalg import (
    InconsistentSystem,
    enumerate_multi_indices,
    format_rational,
    nullspace,
    parse_rational,
    random_rational,
    rank,
    shift_down,
    shift_up,
    solve,
)
from .poly import Poly, poly_sum
from .report import Report
from .symtensor import Frame, HomPoly, a_var, adapted_from_trivial, as_plane, restrict, symbolic_plane, x_var
from .tower import QCoefficients, ReadBackError, TowerPoint, image_conditions, q_plane_of, read_back

SKey = tuple  # (lam, h)


class NotHolonomic(ValueError):
    """The section violates the pasting conditions."""


class InsufficientRank(RuntimeError):
    """The sampled planes do not determine a polynomial."""


def section_keys(frame: Frame) -> tuple[SKey, ...]:
    return tuple((lam, h) for lam in enumerate_multi_indices(frame.l, frame.degree) for h in range(frame.m))


def _is_a(var) -> bool:
    return isinstance(var, tuple) and var[0] == "A"


@dataclass(frozen=True)
class Section:
    frame: Frame
    values: Mapping

    def __post_init__(self):
        allowed = set(section_keys(self.frame))
        clean = {}
        for (lam, h), p in self.values.items():
            key = (tuple(lam), h)
            if key not in allowed:
                raise ValueError(f"{key} is not a section coordinate")
            p = p if isinstance(p, Poly) else Poly.const(p)
            if not all(_is_a(v) for v in p.variables()):
                raise ValueError("section values must be polynomials in the A coordinates")
            if not p.is_zero():
                clean[key] = p
        object.__setattr__(self, "values", clean)

    def value(self, key) -> Poly:
        return self.values.get(key, Poly())

    def at(self, A) -> dict:
        A = as_plane(self.frame, A)
        point = {a_var(i, j): A[i][j] for i in range(self.frame.d) for j in range(self.frame.l)}
        return {key: p.value(point) for key, p in self.values.items()}

    def __eq__(self, other):
        return isinstance(other, Section) and self.frame == other.frame and self.values == other.values

    def __hash__(self):
        return hash((self.frame, frozenset(self.values.items())))

    def __add__(self, other: "Section") -> "Section":
        keys = set(self.values) | set(other.values)
        return Section(self.frame, {key: self.value(key) + other.value(key) for key in keys})

    def to_json(self) -> dict:
        entries = []
        for (lam, h), p in sorted(self.values.items()):
            terms = []
            for mono, c in sorted(p.terms.items()):
                terms.append({"monomial": [[v[1], v[2], e] for v, e in mono], "coeff": format_rational(c)})
            entries.append({"lambda": list(lam), "h": h, "poly": terms})
        return {"frame": self.frame.as_dict(), "entries": entries}

    @classmethod
    def from_json(cls, data: Mapping) -> "Section":
        frame = Frame(**{k: int(data["frame"][k]) for k in ("n", "m", "l", "k")})
        values = {}
        for entry in data["entries"]:
            terms = {}
            for t in entry["poly"]:
                mono = tuple(sorted((a_var(i, j), e) for i, j, e in t["monomial"]))
                terms[mono] = parse_rational(t["coeff"])
            values[(tuple(entry["lambda"]), int(entry["h"]))] = Poly(terms)
        return cls(frame, values)


# ---------------------------------------------------------------------------
# from jets, and the pasting checks
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _restriction_operator(frame: Frame) -> dict:
    """``{(lam, h): {trivial key: polynomial in A}}``: the restriction as a linear map."""
    u = {key: Poly.var(u_var(key)) for key in frame.keys()}
    adapted = adapted_from_trivial(frame, u, symbolic_plane(frame))
    op = {}
    for (delta, lam, h), p in adapted.items():
        if sum(delta):
            continue
        op[(lam, h)] = _split_by_u(p)
    return op


def _split_by_u(p: Poly) -> dict:
    out = {}
    for outer, coef in p.split(lambda var: var[0] == "u").items():
        if len(outer) != 1 or outer[0][1] != 1:
            raise AssertionError("restriction is not linear in the jet")
        out[outer[0][0][1:]] = coef
    return out


def section_from_jet(f: HomPoly) -> Section:
    op = _restriction_operator(f.frame)
    values = {}
    for skey, cols in op.items():
        values[skey] = poly_sum(coef * f.coeffs[key] for key, coef in cols.items() if key in f.coeffs)
    return Section(f.frame, values)


def _instances(frame: Frame):
    """Index instances of the two infinitesimal pasting families.

    Yields ``("eq", i, (j, lam), (j2, lam2), h)`` and ``("zero", i, j, lam, h)``.
    """
    for lam in enumerate_multi_indices(frame.l, frame.degree):
        for h in range(frame.m):
            for i in range(frame.d):
                for j in range(frame.l):
                    if lam[j] == 0:
                        yield ("zero", i, j, lam, h)
                        continue
                    base = shift_down(lam, j)
                    for j2 in range(frame.l):
                        lam2 = shift_up(base, j2)
                        if (j2, lam2) > (j, lam):
                            yield ("eq", i, (j, lam), (j2, lam2), h)


def check_infinitesimal(s: Section) -> list[dict]:
    """Violated instances of the infinitesimal pasting conditions (empty when holonomic)."""
    frame = s.frame
    out = []
    for inst in _instances(frame):
        if inst[0] == "zero":
            _, i, j, lam, h = inst
            der = s.value((lam, h)).diff(a_var(i, j))
            if not der.is_zero():
                out.append({"kind": "zero", "i": i, "j": j, "lambda": lam, "h": h, "residual": der})
        else:
            _, i, (j, lam), (j2, lam2), h = inst
            diff = s.value((lam, h)).diff(a_var(i, j)) - s.value((lam2, h)).diff(a_var(i, j2))
            if not diff.is_zero():
                out.append({"kind": "eq", "i": i, "j": [j, j2], "lambda": [lam, lam2], "h": h, "residual": diff})
    return out


def derivative_keys(frame: Frame) -> tuple:
    """Unknowns ``dv[lam, h] / dA[i, j]`` of the instantiated conditions, as ``(lam, i, j, h)``."""
    return tuple((lam, i, j, h) for lam in enumerate_multi_indices(frame.l, frame.degree)
                 for h in range(frame.m) for i in range(frame.d) for j in range(frame.l))


def infinitesimal_constraint_rows(frame: Frame) -> list[tuple]:
    """The pasting conditions at a point as linear rows over :func:`derivative_keys`.

    Rows are normalized to leading coefficient 1 and deduplicated.
    """
    index = {key: pos for pos, key in enumerate(derivative_keys(frame))}
    rows = set()
    for inst in _instances(frame):
        row = [Fraction(0)] * len(index)
        if inst[0] == "zero":
            _, i, j, lam, h = inst
            row[index[(lam, i, j, h)]] = Fraction(1)
        else:
            _, i, (j, lam), (j2, lam2), h = inst
            row[index[(lam, i, j, h)]] += 1
            row[index[(lam2, i, j2, h)]] -= 1
        lead = next((c for c in row if c), None)
        if lead is not None:
            rows.add(tuple(c / lead for c in row))
    return sorted(rows, reverse=True)


def _restricted_poly(s: Section, A) -> Poly:
    vals = s.at(A)
    out = Poly()
    for (lam, h), c in vals.items():
        mono = tuple((x_var(j), e) for j, e in enumerate(lam) if e)
        out = out + Poly({tuple(sorted(mono)) + ((("e", h), 1),): c})
    return out


def check_global(s: Section, A, A2) -> bool:
    """Whether the restricted polynomials at ``A`` and ``A2`` agree on the intersection of the planes."""
    frame = s.frame
    A, A2 = as_plane(frame, A), as_plane(frame, A2)
    diff_rows = [[A[i][j] - A2[i][j] for j in range(frame.l)] for i in range(frame.d)]
    kernel = nullspace(diff_rows, frame.l) if any(any(r) for r in diff_rows) else [
        [Fraction(int(t == s_)) for t in range(frame.l)] for s_ in range(frame.l)
    ]
    sub = {x_var(j): poly_sum(Poly.var(("t", r)) * vec[j] for r, vec in enumerate(kernel)) for j in range(frame.l)}
    return (_restricted_poly(s, A) - _restricted_poly(s, A2)).subs(sub).is_zero()


# ---------------------------------------------------------------------------
# gluing
# ---------------------------------------------------------------------------

def glue(s: Section, rng: random.Random | None = None, max_extra: int = 20) -> HomPoly:
    """The jet whose restrictions give ``s``.

    Samples planes ``t * U`` for a fixed integer matrix ``U`` and ``t = 0..k+1``,
    adding random planes while the system is rank deficient.
    """
    frame = s.frame
    rng = rng or random.Random(f"glue:{frame.n},{frame.m},{frame.k},{frame.l}")
    keys = frame.keys()
    op = _restriction_operator(frame)
    U = [[rng.randint(-3, 3) or 1 for _ in range(frame.l)] for _ in range(frame.d)]
    planes = [[[t * c for c in row] for row in U] for t in range(frame.degree + 1)]
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []

    def add(A):
        point = {a_var(i, j): Fraction(A[i][j]) for i in range(frame.d) for j in range(frame.l)}
        target = s.at(A)
        for skey, cols in op.items():
            rows.append([cols[key].value(point) if key in cols else Fraction(0) for key in keys])
            rhs.append(target.get(skey, Fraction(0)))

    for A in planes:
        add(A)
    extra = 0
    while rank(rows, len(keys)) < len(keys):
        if extra >= max_extra:
            raise InsufficientRank(f"rank {rank(rows, len(keys))} < {len(keys)} after {extra} extra planes")
        add([[random_rational(rng) for _ in range(frame.l)] for _ in range(frame.d)])
        extra += 1
    try:
        sol = solve(rows, rhs, len(keys))
    except InconsistentSystem as exc:
        raise NotHolonomic("restrictions at the sampled planes are incompatible") from exc
    f = HomPoly(frame, dict(zip(keys, sol)))
    if section_from_jet(f) != s:
        raise NotHolonomic("the glued jet does not reproduce the section")
    return f


# ---------------------------------------------------------------------------
# first jets and the level-one prolongation
# ---------------------------------------------------------------------------

def first_jet_coefficients(s: Section, A) -> QCoefficients:
    """``C[0, lam, i, j, h] = dv[lam, h]/dA[i, j]`` at ``A``, over the level-0 point of ``s``."""
    frame = s.frame
    A = as_plane(frame, A)
    point = {a_var(i, j): A[i][j] for i in range(frame.d) for j in range(frame.l)}
    zero = (0,) * frame.d
    v = {(zero, lam, h): c for (lam, h), c in s.at(A).items()}
    base = TowerPoint(frame, 0, A, v)
    C = {}
    for (lam, h), p in s.values.items():
        for i in range(frame.d):
            for j in range(frame.l):
                c = p.diff(a_var(i, j)).value(point)
                if c:
                    C[(zero, lam, i, j, h)] = c
    return QCoefficients(base, C)


def first_jet_in_equation(s: Section, A) -> bool:
    """Whether the first jet of ``s`` at ``A`` lies in the level-one prolongation."""
    Q = first_jet_coefficients(s, A)
    rows = image_conditions(s.frame, 0)
    vec = Q.vector()
    by_conditions = all(not sum((a * x for a, x in zip(row, vec)), Fraction(0)) for row in rows)
    try:
        by_readback = q_plane_of(read_back(Q)) == Q
    except ReadBackError:
        by_readback = False
    if by_conditions != by_readback:
        raise AssertionError("condition and read-back routes disagree")
    return by_conditions


def violating_sections(frame: Frame, base: Section | None = None) -> list[tuple[dict, Section]]:
    """Single-coordinate violations: ``base`` with ``A[i, j]`` added to one entry.

    Each breaks one instance of either family: ``lam_j = 0`` hits the vanishing
    family, ``lam_j > 0`` the equality family against its partners.
    """
    base = base or Section(frame, {})
    out = []
    seen = set()
    for inst in _instances(frame):
        if inst[0] == "zero":
            _, i, j, lam, h = inst
        else:
            _, i, (j, lam), _, h = inst
        if (i, j, lam, h) in seen:
            continue
        seen.add((i, j, lam, h))
        values = dict(base.values)
        values[(lam, h)] = values.get((lam, h), Poly()) + Poly.var(a_var(i, j))
        out.append(({"kind": inst[0], "i": i, "j": j, "lambda": list(lam), "h": h}, Section(frame, values)))
    return out


def verify_pasting(frame: Frame, rng: random.Random, samples: int = 20) -> Report:
    report = Report("pasting", frame.as_dict(), samples=samples)
    keys = frame.keys()
    for _ in range(samples):
        f = HomPoly(frame, {key: random_rational(rng) for key in keys})
        s = section_from_jet(f)
        report.check(not check_infinitesimal(s), claim="jet sections are holonomic", f=f)
        A = [[random_rational(rng) for _ in range(frame.l)] for _ in range(frame.d)]
        A2 = [[random_rational(rng) for _ in range(frame.l)] for _ in range(frame.d)]
        report.check(check_global(s, A, A2), claim="jet sections paste globally", f=f)
        report.check(first_jet_in_equation(s, A), claim="first jet in the prolongation", f=f)
        rest = restrict(f, A)
        report.check(all(s.at(A).get(key, 0) == c for key, c in rest.items()) and
                     len([c for c in s.at(A).values() if c]) == len(rest),
                     claim="section equals restriction", f=f)
        try:
            ok = glue(s) == f
        except (NotHolonomic, InsufficientRank):
            ok = False
        report.check(ok, claim="glue round trip", f=f)
    f = HomPoly(frame, {key: random_rational(rng) for key in keys})
    holo = section_from_jet(f)
    for label, bad in violating_sections(frame, holo):
        caught_inf = bool(check_infinitesimal(bad))
        try:
            glue(bad)
            caught_glue = False
        except NotHolonomic:
            caught_glue = True
        report.check(caught_inf and caught_glue, claim="violation detected", violation=label,
                     infinitesimal=caught_inf, glue=caught_glue)
        A = [[random_rational(rng) for _ in range(frame.l)] for _ in range(frame.d)]
        report.check(not first_jet_in_equation(bad, A), claim="violation leaves the prolongation",
                     violation=label)
    return report
