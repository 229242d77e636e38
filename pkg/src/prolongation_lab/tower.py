"""The tower of reduced spaces M^q, Q-planes over them, and the prolongation checks.

A point of ``M^q`` is its adapted-chart coordinates ``(A; v with |delta| <= q)``.
A Q-plane over a point of level ``b`` is spanned by
``C_ij = D^[b]_ij + sum_{|delta| = b} C[delta, lam, i, j, h] d/dv[delta, lam, h]``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

from .frames import (
    ADAPTED,
    ChartId,
    Derivation,
    _u_in_v,
    chart_coordinates,
    chart_point,
    lie_bracket,
    make_D,
    make_V,
    span_closure,
    u_var,
    v_var,
)
from .indexalg import (
    count_multi_indices,
    format_rational,
    nullspace,
    parse_rational,
    random_rational,
    rank,
    same_row_space,
    shift_down,
    shift_up,
)
from .jetmodel import (
    flag_compose,
    flag_velocity,
    in_span,
    integral_plane_dimension,
    is_tangent,
    polar_membership,
    polar_pairing,
)
from .poly import Poly
from .report import Report
from .symtensor import Frame, HomPoly, a_var, adapted_from_trivial, as_plane, filtration_level, from_adapted, symbolic_plane

CKey = tuple  # (delta, lam, i, j, h)


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TowerPoint:
    frame: Frame
    q: int
    A: tuple
    v: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not -1 <= self.q <= self.frame.k + 1:
            raise ValueError(f"level {self.q} outside -1..{self.frame.k + 1}")
        object.__setattr__(self, "A", as_plane(self.frame, self.A))
        allowed = set(self.frame.keys_upto(self.q)) if self.q >= 0 else set()
        clean = {}
        for key, c in self.v.items():
            key = (tuple(key[0]), tuple(key[1]), key[2])
            if key not in allowed:
                raise ValueError(f"{key} is not a coordinate of M^{self.q}")
            clean[key] = Fraction(c)
        for key in allowed:
            clean.setdefault(key, Fraction(0))
        object.__setattr__(self, "v", clean)

    def coords(self) -> dict:
        """Values of the chart coordinates, keyed by coordinate name."""
        return chart_point(self.frame, self.A, self.v, self.q) if self.q >= 0 else {
            a_var(i, j): self.A[i][j] for i in range(self.frame.d) for j in range(self.frame.l)
        }

    def __eq__(self, other):
        return (isinstance(other, TowerPoint) and self.frame == other.frame and self.q == other.q
                and self.A == other.A and self.v == other.v)

    def __hash__(self):
        return hash((self.frame, self.q, self.A, frozenset(self.v.items())))

    def to_json(self) -> dict:
        return {
            "frame": self.frame.as_dict(),
            "q": self.q,
            "A": [[format_rational(c) for c in row] for row in self.A],
            "terms": [{"delta": list(dl), "lambda": list(lm), "h": h, "coeff": format_rational(c)}
                      for (dl, lm, h), c in sorted(self.v.items()) if c],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TowerPoint":
        frame = Frame(**{k: int(data["frame"][k]) for k in ("n", "m", "l", "k")})
        v = {(tuple(t["delta"]), tuple(t["lambda"]), int(t["h"])): parse_rational(t["coeff"]) for t in data["terms"]}
        A = [[parse_rational(c) for c in row] for row in data["A"]]
        return cls(frame, int(data["q"]), A, v)


def project(phi: TowerPoint, target: int) -> TowerPoint:
    if target > phi.q:
        raise ValueError("can only project to a lower level")
    keep = {key: c for key, c in phi.v.items() if sum(key[0]) <= target}
    return TowerPoint(phi.frame, target, phi.A, keep)


def random_point(frame: Frame, q: int, rng: random.Random, draw=random_rational) -> TowerPoint:
    A = [[draw(rng) for _ in range(frame.l)] for _ in range(frame.d)]
    v = {key: draw(rng) for key in frame.keys_upto(q)} if q >= 0 else {}
    return TowerPoint(frame, q, A, v)


# ---------------------------------------------------------------------------
# dimensions
# ---------------------------------------------------------------------------

def fiber_dimension(frame: Frame, q: int) -> int:
    """dim M^q - dim M^{q-1}: the number of ``v`` coordinates with ``|delta| = q``."""
    if q == -1:
        return frame.d * frame.l
    return frame.m * count_multi_indices(frame.d, q) * count_multi_indices(frame.l, frame.degree - q)


def dim_M(frame: Frame, q: int) -> int:
    return sum(fiber_dimension(frame, b) for b in range(-1, q + 1))


def dimension_table(frame: Frame) -> dict:
    d, l, m, k, n = frame.d, frame.l, frame.m, frame.k, frame.n
    return {
        "frame": frame.as_dict(),
        "levels": [{"q": q, "dim": dim_M(frame, q), "fiber": fiber_dimension(frame, q)} for q in range(-1, k + 2)],
        "grassmannian": d * l,
        "top_jet_fiber": m * comb(k + n, n - 1),
        "integral_elements": dim_M(frame, k),
        "flag_distribution": d * l + fiber_dimension(frame, k + 1),
    }


# ---------------------------------------------------------------------------
# Q-planes
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def c_keys(frame: Frame, b: int) -> tuple[CKey, ...]:
    return tuple((delta, lam, i, j, h) for delta, lam, h in frame.keys_at(b)
                 for i in range(frame.d) for j in range(frame.l))


@lru_cache(maxsize=None)
def _c_index(frame: Frame, b: int) -> dict:
    return {key: pos for pos, key in enumerate(c_keys(frame, b))}


@dataclass(frozen=True)
class QCoefficients:
    base: TowerPoint
    C: Mapping

    def __post_init__(self):
        frame, b = self.base.frame, self.base.q
        if b < 0:
            raise ValueError("Q-planes live over levels >= 0")
        allowed = _c_index(frame, b)
        clean = {}
        for key, c in self.C.items():
            key = (tuple(key[0]), tuple(key[1]), *key[2:])
            if key not in allowed:
                raise ValueError(f"{key} is not a coefficient at level {b}")
            if c:
                clean[key] = Fraction(c)
        object.__setattr__(self, "C", clean)

    @property
    def frame(self) -> Frame:
        return self.base.frame

    @property
    def level(self) -> int:
        return self.base.q

    def vector(self) -> list[Fraction]:
        return [self.C.get(key, Fraction(0)) for key in c_keys(self.frame, self.level)]

    @classmethod
    def from_vector(cls, base: TowerPoint, vec: Sequence) -> "QCoefficients":
        return cls(base, dict(zip(c_keys(base.frame, base.q), vec)))

    def fields(self) -> list[Derivation]:
        """The spanning fields ``C_ij`` with constant vertical coefficients."""
        frame, b = self.frame, self.level
        out = []
        for i in range(frame.d):
            for j in range(frame.l):
                X = make_D(frame, i, j, b)
                comps = dict(X.components)
                for (delta, lam, i2, j2, h), c in self.C.items():
                    if (i2, j2) == (i, j):
                        comps[v_var((delta, lam, h))] = comps.get(v_var((delta, lam, h)), Poly()) + c
                out.append(Derivation(X.chart, comps))
        return out

    def __eq__(self, other):
        return isinstance(other, QCoefficients) and self.base == other.base and self.C == other.C

    def __hash__(self):
        return hash((self.base, frozenset(self.C.items())))


def q_plane_of(phi: TowerPoint) -> QCoefficients:
    if phi.q < 1:
        raise ValueError("q_plane_of needs a point of level >= 1")
    frame = phi.frame
    C = {}
    for delta, lam, i, j, h in c_keys(frame, phi.q - 1):
        if lam[j] > 0:
            C[(delta, lam, i, j, h)] = phi.v[(shift_up(delta, i), shift_down(lam, j), h)]
    return QCoefficients(project(phi, phi.q - 1), C)


class ReadBackError(ValueError):
    pass


def read_back(Q: QCoefficients) -> TowerPoint:
    """The point of the next level whose Q-plane is ``Q``.

    Uses the smallest ``i`` with ``Delta_i > 0`` and ``j = 0``; every other
    admissible choice must give the same value or ``ReadBackError`` is raised.
    """
    frame, b = Q.frame, Q.level
    if b + 1 > frame.k + 1:
        raise ValueError("no level above k + 1")
    v = dict(Q.base.v)
    for Delta, Lam, h in frame.keys_at(b + 1):
        values = set()
        first = None
        for i in range(frame.d):
            if Delta[i] == 0:
                continue
            for j in range(frame.l):
                val = Q.C.get((shift_down(Delta, i), shift_up(Lam, j), i, j, h), Fraction(0))
                if first is None:
                    first = val
                values.add(val)
        if len(values) > 1:
            raise ReadBackError(f"inconsistent read-back for {(Delta, Lam, h)}: {sorted(values)}")
        v[(Delta, Lam, h)] = first
    return TowerPoint(frame, b + 1, Q.base.A, v)


# ---------------------------------------------------------------------------
# linear conditions on C
# ---------------------------------------------------------------------------

def _normalize(row: dict, size: int) -> tuple:
    vec = [Fraction(0)] * size
    for pos, c in row.items():
        vec[pos] += c
    lead = next((c for c in vec if c), None)
    if lead is None:
        return ()
    return tuple(c / lead for c in vec)


def _collect(rows: list[dict], size: int) -> list[tuple]:
    out = {_normalize(r, size) for r in rows}
    out.discard(())
    return sorted(out, reverse=True)


@lru_cache(maxsize=None)
def integrality_conditions(frame: Frame, b: int) -> tuple[tuple, ...]:
    """Index form of the vanishing of the curvature on a Q-plane at level ``b >= 1``.

    Level 0 carries no conditions (the distribution there is everything).
    """
    if b == 0:
        return ()
    index = _c_index(frame, b)
    rows = []
    for key, pos in index.items():
        delta, lam, i, j, h = key
        if frame.l > 1 and lam[j] == 0:
            rows.append({pos: Fraction(1)})
        for i2 in range(frame.d):
            if delta[i2] == 0:
                continue
            Delta = shift_down(delta, i2)
            for j2 in range(frame.l):
                Lam = shift_up(lam, j2)
                lam2 = shift_down(Lam, j)
                if lam2 is None:
                    continue
                other = index[(shift_up(Delta, i), lam2, i2, j2, h)]
                if other != pos:
                    rows.append({pos: Fraction(1), other: Fraction(-1)})
    return tuple(_collect(rows, len(index)))


@lru_cache(maxsize=None)
def image_conditions(frame: Frame, b: int) -> tuple[tuple, ...]:
    """Conditions cutting out the Q-planes of points one level up."""
    index = _c_index(frame, b)
    rows = []
    for key, pos in index.items():
        delta, lam, i, j, h = key
        if lam[j] == 0:
            rows.append({pos: Fraction(1)})
            continue
        Delta, Lam = shift_up(delta, i), shift_down(lam, j)
        for i2 in range(frame.d):
            delta2 = shift_down(Delta, i2)
            if delta2 is None:
                continue
            for j2 in range(frame.l):
                other = index[(delta2, shift_up(Lam, j2), i2, j2, h)]
                if other != pos:
                    rows.append({pos: Fraction(1), other: Fraction(-1)})
    return tuple(_collect(rows, len(index)))


def prolongation_conditions(frame: Frame, b: int) -> tuple[tuple, ...]:
    """Conditions used by the solver: integrality above level 0, the image conditions at level 0."""
    return image_conditions(frame, 0) if b == 0 else integrality_conditions(frame, b)


def _c_var(key):
    return ("C",) + key


@lru_cache(maxsize=None)
def _bracket_forms(frame: Frame, b: int) -> tuple:
    """Curvature components of the symbolic Q-plane at level ``b``.

    Each entry is a polynomial in chart coordinates and the ``C`` unknowns; it
    is the coefficient of ``d/dv`` (``|delta| < b``) in ``[C_ij, C_i'j']``
    after removing the ``D^[b]`` part.
    """
    chart = ChartId(ADAPTED, b)
    D = {}
    fields = {}
    for i in range(frame.d):
        for j in range(frame.l):
            D[(i, j)] = make_D(frame, i, j, b)
            comps = dict(D[(i, j)].components)
            for delta, lam, h in frame.keys_at(b):
                comps[v_var((delta, lam, h))] = Poly.var(_c_var((delta, lam, i, j, h)))
            fields[(i, j)] = Derivation(chart, comps)
    lower = [v_var(key) for key in frame.keys_upto(b - 1)] if b >= 1 else []
    forms = []
    for a, c in combinations(sorted(fields), 2):
        Z = lie_bracket(fields[a], fields[c])
        for (i, j), X in D.items():
            coef = Z.components.get(a_var(i, j))
            if coef is not None:
                Z = Z - Derivation(chart, {name: p * coef for name, p in X.components.items()})
        forms.extend(Z.components.get(name, Poly()) for name in lower)
    return tuple(p for p in forms if not p.is_zero())


def bracket_conditions(phi: TowerPoint) -> list[tuple]:
    """Curvature conditions on ``C`` at ``phi``, read off symbolic brackets."""
    frame, b = phi.frame, phi.q
    index = _c_index(frame, b)
    point = phi.coords()
    rows = []
    for form in _bracket_forms(frame, b):
        lin = form.evaluate(point)
        row = {}
        for var, c in lin.linear_form().items():
            row[index[var[1:]]] = c
        rows.append(row)
    return _collect(rows, len(index))


def _violations(rows: Sequence[Sequence], vec: Sequence) -> list[int]:
    return [r for r, row in enumerate(rows) if sum((a * x for a, x in zip(row, vec) if a), Fraction(0))]


def is_integral_plane(Q: QCoefficients) -> bool:
    """Index-condition verdict, cross-checked against the bracket route."""
    frame, b = Q.frame, Q.level
    vec = Q.vector()
    by_index = not _violations(integrality_conditions(frame, b), vec)
    point = Q.base.coords()
    values = {_c_var(key): c for key, c in zip(c_keys(frame, b), vec)}
    values.update(point)
    by_bracket = all(not form.evaluate(values).constant_value() for form in _bracket_forms(frame, b))
    if by_index != by_bracket:
        raise AssertionError(f"index and bracket routes disagree on {Q.C} (index={by_index})")
    return by_index


def satisfies_image_conditions(Q: QCoefficients) -> bool:
    return not _violations(image_conditions(Q.frame, Q.level), Q.vector())


@dataclass(frozen=True)
class Solutions:
    """Linear parametrization ``C = sum t_r basis[r]`` of admissible Q-planes at ``base``."""

    base: TowerPoint
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def plane(self, params: Sequence) -> QCoefficients:
        size = len(c_keys(self.base.frame, self.base.q))
        vec = [Fraction(0)] * size
        for t, row in zip(params, self.basis):
            if t:
                for pos, c in enumerate(row):
                    vec[pos] += t * c
        return QCoefficients.from_vector(self.base, vec)


def enumerate_integral_planes(phi: TowerPoint) -> Solutions:
    rows = prolongation_conditions(phi.frame, phi.q)
    size = len(c_keys(phi.frame, phi.q))
    basis = nullspace(list(rows), size) if rows else [
        [Fraction(int(t == s)) for t in range(size)] for s in range(size)
    ]
    return Solutions(phi, tuple(tuple(r) for r in basis))


def reduced_distribution_basis(phi: TowerPoint) -> list[Derivation]:
    frame, q = phi.frame, phi.q
    chart = ChartId(ADAPTED, q)
    out = [make_D(frame, i, j, q) for i in range(frame.d) for j in range(frame.l)]
    out += [make_V(frame, *key, chart=chart) for key in frame.keys_at(q)]
    return out


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def verify_prolongation(frame: Frame, rng: random.Random, samples: int = 20) -> Report:
    report = Report("prolongation", frame.as_dict(), samples=samples)
    k = frame.k
    # integrality and image conditions agree wherever the bijection is claimed
    for b in range(1, k + 1):
        ok = same_row_space(integrality_conditions(frame, b), image_conditions(frame, b), len(c_keys(frame, b)))
        report.check(ok, claim="integrality equals image conditions", level=b)
    for q in range(1, k + 2):
        b = q - 1
        for _ in range(samples):
            phi = random_point(frame, q, rng)
            Q = q_plane_of(phi)
            report.check(is_integral_plane(Q), claim="Q-plane of a point is integral", level=q, point=phi)
            if b >= 1:
                base = Q.base
                rows_i = list(integrality_conditions(frame, b))
                rows_b = bracket_conditions(base)
                report.check(same_row_space(rows_i, rows_b, len(c_keys(frame, b))),
                             claim="bracket and index conditions agree", level=b, point=base)
            if q < 2:
                continue
            try:
                report.check(read_back(Q) == phi, claim="read-back inverts q_plane_of", level=q, point=phi)
            except ReadBackError as exc:
                report.check(False, claim="read-back inverts q_plane_of", level=q, error=str(exc))
            sol = enumerate_integral_planes(Q.base)
            report.check(sol.dim == fiber_dimension(frame, q), claim="solution dimension",
                         level=q, got=sol.dim, expected=fiber_dimension(frame, q))
            params = [random_rational(rng) for _ in range(sol.dim)]
            for cand in [sol.plane(params)] + [sol.plane([int(s == r) for s in range(sol.dim)]) for r in range(sol.dim)]:
                try:
                    ok = q_plane_of(read_back(cand)) == cand
                except ReadBackError:
                    ok = False
                report.check(ok, claim="q_plane_of inverts read-back", level=q, coefficients=cand.C)
    return report


@lru_cache(maxsize=None)
def _jacobian(frame: Frame) -> dict:
    u = _u_in_v(frame)
    coords = chart_coordinates(frame, ChartId(ADAPTED, frame.k))
    return {key: {c: u[u_var(key)].diff(c) for c in coords} for key in frame.keys()}


def _top_lift(phi: TowerPoint, rng: random.Random) -> TowerPoint:
    frame = phi.frame
    v = dict(phi.v)
    for key in frame.keys_at(frame.k + 1):
        v[key] = random_rational(rng)
    return TowerPoint(frame, frame.k + 1, phi.A, v)


class JetRoute:
    """Push tangent vectors of ``M^k`` at a point into the space of integral elements."""

    def __init__(self, phi_top: TowerPoint):
        self.frame = frame = phi_top.frame
        self.point = phi_top.coords()
        self.coords = chart_coordinates(frame, ChartId(ADAPTED, frame.k))
        self.f = from_adapted(frame, {key: phi_top.v[key] for key in frame.keys()}, phi_top.A)
        self.L, self.R = flag_compose(frame, phi_top.A, self.f)
        self.A = phi_top.A
        jac = _jacobian(frame)
        self.grad = {key: {c: p.value(self.point) for c, p in cols.items() if not p.is_zero()}
                     for key, cols in jac.items()}

    def velocity(self, X: Sequence) -> list[tuple]:
        frame = self.frame
        comp = dict(zip(self.coords, (Fraction(x) for x in X)))
        A_dot = [[comp[a_var(i, j)] for j in range(frame.l)] for i in range(frame.d)]
        f_dot = {key: sum((g * comp[c] for c, g in cols.items() if comp[c]), Fraction(0))
                 for key, cols in self.grad.items()}
        return flag_velocity(frame, self.A, self.f, A_dot, HomPoly(frame, f_dot))

    def pairing_vector(self, X) -> list[Fraction]:
        return [c for row in polar_pairing(self.L, self.velocity(X)) for entry in row for c in entry]

    def modulo_L(self, images: Sequence[Sequence]) -> list[Fraction]:
        """Flattened ``L_dot mod L`` using the normal form with zero ``D_j`` part for ``j < l``."""
        out = []
        for img in images:
            vec = list(img)
            for j, b in enumerate(self.L.basis):
                c = vec[j]
                if c:
                    vec = [x - c * y for x, y in zip(vec, b)]
            out.extend(vec)
        return out


def verify_polar(frame: Frame, rng: random.Random, samples: int = 100) -> Report:
    report = Report("polar", frame.as_dict(), samples=samples)
    k = frame.k
    for _ in range(samples):
        phi = random_point(frame, k, rng)
        lift1, lift2 = _top_lift(phi, rng), _top_lift(phi, rng)
        route = JetRoute(lift1)
        other = JetRoute(lift2)
        report.check(route.L.same_span(other.L), claim="L independent of the lift", point=phi)
        coords = route.coords
        point = phi.coords()
        ncoord = len(coords)
        units = [[Fraction(int(s == t)) for s in range(ncoord)] for t in range(ncoord)]

        # jet-route polar subspace of T M^k, compared with uF^k
        columns = [route.pairing_vector(e) for e in units]
        rows = [list(r) for r in zip(*columns)]
        kernel = nullspace(rows, ncoord) if rows else units
        uF = [X.vector(point, coords) for X in reduced_distribution_basis(phi)]
        report.check(same_row_space(kernel, uF, ncoord), claim="polar subspace equals uF^k", point=phi)

        # injectivity of the differential
        images = [route.modulo_L(route.velocity(e)) for e in units]
        width = len(images[0])
        inj = rank(images, width) == ncoord == integral_plane_dimension(frame, phi.A)
        report.check(inj, claim="differential is injective onto the integral elements", point=phi)

        # individual verdicts
        low = [t for t, c in enumerate(coords) if c[0] == "v" and sum(c[1]) < k]
        top_v = [t for t, c in enumerate(coords) if c[0] == "v" and sum(c[1]) == k]
        candidates = []
        if top_v:
            vert = [Fraction(0)] * ncoord
            for t in top_v:
                vert[t] = random_rational(rng)
            candidates.append(vert)
        polar_vec = [sum((random_rational(rng) * x for x in col), Fraction(0)) for col in zip(*uF)]
        candidates.append(polar_vec)
        if low:
            bad = list(polar_vec)
            for t in low:
                bad[t] += random_rational(rng)
            if not any(bad[t] for t in low):
                bad[low[0]] += 1
            candidates.append(bad)
            vert = [Fraction(0)] * ncoord
            for t in low:
                vert[t] = random_rational(rng)
            if not any(vert):
                vert[low[-1]] = Fraction(1)
            candidates.append(vert)
        for X in candidates:
            images = route.velocity(X)
            if not is_tangent(route.L, images):
                report.check(False, claim="velocity is tangent", vector=X)
                continue
            jet_verdict = polar_membership(route.L, images)
            tower_verdict = in_span(uF, X, ncoord)
            report.check(jet_verdict == tower_verdict, claim="membership verdicts agree",
                         vector=X, jet=jet_verdict, tower=tower_verdict)
            if not any(X[t] for t in range(ncoord) if coords[t][0] == "A"):
                f_dot = {key: sum((g * X[coords.index(c)] for c, g in cols.items()), Fraction(0))
                         for key, cols in route.grad.items()}
                level = filtration_level(HomPoly(frame, f_dot), phi.A)
                report.check((level <= 2) == jet_verdict, claim="vertical velocity is polar iff in mu^2",
                             vector=X, level=level)
    return report


def verify_stabilization(frame: Frame, rng: random.Random, samples: int = 5) -> Report:
    report = Report("stabilization", frame.as_dict(), samples=samples)
    top = frame.k + 1
    for _ in range(samples):
        phi = random_point(frame, top, rng)
        if frame.l > 1:
            sol = enumerate_integral_planes(phi)
            report.check(sol.dim == 0, claim="unique integral plane C = 0 at the top level", got=sol.dim)
        Ds = [make_D(frame, i, j) for i in range(frame.d) for j in range(frame.l)]
        dims = span_closure(Ds, phi.coords())
        report.check(dims[0] == dims[-1] == frame.d * frame.l, claim="span of D is involutive", dims=dims)
        f = HomPoly(frame, {key: random_rational(rng) for key in frame.keys()})
        report.check(not graph_leaf_defects(f), claim="graph of a jet section is an integral leaf", f=f)
    return report


@lru_cache(maxsize=None)
def _symbolic_adapted(frame: Frame) -> dict:
    u = {key: Poly.var(u_var(key)) for key in frame.keys()}
    return adapted_from_trivial(frame, u, symbolic_plane(frame))


def graph_leaf_defects(f: HomPoly) -> list:
    """Keys where some ``D_ij`` fails to annihilate ``v - v_f(A)`` on the graph of ``f``."""
    frame = f.frame
    values = {u_var(key): c for key, c in f.coeffs.items()}
    zeros = {u_var(key): 0 for key in frame.keys() if key not in f.coeffs}
    values.update(zeros)
    graph = {v_var(key): p.evaluate(values) for key, p in _symbolic_adapted(frame).items()}
    defects = []
    for i in range(frame.d):
        for j in range(frame.l):
            D = make_D(frame, i, j)
            for key in frame.keys():
                eq = Poly.var(v_var(key)) - graph[v_var(key)]
                if not D(eq).subs(graph).is_zero():
                    defects.append((i, j, key))
    return defects
