"""Standard jet-space model: Cartan plane, metasymplectic form, integral elements.

This is the independent oracle for the flag-space tower.  Jet coordinates are
``x_a`` (``a < n``) and ``u^j_sigma`` with ``sigma`` a length-``n`` multi-index.
The Cartan plane at ``theta_k`` has basis ``D_a`` followed by ``d/du^j_sigma``
with ``|sigma| = k``; vectors are tuples in that order.

Flag-space identification: jet direction ``a < l`` is the covector ``x_a`` and
``a >= l`` is ``y_{a-l}``; the top jet coordinate ``u^h_{lam ++ delta}`` is the
trivial coefficient ``u[delta, lam, h]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Mapping, Sequence

from .frames import Derivation, lie_bracket
from .indexalg import (
    enumerate_multi_indices,
    format_rational,
    nullspace,
    parse_rational,
    rank,
    rref,
    shift_down,
    shift_up,
    solve,
    InconsistentSystem,
)
from .poly import Poly
from .report import Report
from .symtensor import Frame, HomPoly, as_plane

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class JetPoint:
    """A jet of order ``order``; missing ``u`` entries are zero."""

    n: int
    m: int
    order: int
    x: tuple = ()
    u: Mapping = field(default_factory=dict)

    def __post_init__(self):
        x = tuple(Fraction(c) for c in self.x) or tuple(Fraction(0) for _ in range(self.n))
        if len(x) != self.n:
            raise ValueError("x must have n entries")
        clean = {}
        for (sigma, j), c in self.u.items():
            sigma = tuple(sigma)
            if len(sigma) != self.n or sum(sigma) > self.order or not 0 <= j < self.m:
                raise ValueError(f"jet coordinate {(sigma, j)} invalid for order {self.order}")
            c = Fraction(c)
            if c:
                clean[(sigma, j)] = c
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", clean)

    def coord(self, sigma, j) -> Fraction:
        return self.u.get((tuple(sigma), j), Fraction(0))

    def top(self) -> dict:
        return {key: c for key, c in self.u.items() if sum(key[0]) == self.order}

    def to_json(self) -> dict:
        return {
            "frame": {"n": self.n, "m": self.m, "order": self.order},
            "x": [format_rational(c) for c in self.x],
            "terms": [{"sigma": list(s), "j": j, "coeff": format_rational(c)} for (s, j), c in sorted(self.u.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "JetPoint":
        fr = data["frame"]
        u = {(tuple(t["sigma"]), int(t["j"])): parse_rational(t["coeff"]) for t in data["terms"]}
        return cls(int(fr["n"]), int(fr["m"]), int(fr["order"]), tuple(parse_rational(c) for c in data["x"]), u)


class CartanSpace:
    """Cartan plane of ``J^k(n, m)`` at a point, with its fixed basis."""

    def __init__(self, n: int, m: int, k: int):
        if n < 1 or m < 1 or k < 1:
            raise ValueError("need n, m, k >= 1")
        self.n, self.m, self.k = n, m, k
        self.labels = [("D", a) for a in range(n)] + [
            ("V", sigma, j) for sigma in enumerate_multi_indices(n, k) for j in range(m)
        ]
        self.index = {label: pos for pos, label in enumerate(self.labels)}
        self.dim = len(self.labels)
        self.omega_labels = [(tau, j) for tau in enumerate_multi_indices(n, k - 1) for j in range(m)]
        self.omega_index = {label: pos for pos, label in enumerate(self.omega_labels)}

    @classmethod
    def of(cls, frame: Frame) -> "CartanSpace":
        return _space(frame.n, frame.m, frame.k)

    def zero(self) -> list[Fraction]:
        return [Fraction(0)] * self.dim

    def basis_vector(self, label) -> Vector:
        v = self.zero()
        v[self.index[label]] = Fraction(1)
        return tuple(v)

    def horizontal(self, v: Sequence) -> tuple:
        return tuple(v[: self.n])

    @cached_property
    def _omega_table(self) -> list:
        """Nonzero structure constants ``(vertical pos, a, omega pos)`` of Omega(d/du_sigma, D_a)."""
        table = []
        for pos, label in enumerate(self.labels):
            if label[0] != "V":
                continue
            _, sigma, j = label
            for a in range(self.n):
                tau = shift_down(sigma, a)
                if tau is not None:
                    table.append((pos, a, self.omega_index[(tau, j)]))
        return table


@lru_cache(maxsize=None)
def _space(n, m, k) -> CartanSpace:
    return CartanSpace(n, m, k)


def metasymplectic(space: CartanSpace, v: Sequence, w: Sequence) -> tuple[Fraction, ...]:
    """``Omega(v, w)`` as coefficients on ``d/du^j_tau`` (``|tau| = k - 1``), i.e. divided monomials."""
    out = [Fraction(0)] * len(space.omega_labels)
    for pos, a, target in space._omega_table:
        c = v[pos] * w[a] - w[pos] * v[a]
        if c:
            out[target] += c
    return tuple(out)


def _is_zero(vec) -> bool:
    return not any(vec)


def is_integral(space: CartanSpace, vectors: Sequence[Sequence]) -> bool:
    return all(_is_zero(metasymplectic(space, a, b)) for a, b in combinations(vectors, 2))


def is_horizontal(space: CartanSpace, vectors: Sequence[Sequence]) -> bool:
    """Transversal to the vertical of ``J^k -> J^{k-1}`` (the ``d/du_sigma`` with ``|sigma| = k``)."""
    hor = [space.horizontal(v) for v in vectors]
    return rank(hor, space.n) == len(vectors)


@dataclass(frozen=True)
class IntegralElement:
    space: CartanSpace
    basis: tuple
    base: JetPoint | None = None

    def __post_init__(self):
        basis = tuple(tuple(Fraction(c) for c in v) for v in self.basis)
        if any(len(v) != self.space.dim for v in basis):
            raise ValueError("basis vectors have the wrong dimension")
        if rank(basis, self.space.dim) != len(basis):
            raise ValueError("basis is linearly dependent")
        if not is_integral(self.space, basis):
            raise ValueError("Omega does not vanish on the span")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        return in_span(self.basis, v, self.space.dim)

    def same_span(self, other: "IntegralElement") -> bool:
        return rref(self.basis, self.space.dim)[0] == rref(other.basis, other.space.dim)[0]


def in_span(basis: Sequence[Sequence], v: Sequence, dim: int) -> bool:
    if not basis:
        return _is_zero(v)
    cols = [list(col) for col in zip(*basis)]
    try:
        solve(cols, list(v), len(basis))
    except InconsistentSystem:
        return False
    return True


# ---------------------------------------------------------------------------
# R-planes and flags
# ---------------------------------------------------------------------------

def r_plane(space: CartanSpace, theta: JetPoint) -> IntegralElement:
    """The R-plane of an order-(k+1) extension: ``D_a + sum u^j_{sigma+1_a} d/du^j_sigma``."""
    if theta.order != space.k + 1 or theta.n != space.n or theta.m != space.m:
        raise ValueError("need a jet of order k + 1 over the same (n, m)")
    rows = []
    for a in range(space.n):
        v = space.zero()
        v[a] = Fraction(1)
        for label in space.labels[space.n:]:
            _, sigma, j = label
            v[space.index[label]] = theta.coord(shift_up(sigma, a), j)
        rows.append(tuple(v))
    return IntegralElement(space, tuple(rows), theta)


def sigma_of(frame: Frame, delta, lam) -> tuple:
    return tuple(lam) + tuple(delta)


def delta_lam_of(frame: Frame, sigma) -> tuple:
    return tuple(sigma[frame.l:]), tuple(sigma[: frame.l])


def jet_of(f: HomPoly, base: JetPoint | None = None) -> JetPoint:
    """The order-(k+1) extension of ``base`` whose top coordinates are ``f`` (origin jet = 0)."""
    frame = f.frame
    u = dict(base.u) if base is not None else {}
    for (delta, lam, h), c in f.coeffs.items():
        u[(sigma_of(frame, delta, lam), h)] = c
    x = base.x if base is not None else ()
    return JetPoint(frame.n, frame.m, frame.k + 1, x, u)


def hompoly_of(frame: Frame, theta: JetPoint) -> HomPoly:
    return HomPoly(frame, {(*delta_lam_of(frame, sigma), j): c for (sigma, j), c in theta.top().items()})


def plane_horizontals(frame: Frame, A) -> list[list]:
    """Horizontal parts ``e_j + sum_i A_ij e_{l+i}`` of the basis of the plane ``A``."""
    rows = []
    for j in range(frame.l):
        w = [Fraction(0)] * frame.n
        w[j] = Fraction(1)
        for i in range(frame.d):
            w[frame.l + i] = Fraction(A[i][j])
        rows.append(w)
    return rows


def _combine(space: CartanSpace, coeffs: Sequence, vectors: Sequence[Sequence]) -> tuple:
    out = space.zero()
    for c, v in zip(coeffs, vectors):
        if c:
            for t, x in enumerate(v):
                if x:
                    out[t] += c * x
    return tuple(out)


def flag_compose(frame: Frame, A, f: HomPoly, base: JetPoint | None = None) -> tuple[IntegralElement, IntegralElement]:
    """``(L, R)`` with ``R = R_f`` and ``L = R`` intersected with the preimage of the plane ``A``."""
    space = CartanSpace.of(frame)
    A = as_plane(frame, A)
    R = r_plane(space, jet_of(f, base))
    L = IntegralElement(space, tuple(_combine(space, w, R.basis) for w in plane_horizontals(frame, A)), R.base)
    return L, R


def flag_decompose(frame: Frame, L: IntegralElement, R: IntegralElement) -> tuple[tuple, HomPoly]:
    space = L.space
    if R.dim != space.n or not is_horizontal(space, R.basis):
        raise ValueError("R is not an R-plane")
    if L.dim != frame.l or not all(R.contains(b) for b in L.basis):
        raise ValueError("L is not an l-dimensional subspace of R")
    # normalise R to horizontal parts e_a
    hor = [list(space.horizontal(r)) for r in R.basis]
    normal = []
    for a in range(space.n):
        target = [Fraction(int(t == a)) for t in range(space.n)]
        coeffs = solve([list(col) for col in zip(*hor)], target, space.n)
        normal.append(_combine(space, coeffs, R.basis))
    top = {}
    for label in space.labels[space.n:]:
        _, sigma, j = label
        for a in range(space.n):
            key = (shift_up(sigma, a), j)
            val = normal[a][space.index[label]]
            if key in top and top[key] != val:
                raise ValueError("R is not integral")
            top[key] = val
    f = hompoly_of(frame, JetPoint(frame.n, frame.m, frame.k + 1, (), top))
    # plane coordinates of the projection of L
    hor_L = [list(space.horizontal(b)) for b in L.basis]
    lead = [row[: frame.l] for row in hor_L]
    if rank(lead, frame.l) != frame.l:
        raise ValueError("projection of L is outside the chart")
    A = [[None] * frame.l for _ in range(frame.d)]
    for j in range(frame.l):
        target = [Fraction(int(t == j)) for t in range(frame.l)]
        coeffs = solve([list(col) for col in zip(*lead)], target, frame.l)
        w = [sum((c * row[t] for c, row in zip(coeffs, hor_L)), Fraction(0)) for t in range(frame.n)]
        for i in range(frame.d):
            A[i][j] = w[frame.l + i]
    return tuple(tuple(r) for r in A), f


def derivative_vertical(space: CartanSpace, f: HomPoly, w: Sequence) -> list[Fraction]:
    """Vertical vector ``df(w)`` in the Cartan basis: coefficient ``sum_a w_a u_{sigma + 1_a}``."""
    theta = jet_of(f)
    out = space.zero()
    for label in space.labels[space.n:]:
        _, sigma, j = label
        out[space.index[label]] = sum(
            (Fraction(w[a]) * theta.coord(shift_up(sigma, a), j) for a in range(space.n) if w[a]), Fraction(0)
        )
    return out


def flag_velocity(frame: Frame, A, f: HomPoly, A_dot, f_dot: HomPoly) -> list[tuple]:
    """Images ``L_dot(b_j)`` of the flag basis from :func:`flag_compose` under the motion ``(A_dot, f_dot)``.

    ``b_j(t) = w_j(t) + df_t(w_j(t))`` is bilinear in ``(A, f)``, so its
    derivative is exact: ``(w_dot_j, df(w_dot_j) + df_dot(w_j))``.
    """
    space = CartanSpace.of(frame)
    W = plane_horizontals(frame, A)
    W_dot = plane_horizontals(frame, A_dot)
    out = []
    for j in range(frame.l):
        w_dot = list(W_dot[j])
        w_dot[j] = Fraction(0)
        vec = [a + b for a, b in zip(derivative_vertical(space, f, w_dot), derivative_vertical(space, f_dot, W[j]))]
        for t in range(space.n):
            vec[t] = w_dot[t]
        out.append(tuple(vec))
    return out


# ---------------------------------------------------------------------------
# polar spaces
# ---------------------------------------------------------------------------

def polar_space(space: CartanSpace, L: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of ``{v : Omega(v, w) = 0 for all w in L}``."""
    rows = []
    for w in L:
        for pos in range(len(space.omega_labels)):
            row = []
            for t in range(space.dim):
                e = [Fraction(0)] * space.dim
                e[t] = Fraction(1)
                row.append(metasymplectic(space, e, w)[pos])
            rows.append(row)
    if not rows:
        return [list(space.basis_vector(label)) for label in space.labels]
    return nullspace(rows, space.dim)


def polar_pairing(L: IntegralElement, L_dot: Sequence[Sequence]) -> list[list[tuple]]:
    """The matrix of ``Omega(b_a, L_dot(b_b))``."""
    return [[metasymplectic(L.space, a, img) for img in L_dot] for a in L.basis]


def is_tangent(L: IntegralElement, L_dot: Sequence[Sequence]) -> bool:
    P = polar_pairing(L, L_dot)
    return all(P[a][b] == P[b][a] for a in range(L.dim) for b in range(a + 1, L.dim))


def polar_membership(L: IntegralElement, L_dot: Sequence[Sequence]) -> bool:
    """Whether ``L_dot`` (images of ``L.basis``) lies in the polar distribution.

    Raises ``ValueError`` if ``L_dot`` is not tangent to the integral elements.
    """
    if len(L_dot) != L.dim:
        raise ValueError("need one image per basis vector of L")
    P = polar_pairing(L, L_dot)
    for a in range(L.dim):
        for b in range(a + 1, L.dim):
            if P[a][b] != P[b][a]:
                raise ValueError("L_dot is not tangent to the space of integral elements")
    return all(_is_zero(P[a][b]) for a in range(L.dim) for b in range(L.dim))


def integral_plane_dimension(frame: Frame, A) -> int:
    """Dimension of horizontal integral l-planes near the plane ``A``, by brute force.

    Unknowns are the vertical parts of ``b_j = w_j + V_j``; integrality is linear
    in them for fixed ``A``.  Returns ``d*l`` plus the nullity.
    """
    space = CartanSpace.of(frame)
    W = plane_horizontals(frame, A)
    nv = space.dim - space.n
    cols = frame.l * nv
    rows = []
    for j1, j2 in combinations(range(frame.l), 2):
        # Omega(w1 + V1, w2 + V2) = Omega(V1, w2) + Omega(w1, V2)
        blocks = {}
        for j, other in ((j1, j2), (j2, j1)):
            sign = 1 if j == j1 else -1
            for t in range(nv):
                e = space.zero()
                e[space.n + t] = Fraction(1)
                w = list(W[other]) + [Fraction(0)] * nv
                blocks[(j, t)] = [sign * c for c in metasymplectic(space, e, w)]
        for pos in range(len(space.omega_labels)):
            row = [Fraction(0)] * cols
            for (j, t), vals in blocks.items():
                row[j * nv + t] += vals[pos]
            rows.append(row)
    nullity = cols - (rank(rows, cols) if rows else 0)
    return frame.d * frame.l + nullity


# ---------------------------------------------------------------------------
# curvature of the Cartan distribution by brackets
# ---------------------------------------------------------------------------

def _jx(a):
    return ("jx", a)


def _ju(sigma, j):
    return ("ju", tuple(sigma), j)


def cartan_fields(n: int, m: int, k: int) -> dict:
    """Sections ``D_a`` (truncated total derivatives) and ``d/du^j_sigma`` (``|sigma| = k``) of the Cartan distribution on ``J^k``."""
    chart = ("jet", n, m, k)
    fields = {}
    for a in range(n):
        comps = {_jx(a): Poly.const(1)}
        for r in range(k):
            for sigma in enumerate_multi_indices(n, r):
                for j in range(m):
                    comps[_ju(sigma, j)] = Poly.var(_ju(shift_up(sigma, a), j))
        fields[("D", a)] = Derivation(chart, comps)
    for sigma in enumerate_multi_indices(n, k):
        for j in range(m):
            fields[("V", sigma, j)] = Derivation(chart, {_ju(sigma, j): 1})
    return fields


def _jet_values(theta: JetPoint) -> dict:
    point = {_jx(a): theta.x[a] for a in range(theta.n)}
    for r in range(theta.order + 1):
        for sigma in enumerate_multi_indices(theta.n, r):
            for j in range(theta.m):
                point[_ju(sigma, j)] = theta.coord(sigma, j)
    return point


def curvature_bracket_check(theta: JetPoint) -> Report:
    """Brackets of Cartan sections modulo the Cartan plane versus the coordinate rules for Omega."""
    n, m, k = theta.n, theta.m, theta.order
    report = Report("oracle.curvature", {"n": n, "m": m, "k": k})
    space = _space(n, m, k)
    fields = cartan_fields(n, m, k)
    point = _jet_values(theta)
    D_at = {a: fields[("D", a)].at(point) for a in range(n)}
    for (a, X), (b, Y) in combinations(fields.items(), 2):
        Z = lie_bracket(X, Y).at(point)
        # subtract the D-part read off the x-components
        for t in range(n):
            c = Z.get(_jx(t), Fraction(0))
            if c:
                for coord, val in D_at[t].items():
                    Z[coord] = Z.get(coord, Fraction(0)) - c * val
        got = [Fraction(0)] * len(space.omega_labels)
        stray = {}
        for coord, val in Z.items():
            if not val:
                continue
            if coord[0] == "ju" and sum(coord[1]) == k:
                continue
            if coord[0] == "ju" and sum(coord[1]) == k - 1:
                got[space.omega_index[(coord[1], coord[2])]] = val
            else:
                stray[repr(coord)] = val
        expected = metasymplectic(space, space.basis_vector(a), space.basis_vector(b))
        ok = not stray and tuple(got) == expected
        report.check(ok, pair=[repr(a), repr(b)], expected=list(expected), got=list(got),
                     stray=stray, status="ok" if ok else "fail")
    return report


def random_jet(rng, n: int, m: int, order: int, draw) -> JetPoint:
    u = {}
    for r in range(order + 1):
        for sigma in enumerate_multi_indices(n, r):
            for j in range(m):
                u[(sigma, j)] = draw(rng)
    return JetPoint(n, m, order, tuple(draw(rng) for _ in range(n)), u)
