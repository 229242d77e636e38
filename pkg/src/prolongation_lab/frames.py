"""Symbolic derivations on the flag-space charts and the frames D, V.

Coordinates are tagged tuples: ``("A", i, j)`` on the Grassmannian chart,
``("u", delta, lam, h)`` in the trivial fiber chart and ``("v", delta, lam, h)``
in the adapted one.  A chart of level ``q`` keeps the ``v`` with ``|delta| <= q``;
level ``k + 1`` is the whole flag space.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from .indexalg import rank, shift_down, shift_up
from .poly import Poly, as_poly
from .report import Report
from .symtensor import (
    Frame,
    a_var,
    adapted_from_trivial,
    symbolic_plane,
    trivial_from_adapted,
)

ADAPTED = "adapted"
TRIVIAL = "trivial"


@dataclass(frozen=True)
class ChartId:
    kind: str
    q: int

    def __post_init__(self):
        if self.kind not in (ADAPTED, TRIVIAL):
            raise ValueError(f"unknown chart kind {self.kind!r}")


def full_chart(frame: Frame, kind: str = ADAPTED) -> ChartId:
    return ChartId(kind, frame.k + 1)


def v_var(key):
    delta, lam, h = key
    return ("v", delta, lam, h)


def u_var(key):
    delta, lam, h = key
    return ("u", delta, lam, h)


@lru_cache(maxsize=None)
def chart_coordinates(frame: Frame, chart: ChartId) -> tuple:
    if not 0 <= chart.q <= frame.k + 1:
        raise ValueError(f"chart level {chart.q} outside 0..{frame.k + 1}")
    base = tuple(a_var(i, j) for i in range(frame.d) for j in range(frame.l))
    if chart.kind == TRIVIAL:
        if chart.q != frame.k + 1:
            raise ValueError("the trivial chart only exists on the full flag space")
        return base + tuple(u_var(key) for key in frame.keys())
    return base + tuple(v_var(key) for key in frame.keys_upto(chart.q))


class Derivation:
    """A vector field with polynomial components on a coordinate chart.

    ``chart`` is any hashable label; for flag-space charts it is a :class:`ChartId`.
    """

    __slots__ = ("chart", "components")

    def __init__(self, chart: Hashable, components: Mapping[Hashable, object]):
        self.chart = chart
        self.components = {}
        for c, p in components.items():
            p = as_poly(p)
            if not p.is_zero():
                self.components[c] = p

    def __call__(self, p) -> Poly:
        p = as_poly(p)
        present = p.variables()
        out = Poly()
        for c, comp in self.components.items():
            if c in present:
                out = out + comp * p.diff(c)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Derivation) and self.chart == other.chart and self.components == other.components

    def __hash__(self):
        return hash((self.chart, frozenset(self.components.items())))

    def __add__(self, other: "Derivation") -> "Derivation":
        _same_chart(self, other)
        out = dict(self.components)
        for c, p in other.components.items():
            out[c] = out.get(c, Poly()) + p
        return Derivation(self.chart, out)

    def __neg__(self) -> "Derivation":
        return Derivation(self.chart, {c: -p for c, p in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "Derivation":
        return Derivation(self.chart, {c: p * factor for c, p in self.components.items()})

    def is_zero(self) -> bool:
        return not self.components

    def at(self, point: Mapping) -> dict:
        """Components evaluated at ``point`` (a coordinate -> value map)."""
        out = {}
        for c, p in self.components.items():
            val = p.value(point)
            if val:
                out[c] = val
        return out

    def vector(self, point: Mapping, coords: Sequence) -> list[Fraction]:
        vals = self.at(point)
        return [vals.get(c, Fraction(0)) for c in coords]

    def describe(self) -> dict:
        return {repr(c): repr(p) for c, p in sorted(self.components.items(), key=lambda t: repr(t[0]))}

    def __repr__(self):
        return f"Derivation({self.chart}, {self.describe()})"


def _same_chart(X: Derivation, Y: Derivation):
    if X.chart != Y.chart:
        raise ValueError(f"chart mismatch: {X.chart} vs {Y.chart}")


def lie_bracket(X: Derivation, Y: Derivation) -> Derivation:
    _same_chart(X, Y)
    out = {}
    for c in set(X.components) | set(Y.components):
        yc = Y.components.get(c)
        xc = X.components.get(c)
        val = Poly()
        if yc is not None:
            val = val + X(yc)
        if xc is not None:
            val = val - Y(xc)
        out[c] = val
    return Derivation(X.chart, out)


def check_chart(frame: Frame, X: Derivation) -> bool:
    """Components and their coefficients only involve coordinates of the chart."""
    coords = set(chart_coordinates(frame, X.chart))
    return all(c in coords and p.variables() <= coords for c, p in X.components.items())


# ---------------------------------------------------------------------------
# the frame fields
# ---------------------------------------------------------------------------

def make_V(frame: Frame, delta, lam, h: int, chart: ChartId | None = None) -> Derivation:
    """The vertical field for ``(y - A x)^delta x^lam e_h / delta!``."""
    chart = chart or full_chart(frame)
    delta, lam = tuple(delta), tuple(lam)
    if sum(delta) + sum(lam) != frame.degree:
        raise ValueError(f"|delta| + |lam| must be {frame.degree}")
    if chart.kind == ADAPTED:
        if sum(delta) > chart.q:
            raise ValueError(f"v{(delta, lam, h)} is not a coordinate at level {chart.q}")
        return Derivation(chart, {v_var((delta, lam, h)): 1})
    comps = _trivial_V_components(frame, (delta, lam, h))
    return Derivation(chart, {u_var(key): p for key, p in comps.items()})


@lru_cache(maxsize=None)
def _trivial_V_components(frame: Frame, key) -> dict:
    return trivial_from_adapted(frame, {key: Fraction(1)}, symbolic_plane(frame))


def make_D(frame: Frame, i: int, j: int, q: int | None = None, kind: str = ADAPTED) -> Derivation:
    """Homogeneous total derivative ``D_ij``, truncated at level ``q`` in the adapted chart."""
    if not (0 <= i < frame.d and 0 <= j < frame.l):
        raise IndexError(f"(i, j) = {(i, j)} out of range for d={frame.d}, l={frame.l}")
    if kind == TRIVIAL:
        return Derivation(full_chart(frame, TRIVIAL), {a_var(i, j): 1})
    q = frame.k + 1 if q is None else q
    chart = ChartId(ADAPTED, q)
    comps: dict = {a_var(i, j): 1}
    for delta, lam, h in frame.keys():
        if sum(delta) < q and lam[j] > 0:
            target = (shift_up(delta, i), shift_down(lam, j), h)
            comps[v_var((delta, lam, h))] = Poly.var(v_var(target))
    return Derivation(chart, comps)


def frame_fields(frame: Frame, chart: ChartId) -> dict:
    """Labelled frame ``{("D", i, j): ..., ("V", delta, lam, h): ...}`` on ``chart``."""
    out = {}
    for i in range(frame.d):
        for j in range(frame.l):
            if chart.kind == TRIVIAL:
                out[("D", i, j)] = make_D(frame, i, j, kind=TRIVIAL)
            else:
                out[("D", i, j)] = make_D(frame, i, j, chart.q)
    keys = frame.keys() if chart.kind == TRIVIAL else frame.keys_upto(chart.q)
    for key in keys:
        out[("V",) + key] = make_V(frame, *key, chart=chart)
    return out


def expected_bracket(frame: Frame, chart: ChartId, a, b) -> Derivation:
    """Right-hand side of the commutation relations for labels ``a``, ``b``."""
    zero = Derivation(chart, {})
    if a[0] == "V" and b[0] == "D":
        _, delta, lam, h = a
        _, i, j = b
        if delta[i] == 0:
            return zero
        return make_V(frame, shift_down(delta, i), shift_up(lam, j), h, chart=chart)
    if a[0] == "D" and b[0] == "V":
        return -expected_bracket(frame, chart, b, a)
    return zero


def verify_commutators(frame: Frame) -> Report:
    """Bracket every pair of frame fields on every chart and compare with the expected values."""
    report = Report("commutators", frame.as_dict())
    charts = [ChartId(ADAPTED, q) for q in range(frame.k + 2)] + [full_chart(frame, TRIVIAL)]
    for chart in charts:
        fields = frame_fields(frame, chart)
        for (a, X), (b, Y) in combinations(fields.items(), 2):
            got = lie_bracket(X, Y)
            expected = expected_bracket(frame, chart, a, b)
            if got != expected:
                report.check(False, pair=[repr(a), repr(b)], chart=[chart.kind, chart.q],
                             expected=expected.describe(), got=got.describe(), status="fail")
            else:
                report.checks += 1
    return report


def span_closure(fields: Iterable[Derivation], point: Mapping, coords: Sequence | None = None) -> list[int]:
    """Dimensions of the iterated derived spans at ``point``.

    Starts with the span of ``fields``; each step adds all brackets of the
    current generators.  Stops once the dimension stops growing; the last
    entry repeats the stable value.
    """
    gens: list[Derivation] = []
    for X in fields:
        if not X.is_zero() and X not in gens:
            gens.append(X)
    if coords is None:
        coords = sorted({c for X in gens for c in X.components}, key=repr)

    def dim():
        return rank([X.vector(point, coords) for X in gens], len(coords)) if gens else 0

    dims = [dim()]
    seen_pairs: set = set()
    while True:
        new = []
        for a, b in combinations(range(len(gens)), 2):
            if (a, b) in seen_pairs:
                continue
            seen_pairs.add((a, b))
            Z = lie_bracket(gens[a], gens[b])
            if not Z.is_zero() and Z not in gens and Z not in new and -Z not in gens and -Z not in new:
                new.append(Z)
        gens.extend(new)
        dims.append(dim())
        if dims[-1] == dims[-2]:
            return dims


def flag_dimension(frame: Frame, p: int) -> int:
    """Closed-form dimension of the p-th higher flag distribution on the flag space."""
    from .indexalg import count_multi_indices

    d, l = frame.d, frame.l
    return d * l + frame.m * sum(
        count_multi_indices(d, frame.degree - s) * count_multi_indices(l, s) for s in range(0, p + 1)
    )


def higher_flag_fields(frame: Frame, p: int) -> list[Derivation]:
    """Frame of the p-th higher flag distribution: all ``D_ij`` and ``V`` with ``|lam| <= p``."""
    fields = frame_fields(frame, full_chart(frame))
    return [X for label, X in fields.items() if label[0] == "D" or sum(label[2]) <= p]


# ---------------------------------------------------------------------------
# trivial <-> adapted
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _u_in_v(frame: Frame) -> dict:
    """Trivial coordinates as polynomials in the adapted ones (and A)."""
    v = {key: Poly.var(v_var(key)) for key in frame.keys()}
    return {u_var(key): p for key, p in trivial_from_adapted(frame, v, symbolic_plane(frame)).items()}


@lru_cache(maxsize=None)
def _v_in_u(frame: Frame) -> dict:
    u = {key: Poly.var(u_var(key)) for key in frame.keys()}
    return {v_var(key): p for key, p in adapted_from_trivial(frame, u, symbolic_plane(frame)).items()}


def trivial_to_adapted(frame: Frame, X: Derivation) -> Derivation:
    """Express a trivial-chart derivation in adapted coordinates."""
    if X.chart != full_chart(frame, TRIVIAL):
        raise ValueError("expected a derivation on the trivial chart")
    u_sub = _u_in_v(frame)
    v_of_u = _v_in_u(frame)
    comps = {}
    for i in range(frame.d):
        for j in range(frame.l):
            comps[a_var(i, j)] = X.components.get(a_var(i, j), Poly()).subs(u_sub)
    for key in frame.keys():
        c = v_var(key)
        comps[c] = X(v_of_u.get(c, Poly())).subs(u_sub)
    return Derivation(full_chart(frame), comps)


def chart_point(frame: Frame, A, v: Mapping, q: int | None = None) -> dict:
    """Coordinate map for an adapted-chart point of level ``q``; missing ``v`` are zero."""
    q = frame.k + 1 if q is None else q
    point = {a_var(i, j): Fraction(A[i][j]) for i in range(frame.d) for j in range(frame.l)}
    for key in frame.keys_upto(q):
        point[v_var(key)] = Fraction(v.get(key, 0))
    return point
