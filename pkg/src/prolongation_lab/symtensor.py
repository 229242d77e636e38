"""Homogeneous N-valued polynomials on R and their two coefficient charts.

A degree-(k+1) polynomial ``f`` is stored by its *trivial* coefficients
``u[delta, lam, h]``, dual to the divided powers ``y^delta x^lam e_h / (delta! lam!)``.
For a plane with chart coordinates ``A`` (``d x l``), the *adapted*
coefficients ``v[delta, lam, h]`` are taken against
``(y - A x)^delta x^lam e_h / delta!`` -- no ``1/lam!`` on this side.

Indices are 0-based throughout.  Vectors of R are written in the basis dual
to ``(y_1..y_d, x_1..x_l)``, i.e. as tuples of length ``n = d + l`` with the
y-components first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence, Union

from .indexalg import (
    count_multi_indices,
    enumerate_multi_indices,
    factorial,
    format_rational,
    parse_rational,
)
from .poly import Poly, as_poly, poly_sum

Key = tuple[tuple[int, ...], tuple[int, ...], int]
Scalar = Union[Fraction, int]


@dataclass(frozen=True)
class Frame:
    """Parameters ``n, m, l, k`` with ``1 <= l < n``; ``d = n - l``."""

    n: int
    m: int
    l: int
    k: int

    def __post_init__(self):
        if not (1 <= self.l < self.n):
            raise ValueError(f"need 1 <= l < n, got l={self.l}, n={self.n}")
        if self.k < 1:
            raise ValueError(f"need k >= 1, got k={self.k}")
        if self.m < 1:
            raise ValueError(f"need m >= 1, got m={self.m}")

    @property
    def d(self) -> int:
        return self.n - self.l

    @property
    def degree(self) -> int:
        return self.k + 1

    def keys(self) -> tuple[Key, ...]:
        return _frame_keys(self)

    def keys_at(self, q: int) -> tuple[Key, ...]:
        """Keys with ``|delta| == q``."""
        return tuple(key for key in self.keys() if sum(key[0]) == q)

    def keys_upto(self, q: int) -> tuple[Key, ...]:
        return tuple(key for key in self.keys() if sum(key[0]) <= q)

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "l": self.l, "k": self.k}


@lru_cache(maxsize=None)
def _frame_keys(frame: Frame) -> tuple[Key, ...]:
    d = frame.d
    return tuple(
        (sigma[:d], sigma[d:], h)
        for sigma in enumerate_multi_indices(frame.n, frame.degree)
        for h in range(frame.m)
    )


def y_var(i: int):
    return ("y", i)


def x_var(j: int):
    return ("x", j)


def z_var(i: int):
    return ("z", i)


def a_var(i: int, j: int):
    return ("A", i, j)


def symbolic_plane(frame: Frame) -> tuple[tuple[Poly, ...], ...]:
    return tuple(tuple(Poly.var(a_var(i, j)) for j in range(frame.l)) for i in range(frame.d))


def zero_plane(frame: Frame) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(0) for _ in range(frame.l)) for _ in range(frame.d))


PlaneCoords = Sequence[Sequence[Union[Scalar, Poly]]]


def as_plane(frame: Frame, A) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(tuple(Fraction(x) for x in row) for row in A)
    if len(rows) != frame.d or any(len(r) != frame.l for r in rows):
        raise ValueError(f"plane coordinates must be {frame.d}x{frame.l}")
    return rows


# ---------------------------------------------------------------------------
# HomPoly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomPoly:
    frame: Frame
    coeffs: Mapping[Key, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        deg = self.frame.degree
        for (delta, lam, h), c in self.coeffs.items():
            delta, lam = tuple(delta), tuple(lam)
            if len(delta) != self.frame.d or len(lam) != self.frame.l:
                raise ValueError(f"bad multi-index shape {(delta, lam)}")
            if sum(delta) + sum(lam) != deg or not 0 <= h < self.frame.m:
                raise ValueError(f"key {(delta, lam, h)} is not of degree {deg}")
            c = Fraction(c)
            if c:
                clean[(delta, lam, h)] = c
        object.__setattr__(self, "coeffs", clean)

    def __eq__(self, other):
        return isinstance(other, HomPoly) and self.frame == other.frame and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.frame, frozenset(self.coeffs.items())))

    def __add__(self, other: "HomPoly") -> "HomPoly":
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0) + c
        return HomPoly(self.frame, out)

    def __neg__(self):
        return HomPoly(self.frame, {key: -c for key, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return HomPoly(self.frame, {key: v * Fraction(c) for key, v in self.coeffs.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coeffs

    @classmethod
    def zero(cls, frame: Frame) -> "HomPoly":
        return cls(frame, {})

    @classmethod
    def from_polynomials(cls, frame: Frame, polys: Mapping[int, Poly]) -> "HomPoly":
        """From ordinary polynomials in ``("y", i)``, ``("x", j)``, one per normal index."""
        return cls(frame, {key: as_poly(c).constant_value() for key, c in _read_trivial(frame, polys).items()})

    def polynomials(self) -> dict[int, Poly]:
        return trivial_polynomials(self.frame, self.coeffs)

    def to_json(self) -> dict:
        return {
            "frame": self.frame.as_dict(),
            "terms": [
                {"delta": list(delta), "lambda": list(lam), "h": h, "coeff": format_rational(c)}
                for (delta, lam, h), c in sorted(self.coeffs.items(), key=lambda t: _key_order(self.frame)[t[0]])
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "HomPoly":
        frame = Frame(**{k: int(data["frame"][k]) for k in ("n", "m", "l", "k")})
        coeffs = {}
        for term in data["terms"]:
            key = (tuple(term["delta"]), tuple(term["lambda"]), int(term["h"]))
            coeffs[key] = coeffs.get(key, 0) + parse_rational(term["coeff"])
        return cls(frame, coeffs)


@lru_cache(maxsize=None)
def _key_order(frame: Frame) -> dict:
    return {key: pos for pos, key in enumerate(frame.keys())}


def monomial(frame: Frame, delta, lam, h: int = 0, coeff=1) -> HomPoly:
    """The plain monomial ``coeff * y^delta x^lam e_h`` (not divided)."""
    delta, lam = tuple(delta), tuple(lam)
    return HomPoly(frame, {(delta, lam, h): Fraction(coeff) * factorial(delta) * factorial(lam)})


# ---------------------------------------------------------------------------
# chart changes (generic: values may be Fractions or Polys)
# ---------------------------------------------------------------------------

def _ypow(delta, var=y_var):
    return [(var(i), e) for i, e in enumerate(delta) if e]


def _xpow(lam):
    return [(x_var(j), e) for j, e in enumerate(lam) if e]


def _mono(*parts) -> tuple:
    return tuple(sorted(p for part in parts for p in part))


def trivial_polynomials(frame: Frame, coeffs: Mapping[Key, object]) -> dict[int, Poly]:
    """``sum u / (delta! lam!) y^delta x^lam`` per normal index; values may be Polys."""
    out: dict[int, list] = {h: [] for h in range(frame.m)}
    for (delta, lam, h), c in coeffs.items():
        basis = Poly._raw({_mono(_ypow(delta), _xpow(lam)): Fraction(1, factorial(delta) * factorial(lam))})
        out[h].append(basis * c)
    return {h: poly_sum(items) for h, items in out.items()}


def _is_rx(v) -> bool:
    return v[0] in ("y", "x", "z")


def _read_trivial(frame: Frame, polys: Mapping[int, Poly]) -> dict[Key, object]:
    """Inverse of :func:`trivial_polynomials`; coefficient polys returned as Polys."""
    d, l = frame.d, frame.l
    out = {}
    for h, p in polys.items():
        for outer, inner in p.split(_is_rx).items():
            exps = dict(outer)
            delta = tuple(exps.get(y_var(i), 0) for i in range(d))
            lam = tuple(exps.get(x_var(j), 0) for j in range(l))
            if sum(delta) + sum(lam) != frame.degree or len(exps) != sum(1 for e in delta + lam if e):
                raise ValueError(f"not homogeneous of degree {frame.degree}: {outer}")
            out[(delta, lam, h)] = inner * (factorial(delta) * factorial(lam))
    return out


def adapted_from_trivial(frame: Frame, u: Mapping[Key, object], A: PlaneCoords) -> dict[Key, Poly]:
    """Adapted coefficients of the polynomial with trivial coefficients ``u`` at plane ``A``.

    Substitutes ``y_i = z_i + sum_j A_ij x_j`` and reads ``v = delta! * [z^delta x^lam]``.
    Entries of ``u`` and ``A`` may be Polys in unrelated variables.
    """
    d, l = frame.d, frame.l
    shift = {
        y_var(i): Poly.var(z_var(i)) + poly_sum(as_poly(A[i][j]) * Poly.var(x_var(j)) for j in range(l))
        for i in range(d)
    }
    out: dict[Key, Poly] = {}
    for h, p in trivial_polynomials(frame, u).items():
        for outer, inner in p.subs(shift).split(_is_rx).items():
            exps = dict(outer)
            delta = tuple(exps.get(z_var(i), 0) for i in range(d))
            lam = tuple(exps.get(x_var(j), 0) for j in range(l))
            out[(delta, lam, h)] = inner * factorial(delta)
    return out


def trivial_from_adapted(frame: Frame, v: Mapping[Key, object], A: PlaneCoords) -> dict[Key, Poly]:
    """Inverse of :func:`adapted_from_trivial`: expand ``sum v / delta! (y - A x)^delta x^lam``."""
    d, l = frame.d, frame.l
    annihilators = [
        Poly.var(y_var(i)) - poly_sum(as_poly(A[i][j]) * Poly.var(x_var(j)) for j in range(l))
        for i in range(d)
    ]
    cache: dict = {}

    def power(i, e):
        if (i, e) not in cache:
            cache[(i, e)] = annihilators[i] ** e
        return cache[(i, e)]

    polys: dict[int, list] = {h: [] for h in range(frame.m)}
    for (delta, lam, h), c in v.items():
        c = as_poly(c)
        if c.is_zero():
            continue
        term = Poly._raw({_mono(_xpow(lam)): Fraction(1, factorial(delta))}) * c
        for i, e in enumerate(delta):
            if e:
                term = term * power(i, e)
        polys[h].append(term)
    return {key: c for key, c in _read_trivial(frame, {h: poly_sum(t) for h, t in polys.items()}).items()
            if not as_poly(c).is_zero()}


def _constants(values: Mapping[Key, Poly]) -> dict[Key, Fraction]:
    out = {}
    for key, c in values.items():
        c = as_poly(c).constant_value()
        if c:
            out[key] = c
    return out


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def to_adapted(f: HomPoly, A: PlaneCoords) -> dict[Key, Fraction]:
    return _constants(adapted_from_trivial(f.frame, f.coeffs, as_plane(f.frame, A)))


def from_adapted(frame: Frame, v: Mapping[Key, Scalar], A: PlaneCoords) -> HomPoly:
    for delta, lam, h in v:
        if sum(delta) + sum(lam) != frame.degree:
            raise ValueError(f"adapted key {(delta, lam, h)} is not of degree {frame.degree}")
    return HomPoly(frame, _constants(trivial_from_adapted(frame, v, as_plane(frame, A))))


def filtration_level(f: HomPoly, A: PlaneCoords) -> int:
    """Smallest ``p`` with ``f`` in the p-th filtration step at ``A``."""
    v = to_adapted(f, A)
    if not v:
        return 0
    return 1 + max(sum(lam) for _, lam, _ in v)


def filtration_dimension(frame: Frame, p: int) -> int:
    """Dimension of the p-th filtration step (independent of the plane)."""
    d, l = frame.d, frame.l
    return frame.m * sum(
        count_multi_indices(d, frame.degree - s) * count_multi_indices(l, s)
        for s in range(0, min(p, frame.degree + 1))
    )


def restrict(f: HomPoly, A: PlaneCoords) -> dict[tuple[tuple[int, ...], int], Fraction]:
    """Restriction to the plane ``A``: ``{(lam, h): coefficient of x^lam}`` (plain monomials)."""
    A = as_plane(f.frame, A)
    d, l = f.frame.d, f.frame.l
    sub = {y_var(i): poly_sum(Poly.const(A[i][j]) * Poly.var(x_var(j)) for j in range(l)) for i in range(d)}
    out = {}
    for h, p in f.polynomials().items():
        for mono, c in p.subs(sub).terms.items():
            exps = dict(mono)
            out[(tuple(exps.get(x_var(j), 0) for j in range(l)), h)] = c
    return out


def directional_derivative(frame: Frame, p: Poly, vector: Sequence) -> Poly:
    d = frame.d
    out = Poly()
    for t, c in enumerate(vector):
        if c:
            var = y_var(t) if t < d else x_var(t - d)
            out = out + p.diff(var) * c
    return out


def iterated_derivative(f: HomPoly, vectors: Sequence[Sequence]) -> dict[int, Poly]:
    """``d_{w_1} ... d_{w_r} f`` per normal index, as polynomials in ``y``, ``x``."""
    if len(vectors) > f.frame.degree:
        raise ValueError("more derivatives than the degree")
    out = {}
    for h, p in f.polynomials().items():
        for w in vectors:
            if len(w) != f.frame.n:
                raise ValueError(f"vector must have length {f.frame.n}")
            p = directional_derivative(f.frame, p, w)
        out[h] = p
    return out


def plane_vectors(frame: Frame, A: PlaneCoords) -> list[tuple[Fraction, ...]]:
    """Basis of the plane with coordinates ``A``: ``x*_j + sum_i A_ij y*_i``."""
    A = as_plane(frame, A)
    return [
        tuple(A[i][j] for i in range(frame.d)) + tuple(Fraction(int(t == j)) for t in range(frame.l))
        for j in range(frame.l)
    ]


def adapted_by_derivatives(f: HomPoly, A: PlaneCoords) -> dict[Key, Fraction]:
    """Adapted coefficients via the dual basis: ``v = d_y^delta d_X^lam f / lam!``.

    ``X_j = x*_j + sum_i A_ij y*_i``.  Independent of :func:`to_adapted`; used as an oracle.
    """
    frame = f.frame
    X = plane_vectors(frame, A)
    Y = [tuple(Fraction(int(t == i)) for t in range(frame.n)) for i in range(frame.d)]
    out = {}
    for (delta, lam, h) in frame.keys():
        vecs = [Y[i] for i, e in enumerate(delta) for _ in range(e)] + [X[j] for j, e in enumerate(lam) for _ in range(e)]
        p = f.polynomials()[h]
        for w in vecs:
            p = directional_derivative(frame, p, w)
        c = p.constant_value() / factorial(lam)
        if c:
            out[(delta, lam, h)] = c
    return out

