import random
from fractions import Fraction
from itertools import product
from math import comb, factorial as fact

import pytest
from hypothesis import given, strategies as st

from prolongation_lab.poly import Poly, poly_sum
from prolongation_lab.symtensor import (
    Frame,
    HomPoly,
    adapted_by_derivatives,
    filtration_dimension,
    filtration_level,
    from_adapted,
    iterated_derivative,
    monomial,
    plane_vectors,
    restrict,
    to_adapted,
    x_var,
    y_var,
)

from conftest import rationals

SMALL = [Frame(n=n, m=m, l=l, k=k) for n in (2, 3) for l in range(1, n) for m in (1, 2) for k in (1, 2)]


def hompolys(frame):
    return st.lists(rationals(), min_size=len(frame.keys()), max_size=len(frame.keys())).map(
        lambda cs: HomPoly(frame, dict(zip(frame.keys(), cs))))


def planes(frame):
    return st.lists(st.lists(rationals(), min_size=frame.l, max_size=frame.l),
                    min_size=frame.d, max_size=frame.d)


def linear_y_minus_ax(frame, A, i=0):
    return Poly.var(y_var(i)) - poly_sum(Poly.var(x_var(j)) * A[i][j] for j in range(frame.l))


def test_frame_validation():
    with pytest.raises(ValueError):
        Frame(n=2, m=1, l=2, k=1)
    with pytest.raises(ValueError):
        Frame(n=2, m=1, l=1, k=0)
    assert Frame(n=3, m=1, l=1, k=2).d == 2


def test_to_adapted_yx():
    # y x = (y - a x) x + a x^2 ; x^2 carries no 1/lam! on the adapted side
    frame = Frame(n=2, m=1, l=1, k=1)
    f = monomial(frame, (1,), (1,))
    a = Fraction(3)
    v = to_adapted(f, [[a]])
    assert v == {((1,), (1,), 0): 1, ((0,), (2,), 0): a}
    assert ((2,), (0,), 0) not in v
    assert from_adapted(frame, v, [[a]]) == f


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pure_annihilator_power(k):
    # (y - A x)^{k+1} = (k+1)! * [(y - A x)^{k+1} / (k+1)!]
    frame = Frame(n=3, m=1, l=2, k=k)
    A = [[Fraction(2), Fraction(-1, 3)]]
    f = HomPoly.from_polynomials(frame, {0: linear_y_minus_ax(frame, A) ** (k + 1)})
    assert to_adapted(f, A) == {((k + 1,), (0, 0), 0): fact(k + 1)}
    assert filtration_level(f, A) == 1


def test_from_adapted_pure_x():
    frame = Frame(n=2, m=1, l=1, k=2)
    f = from_adapted(frame, {((0,), (3,), 0): 1}, [[Fraction(5)]])
    assert f == monomial(frame, (0,), (3,))
    assert from_adapted(frame, {}, [[1]]).is_zero()
    assert to_adapted(HomPoly.zero(frame), [[1]]) == {}


def test_filtration_examples():
    frame = Frame(n=2, m=1, l=1, k=2)
    assert filtration_level(monomial(frame, (0,), (3,)), [[Fraction(7)]]) == frame.k + 2
    assert filtration_level(HomPoly.zero(frame), [[0]]) == 0
    f = monomial(Frame(n=2, m=1, l=1, k=1), (1,), (1,))
    assert filtration_level(f, [[0]]) == 2


def test_restrict_examples():
    frame = Frame(n=2, m=1, l=1, k=1)
    a = Fraction(-5, 2)
    assert restrict(monomial(frame, (1,), (1,)), [[a]]) == {((2,), 0): a}
    assert restrict(monomial(frame, (0,), (2,)), [[a]]) == {((2,), 0): 1}


@pytest.mark.parametrize("frame", SMALL, ids=str)
def test_restrict_kills_lower_filtration(frame):
    rng = random.Random(1)
    A = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(frame.l)] for _ in range(frame.d)]
    v = {key: Fraction(rng.randint(-5, 5)) for key in frame.keys() if sum(key[1]) <= frame.k}
    assert restrict(from_adapted(frame, v, A), A) == {}


def test_iterated_derivative_examples():
    frame = Frame(n=2, m=1, l=1, k=1)
    x2 = monomial(frame, (0,), (2,))
    xstar = (0, 1)
    assert iterated_derivative(x2, [xstar, xstar]) == {0: Poly.const(2)}
    assert iterated_derivative(x2, [(0, 0)]) == {0: Poly()}


@pytest.mark.parametrize("frame", SMALL, ids=str)
@given(data=st.data())
def test_adapted_round_trip_and_oracle(frame, data):
    f = data.draw(hompolys(frame))
    A = data.draw(planes(frame))
    v = to_adapted(f, A)
    assert from_adapted(frame, v, A) == f
    assert v == adapted_by_derivatives(f, A)
    assert to_adapted(from_adapted(frame, v, A), A) == v


@pytest.mark.parametrize("frame", SMALL, ids=str)
@given(data=st.data())
def test_restrict_is_delta_zero_part(frame, data):
    f = data.draw(hompolys(frame))
    A = data.draw(planes(frame))
    v = to_adapted(f, A)
    expected = {(lam, h): c for (delta, lam, h), c in v.items() if sum(delta) == 0}
    assert restrict(f, A) == expected


@pytest.mark.parametrize("frame", SMALL, ids=str)
@given(data=st.data())
def test_filtration_subadditive(frame, data):
    f, g = data.draw(hompolys(frame)), data.draw(hompolys(frame))
    A = data.draw(planes(frame))
    assert filtration_level(f + g, A) <= max(filtration_level(f, A), filtration_level(g, A))
    assert 0 <= filtration_level(f, A) <= frame.k + 2


@given(data=st.data())
def test_derivative_symmetry(data):
    frame = Frame(n=3, m=2, l=1, k=2)
    f = data.draw(hompolys(frame))
    vec = st.lists(rationals(), min_size=3, max_size=3)
    a, b = data.draw(vec), data.draw(vec)
    assert iterated_derivative(f, [a, b]) == iterated_derivative(f, [b, a])


def _level_by_derivatives(f, A):
    """Smallest p with every p-fold derivative along the plane vanishing."""
    frame = f.frame
    basis = plane_vectors(frame, A)
    for p in range(0, frame.degree + 2):
        if p > frame.degree:
            return p
        if all(all(q.is_zero() for q in iterated_derivative(f, list(seq)).values())
               for seq in product(basis, repeat=p)):
            return p
    raise AssertionError


@pytest.mark.parametrize("frame", [f for f in SMALL if f.m == 1], ids=str)
def test_filtration_matches_derivative_definition_on_monomials(frame):
    A = [[Fraction(i + 2 * j - 1, j + 1) for j in range(frame.l)] for i in range(frame.d)]
    for key in frame.keys():
        for chart in (A, [[0] * frame.l for _ in range(frame.d)]):
            f = from_adapted(frame, {key: 1}, chart)
            assert filtration_level(f, chart) == _level_by_derivatives(f, chart)
            g = HomPoly(frame, {key: 1})
            assert filtration_level(g, chart) == _level_by_derivatives(g, chart)


@pytest.mark.parametrize("frame", SMALL, ids=str)
def test_filtration_dimension(frame):
    d, l, m = frame.d, frame.l, frame.m
    rng = random.Random(2)
    A = [[Fraction(rng.randint(-3, 3)) for _ in range(frame.l)] for _ in range(frame.d)]
    for p in range(0, frame.k + 3):
        expected = m * sum(comb(s + l - 1, l - 1) * comb(frame.degree - s + d - 1, d - 1)
                           for s in range(0, frame.degree + 1) if s < p)
        assert filtration_dimension(frame, p) == expected
        # count the adapted basis elements that land in the p-th step
        count = sum(1 for key in frame.keys() if filtration_level(from_adapted(frame, {key: 1}, A), A) <= p)
        assert count == expected
    assert filtration_dimension(frame, frame.k + 2) == len(frame.keys())


@pytest.mark.parametrize("frame", SMALL, ids=str)
@given(data=st.data())
def test_json_round_trip(frame, data):
    f = data.draw(hompolys(frame))
    assert HomPoly.from_json(f.to_json()) == f


def test_tangency_is_an_equivalence():
    frame = Frame(n=3, m=1, l=2, k=1)
    rng = random.Random(5)
    A = [[Fraction(1, 2), Fraction(-3)]]
    fs = [HomPoly(frame, {key: Fraction(rng.randint(-3, 3)) for key in frame.keys()}) for _ in range(3)]
    low = {key: Fraction(rng.randint(-3, 3)) for key in frame.keys() if sum(key[1]) <= frame.k}
    g = fs[0] + from_adapted(frame, low, A)

    def tangent(p, q):
        return restrict(p - q, A) == {}

    assert tangent(fs[0], fs[0])
    assert tangent(fs[0], g) and tangent(g, fs[0])
    h = g + from_adapted(frame, {key: -c for key, c in low.items()}, A)
    assert tangent(g, h) and tangent(fs[0], h)
    assert not tangent(fs[1], fs[2]) or restrict(fs[1], A) == restrict(fs[2], A)
