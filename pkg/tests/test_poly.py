from fractions import Fraction

from hypothesis import given, strategies as st

from prolongation_lab.poly import Poly, poly_sum

from conftest import rationals

X, Y, Z = (Poly.var(v) for v in ("x", "y", "z"))


def polys():
    term = st.tuples(rationals(), st.integers(0, 2), st.integers(0, 2))
    return st.lists(term, max_size=4).map(lambda ts: poly_sum(c * X ** a * Y ** b for c, a, b in ts))


def test_basic_arithmetic():
    p = (X + Y) ** 2
    assert p == X * X + 2 * X * Y + Y * Y
    assert (p - p).is_zero()
    assert Poly.const(3) == 3
    assert (X / 2).terms == {(("x", 1),): Fraction(1, 2)}


def test_diff_and_subs():
    p = X ** 3 * Y + 2 * Y
    assert p.diff("x") == 3 * X ** 2 * Y
    assert p.diff("z").is_zero()
    assert p.subs({"x": Y, "y": X}) == Y ** 3 * X + 2 * X
    assert p.value({"x": 2, "y": Fraction(1, 2)}) == 5
    assert p.evaluate({"y": 1}) == X ** 3 + 2


def test_split_and_linear_form():
    p = 3 * X * Z + Y * Z - X
    parts = p.split(lambda v: v == "z")
    assert parts[(("z", 1),)] == 3 * X + Y
    assert parts[()] == -X
    assert (2 * X - Y).linear_form() == {"x": 2, "y": -1}


@given(polys(), polys(), polys())
def test_ring_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a


@given(polys(), polys())
def test_leibniz(a, b):
    assert (a * b).diff("x") == a.diff("x") * b + a * b.diff("x")


@given(polys(), polys())
def test_subs_is_a_homomorphism(a, b):
    m = {"x": Y + 1, "y": X - Y}
    assert (a * b).subs(m) == a.subs(m) * b.subs(m)
