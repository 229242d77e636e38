import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prolongation_lab.indexalg import random_rational
from prolongation_lab.pasting import (
    NotHolonomic,
    Section,
    check_global,
    check_infinitesimal,
    first_jet_in_equation,
    glue,
    infinitesimal_constraint_rows,
    section_from_jet,
    section_keys,
    violating_sections,
    verify_pasting,
)
from prolongation_lab.poly import Poly
from prolongation_lab.symtensor import Frame, HomPoly, a_var, restrict

from conftest import rationals

F = Frame(n=3, m=1, l=2, k=1)
GRID = [Frame(n=n, m=m, l=l, k=k) for n in (2, 3) for l in range(1, n) for m in (1, 2) for k in (1, 2)]


def A_(i, j):
    return Poly.var(a_var(i, j))


def random_jet(frame, rng):
    return HomPoly(frame, {key: random_rational(rng) for key in frame.keys()})


def test_section_from_jet_example():
    f = HomPoly(F, {((1,), (1, 0), 0): 1})
    s = section_from_jet(f)
    assert s.values == {((2, 0), 0): A_(0, 0), ((1, 1), 0): A_(0, 1)}
    assert not check_infinitesimal(s)


def test_vanishing_family_violation():
    s = Section(F, {((2, 0), 0): A_(0, 1)})
    bad = check_infinitesimal(s)
    assert [b["kind"] for b in bad] == ["zero"]
    assert bad[0]["j"] == 1 and bad[0]["lambda"] == (2, 0)
    with pytest.raises(NotHolonomic):
        glue(s)


def test_equality_family_violation():
    # d v_(2,0)/dA_00 = 1 but d v_(1,1)/dA_01 = 0
    s = Section(F, {((2, 0), 0): A_(0, 0)})
    assert {b["kind"] for b in check_infinitesimal(s)} == {"eq"}
    with pytest.raises(NotHolonomic):
        glue(s)
    fixed = s + Section(F, {((1, 1), 0): A_(0, 1)})
    assert not check_infinitesimal(fixed)
    assert glue(fixed) == HomPoly(F, {((1,), (1, 0), 0): 1})


def test_zero_and_constant_sections():
    assert glue(Section(F, {})) == HomPoly(F, {})
    const = Section(F, {((1, 1), 0): Fraction(3)})
    assert not check_infinitesimal(const)
    # constant sections come from pure x-jets
    assert glue(const).coeffs == {((0,), (1, 1), 0): Fraction(3)}


def test_section_rejects_bad_input():
    with pytest.raises(ValueError):
        Section(F, {((3, 0), 0): 1})
    with pytest.raises(ValueError):
        Section(F, {((2, 0), 0): Poly.var(("x", 0))})


@pytest.mark.parametrize("frame", GRID, ids=str)
def test_jet_sections_are_restrictions(frame):
    rng = random.Random(1)
    f = random_jet(frame, rng)
    s = section_from_jet(f)
    for _ in range(3):
        A = [[random_rational(rng) for _ in range(frame.l)] for _ in range(frame.d)]
        assert s.at(A) == {key: c for key, c in restrict(f, A).items() if c}


@pytest.mark.parametrize("frame", GRID, ids=str)
def test_glue_round_trip(frame):
    rng = random.Random(2)
    for _ in range(5):
        f = random_jet(frame, rng)
        s = section_from_jet(f)
        assert not check_infinitesimal(s)
        assert glue(s) == f


@pytest.mark.parametrize("frame", [f for f in GRID if f.l > 1], ids=str)
def test_violations_detected(frame):
    rng = random.Random(3)
    holo = section_from_jet(random_jet(frame, rng))
    bads = violating_sections(frame, holo)
    assert bads
    for label, bad in bads:
        assert check_infinitesimal(bad), label
        with pytest.raises(NotHolonomic):
            glue(bad)
        A = [[random_rational(rng) for _ in range(frame.l)] for _ in range(frame.d)]
        assert not first_jet_in_equation(bad, A)


@pytest.mark.parametrize("frame", GRID, ids=str)
def test_global_implies_infinitesimal(frame):
    rng = random.Random(4)
    s = section_from_jet(random_jet(frame, rng))
    planes = [[[random_rational(rng) for _ in range(frame.l)] for _ in range(frame.d)] for _ in range(3)]
    assert all(check_global(s, P, Q) for P in planes for Q in planes)
    assert not check_infinitesimal(s)
    for _, bad in violating_sections(frame)[:3]:
        assert not all(check_global(bad, P, Q) for P in planes for Q in planes)


def test_l_one_conditions_are_vacuous():
    for frame in [f for f in GRID if f.l == 1]:
        assert infinitesimal_constraint_rows(frame) == []
        assert violating_sections(frame) == []
        # any polynomial section is holonomic; only degree matters for gluing
        s = Section(frame, {((frame.degree,), 0): A_(0, 0) ** 2})
        assert not check_infinitesimal(s)
        assert section_from_jet(glue(s)) == s


@settings(max_examples=25)
@given(st.lists(rationals(5, 4), min_size=8, max_size=8), st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_holonomic_iff_gluable(coeffs, bumps):
    frame = F
    f = HomPoly(frame, dict(zip(frame.keys(), coeffs)))
    s = section_from_jet(f)
    for flag, (_, bad) in zip(bumps, violating_sections(frame)):
        if flag:
            s = s + bad
    holonomic = not check_infinitesimal(s)
    try:
        glued = glue(s)
        gluable = True
    except NotHolonomic:
        gluable = False
    assert holonomic == gluable
    if gluable:
        assert section_from_jet(glued) == s


def test_section_json_round_trip():
    s = section_from_jet(random_jet(Frame(n=3, m=2, l=2, k=2), random.Random(5)))
    assert Section.from_json(s.to_json()) == s
    assert len(section_keys(Frame(n=3, m=2, l=2, k=2))) == 4 * 2


@pytest.mark.parametrize("frame", GRID[:4], ids=str)
def test_verify_pasting(frame):
    report = verify_pasting(frame, random.Random(6), 4)
    assert report.passed, report.failures[:2]
