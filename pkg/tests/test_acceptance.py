"""Acceptance criteria, exact arithmetic, fixed seed.

Run under pytest (one PASS/FAIL line per criterion is printed to the
terminal) or directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import sys
import time
from math import comb

import pytest

from prolongation_lab import jetmodel, pasting, tower
from prolongation_lab.indexalg import count_multi_indices, random_rational, rank
from prolongation_lab.pasting import NotHolonomic, check_infinitesimal, glue, section_from_jet, violating_sections
from prolongation_lab.suites import job_rng, level_zero_agreement, random_hompoly, run_job
from prolongation_lab.symtensor import Frame

SEED = 0
GRID = [(n, m, k, l) for n in (2, 3) for m in (1, 2) for k in (1, 2, 3) for l in range(1, n)]


def frame_of(n, m, k, l):
    return Frame(n=n, m=m, k=k, l=l)


def _suite_failures(suite, tuples, samples):
    out = []
    for t in tuples:
        report = run_job((suite, t, SEED, samples))
        out += [f"{t}: {f}" for f in report["failures"]]
    return out


def criterion_1():
    """Commutator table on the full grid."""
    return _suite_failures("commutators", GRID, 0)


def criterion_2():
    """Prolongation bijection at 20 points per level."""
    out = []
    for t in GRID:
        frame = frame_of(*t)
        n, m, k, l = t
        d = n - l
        for q in range(2, k + 2):
            closed = m * comb(q + d - 1, d - 1) * comb(k + 1 - q + l - 1, l - 1)
            if tower.fiber_dimension(frame, q) != closed:
                out.append(f"{t}: fiber dimension at q={q}")
        report = tower.verify_prolongation(frame, job_rng(SEED, "prolongation", frame), 20)
        out += [f"{t}: {f}" for f in report.failures]
    return out


def criterion_3():
    """Level-0 solver conditions against instantiated pasting conditions, l >= 2."""
    out = []
    for t in GRID:
        frame = frame_of(*t)
        if frame.l < 2:
            continue
        if not level_zero_agreement(frame):
            out.append(f"{t}: constraint matrices differ")
        size = len(tower.c_keys(frame, 0))
        expected = size - rank(pasting.infinitesimal_constraint_rows(frame), size)
        rng = job_rng(SEED, "criterion3", frame)
        got = tower.enumerate_integral_planes(tower.random_point(frame, 0, rng)).dim
        if got != expected:
            out.append(f"{t}: level-0 solution dim {got} != {expected}")
    return out


POLAR = [(2, 1, 1, 1), (2, 1, 2, 1), (3, 1, 1, 2), (3, 2, 2, 2), (3, 1, 3, 1)]


def criterion_4():
    """Polar identification, 100 samples per tuple."""
    return _suite_failures("polar", POLAR, 100)


def criterion_5():
    """Glue round trip on 100 jets per frame and detection of every single-coordinate violation."""
    out = []
    for t in GRID:
        frame = frame_of(*t)
        rng = job_rng(SEED, "criterion5", frame)
        for _ in range(100):
            f = random_hompoly(frame, rng)
            try:
                if glue(section_from_jet(f)) != f:
                    out.append(f"{t}: round trip changed {f}")
            except Exception as exc:  # any failure to glue is a failure of the criterion
                out.append(f"{t}: glue raised {exc!r}")
        holo = section_from_jet(random_hompoly(frame, rng))
        for label, bad in violating_sections(frame, holo):
            if not check_infinitesimal(bad):
                out.append(f"{t}: check_infinitesimal missed {label}")
            try:
                glue(bad)
                out.append(f"{t}: glue accepted {label}")
            except NotHolonomic:
                pass
    return out


def criterion_6():
    """Stabilization at the top level for l > 1."""
    out = []
    for t in GRID:
        frame = frame_of(*t)
        if frame.l < 2:
            continue
        rng = job_rng(SEED, "stabilization", frame)
        for _ in range(5):
            sol = tower.enumerate_integral_planes(tower.random_point(frame, frame.k + 1, rng))
            if sol.dim != 0 or sol.plane([]).C:
                out.append(f"{t}: top-level solution is not unique C = 0")
        report = tower.verify_stabilization(frame, rng, 5)
        out += [f"{t}: {f}" for f in report.failures]
    return out


def criterion_7():
    """l = 1: no level-0 conditions and fibers of the jet tower of the direction."""
    out = []
    for n in (2, 3):
        for m in (1, 2):
            for k in (1, 2, 3):
                frame = frame_of(n, m, k, 1)
                t = (n, m, k, 1)
                if tower.prolongation_conditions(frame, 0) or pasting.infinitesimal_constraint_rows(frame):
                    out.append(f"{t}: level-0 conditions are not empty")
                d = frame.d
                for q in range(0, k + 2):
                    step = tower.dim_M(frame, q) - tower.dim_M(frame, q - 1)
                    if step != m * count_multi_indices(d, q) or step != m * comb(q + d - 1, d - 1):
                        out.append(f"{t}: fiber at q={q} is {step}")
                rng = job_rng(SEED, "criterion7", frame)
                sol = tower.enumerate_integral_planes(tower.random_point(frame, 0, rng))
                if sol.dim != d * m:
                    out.append(f"{t}: level-0 solution dim {sol.dim} != {d * m}")
    return out


def criterion_8():
    """Curvature of the Cartan distribution against the coordinate rules for Omega."""
    out = []
    for n in (1, 2, 3):
        for m in (1, 2):
            for k in (2, 3):
                rng = random.Random(f"{SEED}:curvature:{n},{m},{k}")
                for _ in range(2):
                    theta = jetmodel.random_jet(rng, n, m, k, random_rational)
                    report = jetmodel.curvature_bracket_check(theta)
                    out += [f"{(n, m, k)}: {f}" for f in report.failures]
    return out


CRITERIA = [
    (1, "commutator table", criterion_1),
    (2, "prolongation bijection", criterion_2),
    (3, "pasting equals level-one prolongation", criterion_3),
    (4, "polar identification", criterion_4),
    (5, "glue round trip and violation detection", criterion_5),
    (6, "stabilization for l > 1", criterion_6),
    (7, "l = 1 degeneracy", criterion_7),
    (8, "metasymplectic consistency", criterion_8),
]


def run_criterion(number, title, fn):
    start = time.perf_counter()
    failures = fn()
    elapsed = time.perf_counter() - start
    status = "PASS" if not failures else "FAIL"
    line = f"{status} criterion {number}: {title} ({len(failures)} failures, {elapsed:.1f}s)"
    return failures, line


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, capsys):
    failures, line = run_criterion(number, title, fn)
    with capsys.disabled():
        print(f"\n{line}")
        for f in failures[:5]:
            print(f"    {f}")
    assert not failures, failures[:5]


if __name__ == "__main__":
    bad = 0
    for number, title, fn in CRITERIA:
        failures, line = run_criterion(number, title, fn)
        print(line, flush=True)
        for f in failures[:5]:
            print(f"    {f}")
        bad += bool(failures)
    sys.exit(1 if bad else 0)
