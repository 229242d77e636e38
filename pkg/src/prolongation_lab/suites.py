"""Named verification suites and the job runner used by the command line."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from . import frames, jetmodel, pasting, tower
from .indexalg import count_multi_indices, random_rational
from .report import Report
from .symtensor import (
    Frame,
    HomPoly,
    adapted_by_derivatives,
    as_plane,
    from_adapted,
    to_adapted,
)

SUITE_NAMES = ("commutators", "prolongation", "polar", "pasting", "stabilization", "oracle")


def job_rng(seed: int, suite: str, frame: Frame) -> random.Random:
    return random.Random(f"{seed}:{suite}:{frame.n},{frame.m},{frame.k},{frame.l}")


def random_hompoly(frame: Frame, rng: random.Random) -> HomPoly:
    return HomPoly(frame, {key: random_rational(rng) for key in frame.keys()})


def random_plane(frame: Frame, rng: random.Random) -> list:
    return [[random_rational(rng) for _ in range(frame.l)] for _ in range(frame.d)]


def level_zero_agreement(frame: Frame) -> bool:
    """Level-0 solver conditions equal the instantiated pasting conditions, up to row order."""
    keys = pasting.derivative_keys(frame)
    index = {key: pos for pos, key in enumerate(keys)}
    rows = set()
    for row in tower.prolongation_conditions(frame, 0):
        vec = [Fraction(0)] * len(keys)
        for (delta, lam, i, j, h), c in zip(tower.c_keys(frame, 0), row):
            vec[index[(lam, i, j, h)]] = c
        lead = next(c for c in vec if c)
        rows.add(tuple(c / lead for c in vec))
    return sorted(rows, reverse=True) == pasting.infinitesimal_constraint_rows(frame)


def verify_dimensions(frame: Frame, rng: random.Random, samples: int = 3) -> Report:
    """Solver dimensions against closed forms, level by level, including level 0."""
    report = Report("dimensions", frame.as_dict(), samples=samples)
    k, m, d, l = frame.k, frame.m, frame.d, frame.l
    report.check(tower.dim_M(frame, k + 1) == d * l + tower.dimension_table(frame)["top_jet_fiber"],
                 claim="top level is the Grassmannian times the top jet fiber")
    report.check(tower.dim_M(frame, -1) == d * l, claim="level -1 is the Grassmannian")
    report.check(level_zero_agreement(frame), claim="level-0 conditions equal the pasting conditions")
    if l == 1:
        report.check(not tower.prolongation_conditions(frame, 0), claim="no level-0 conditions when l = 1")
        for q in range(0, k + 2):
            report.check(tower.fiber_dimension(frame, q) == m * count_multi_indices(d, q),
                         claim="fiber equals jets of dir", level=q)
    for _ in range(samples):
        for b in range(0, k + 1):
            phi = tower.random_point(frame, b, rng)
            sol = tower.enumerate_integral_planes(phi)
            report.check(sol.dim == tower.fiber_dimension(frame, b + 1), claim="solution dimension",
                         level=b + 1, got=sol.dim, expected=tower.fiber_dimension(frame, b + 1))
        phi = tower.random_point(frame, k, rng)
        got = jetmodel.integral_plane_dimension(frame, phi.A)
        report.check(got == tower.dim_M(frame, k), claim="integral elements by brute force",
                     got=got, expected=tower.dim_M(frame, k))
    return report


def verify_oracle(frame: Frame, rng: random.Random, samples: int = 10) -> Report:
    report = Report("oracle", frame.as_dict(), samples=samples)
    space = jetmodel.CartanSpace.of(frame)
    for _ in range(samples):
        f = random_hompoly(frame, rng)
        A = random_plane(frame, rng)
        v = to_adapted(f, A)
        report.check(v == adapted_by_derivatives(f, A), claim="adapted coefficients by derivatives", f=f, A=A)
        report.check(from_adapted(frame, v, A) == f, claim="adapted round trip", f=f, A=A)
        L, R = jetmodel.flag_compose(frame, A, f)
        report.check(jetmodel.is_integral(space, R.basis), claim="R-plane is integral")
        A2, f2 = jetmodel.flag_decompose(frame, L, R)
        report.check(A2 == as_plane(frame, A) and f2 == f,
                     claim="flag round trip", f=f, A=A)
    theta = jetmodel.random_jet(rng, frame.n, frame.m, frame.k, random_rational)
    report.merge(jetmodel.curvature_bracket_check(theta))
    # trivial-chart frame fields expressed adaptedly
    trivial = frames.full_chart(frame, frames.TRIVIAL)
    for key in frame.keys():
        X = frames.make_V(frame, *key, chart=trivial)
        ok = frames.trivial_to_adapted(frame, X) == frames.make_V(frame, *key)
        report.check(ok, claim="trivial V equals adapted V", key=key)
    for i in range(frame.d):
        for j in range(frame.l):
            ok = frames.trivial_to_adapted(frame, frames.make_D(frame, i, j, kind=frames.TRIVIAL)) == frames.make_D(frame, i, j)
            report.check(ok, claim="trivial D equals adapted D", i=i, j=j)
    return report


def _commutators(frame, rng, samples):
    return frames.verify_commutators(frame)


SUITES: dict[str, Callable[[Frame, random.Random, int], Report]] = {
    "commutators": _commutators,
    "prolongation": tower.verify_prolongation,
    "polar": tower.verify_polar,
    "pasting": pasting.verify_pasting,
    "stabilization": tower.verify_stabilization,
    "oracle": lambda frame, rng, samples: verify_oracle(frame, rng, samples).merge(
        verify_dimensions(frame, rng, min(samples, 3))),
}


def run_job(job: tuple) -> dict:
    """Run one ``(suite, (n, m, k, l), seed, samples)`` job; returns the JSON report."""
    suite, (n, m, k, l), seed, samples = job
    frame = Frame(n=n, m=m, k=k, l=l)
    report = SUITES[suite](frame, job_rng(seed, suite, frame), samples)
    return report.to_json()
