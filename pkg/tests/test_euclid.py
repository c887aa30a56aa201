import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import hermite_normal_form
from hypothesis import assume, given, settings, strategies as st

from bslab import exact
from bslab.errors import BudgetExceeded
from bslab.euclid import (LatticeBasis, LatticeFamily, count_in_ball, covolume, dual_basis, enumerate_points,
                          geometric_sum, plancherel_defect, scan_family, shortest_vector, spectral_sum)
from bslab.testfn import TestFunction

HAT = TestFunction.bspline(2, (1, 1))


def brute_force(basis: LatticeBasis, radius) -> list[tuple[int, ...]]:
    """Every coefficient vector in a box that provably contains the ball, filtered exactly."""
    r = exact.to_fraction(radius)
    inv = exact.inverse(basis.matrix)
    # |m_i| = |(B^-1 x)_i| <= |row_i| |x|; bound |row_i| by its l1 norm
    box = [math.floor(sum(abs(x) for x in row) * r) for row in inv]
    out = []
    for m in itertools.product(*(range(-b, b + 1) for b in box)):
        v = basis.vector(m)
        if sum(x * x for x in v) <= r * r:
            out.append(m)
    return sorted(out)


def _cofactor_det(rows):
    if len(rows) == 1:
        return rows[0][0]
    return sum((-1) ** j * rows[0][j] * _cofactor_det([r[:j] + r[j + 1:] for r in rows[1:]]) for j in range(len(rows)))


@pytest.mark.parametrize("rows, expected", [([[1, 0], [0, 1]], 1), ([[4, 0], [0, Fraction(1, 2)]], 2),
                                            ([[2, 1], [1, 1]], 1)])
def test_covolume_examples(rows, expected):
    assert covolume(LatticeBasis(rows)) == expected == abs(_cofactor_det([[Fraction(x) for x in r] for r in rows]))


def test_singular_basis_rejected():
    with pytest.raises(ValueError):
        LatticeBasis([[1, 2], [2, 4]])


def test_dual_basis_examples():
    assert dual_basis(LatticeBasis.identity(2)) == LatticeBasis.identity(2)
    assert dual_basis(LatticeBasis.diagonal(4, Fraction(1, 2))) == LatticeBasis.diagonal(Fraction(1, 4), 2)
    assert dual_basis(LatticeBasis([[2, 1], [1, 1]])).matrix == exact.as_matrix([[1, -1], [-1, 2]])


def _same_lattice(b1: LatticeBasis, b2: LatticeBasis) -> bool:
    # basis vectors are columns; compare column Hermite normal forms at a shared denominator
    den = exact.common_denominator(b1.matrix) * exact.common_denominator(b2.matrix)
    forms = [hermite_normal_form(sympy.Matrix([[int(x * den) for x in row] for row in b.matrix])) for b in (b1, b2)]
    return forms[0] == forms[1]


unimodular = st.sampled_from([[[1, 0], [0, 1]], [[1, 1], [0, 1]], [[2, 1], [1, 1]], [[0, 1], [1, 0]], [[3, 2], [1, 1]]])
fracs = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@given(st.lists(st.lists(fracs, min_size=2, max_size=2), min_size=2, max_size=2), unimodular)
def test_dual_lattice_independent_of_basis_and_involutive(rows, u):
    assume(exact.det(exact.as_matrix(rows)) != 0)
    b = LatticeBasis(rows)
    b2 = LatticeBasis(exact.matmul(b.matrix, exact.as_matrix(u)))
    assert _same_lattice(dual_basis(b), dual_basis(b2))
    assert _same_lattice(dual_basis(dual_basis(b2)), b)
    d = dual_basis(b)
    assert exact.matmul(exact.transpose(d.matrix), b.matrix) == exact.identity(2)


@pytest.mark.parametrize("rows, radius, n", [([[1, 0], [0, 1]], 1, 5), ([[1, 0], [0, 1]], 1.5, 9),
                                             ([[4, 0], [0, Fraction(1, 2)]], 1, 5)])
def test_enumeration_examples(rows, radius, n):
    b = LatticeBasis(rows)
    coeffs, pts = enumerate_points(b, radius)
    assert len(coeffs) == n
    assert [tuple(int(x) for x in c) for c in coeffs] == brute_force(b, radius)


def test_enumeration_diag_points():
    _, pts = enumerate_points(LatticeBasis.diagonal(4, Fraction(1, 2)), 1)
    assert sorted(map(tuple, pts.tolist())) == [(0.0, -1.0), (0.0, -0.5), (0.0, 0.0), (0.0, 0.5), (0.0, 1.0)]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda d: st.lists(st.lists(fracs, min_size=d, max_size=d), min_size=d, max_size=d)),
       st.fractions(min_value=0, max_value=3, max_denominator=4))
def test_enumeration_complete_against_brute_force(rows, radius):
    assume(abs(exact.det(exact.as_matrix(rows))) >= Fraction(1, 4))
    b = LatticeBasis(rows)
    coeffs, _ = enumerate_points(b, radius)
    got = [tuple(int(x) for x in c) for c in coeffs]
    assert got == brute_force(b, radius)  # also checks lexicographic order and no duplicates


def test_points_on_sphere_decided_exactly():
    # (3/10, 4/10) has norm exactly 1/2; float rounding must not drop it
    b = LatticeBasis([[Fraction(3, 10), 0], [Fraction(4, 10), 1]])
    coeffs, _ = enumerate_points(b, Fraction(1, 2))
    assert (1, 0) in {tuple(int(x) for x in c) for c in coeffs}


@pytest.mark.parametrize("rows, norm", [([[1, 0], [0, 1]], 1.0), ([[25, 0], [0, Fraction(1, 5)]], 0.2),
                                        ([[2, 1], [1, 1]], 1.0)])
def test_shortest_vector_examples(rows, norm):
    assert math.isclose(shortest_vector(LatticeBasis(rows))[1], norm)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(fracs, min_size=2, max_size=2), min_size=2, max_size=2))
def test_shortest_vector_against_enumeration(rows):
    assume(abs(exact.det(exact.as_matrix(rows))) >= Fraction(1, 4))
    b = LatticeBasis(rows)
    vec, norm = shortest_vector(b)
    assert any(vec)
    nsq = sum(x * x for x in vec)
    coeffs, _ = enumerate_points(b, Fraction(math.ceil(norm * 4) + 1, 4))
    best = min(sum(x * x for x in b.vector(c)) for c in coeffs if any(c))
    assert nsq == best


def test_geometric_sum_examples():
    z1 = LatticeBasis.identity(1)
    assert geometric_sum(z1, TestFunction.bspline(2, [1]), exact_arith=True) == 1
    assert geometric_sum(z1, TestFunction.bspline(2, [3]), exact_arith=True) == 3
    assert geometric_sum(z1, TestFunction.bspline(2, [3]), exclude_zero=True, exact_arith=True) == 2
    assert math.isclose(geometric_sum(z1, TestFunction.bspline(2, [3])), 3.0)


def test_spectral_sum_examples():
    z1 = LatticeBasis.identity(1)
    s = spectral_sum(z1, TestFunction.bspline(2, [3]), 1e-3)
    assert abs(s.value - 3) <= s.tail_bound <= 1e-3
    s = spectral_sum(z1, TestFunction.bspline(2, [1]), 1e-3)
    assert abs(s.value - 1) <= s.tail_bound
    b = LatticeBasis.diagonal(4, Fraction(1, 2))
    s = spectral_sum(b, HAT, 1e-2)
    assert abs(s.value - float(geometric_sum(b, HAT, exact_arith=True))) <= 1e-2


def test_spectral_budget():
    with pytest.raises(BudgetExceeded):
        spectral_sum(LatticeBasis.identity(2), HAT, 1e-10, budget=10**5)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_counterexample_defect(n):
    """sum over (0, j/n), 0 < |j| < n, of beta_2(j/n) = 2 sum (1 - j/n) = n - 1."""
    b = LatticeFamily.counterexample().member(n)
    assert covolume(b) == n
    oracle = 2 * sum(1 - Fraction(j, n) for j in range(1, n))
    assert plancherel_defect(b, HAT).value == oracle == n - 1


def test_dilation_defect_and_both_sides():
    b = LatticeBasis.identity(2).scaled(4)
    d = plancherel_defect(b, TestFunction.bspline(4, (1, 1)), tail_tol=1e-6)
    assert d.value == 0
    assert d.agreement <= 1e-6


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(fracs, min_size=2, max_size=2), min_size=2, max_size=2), st.integers(2, 5))
def test_defect_zero_iff_support_misses_lattice(rows, k):
    assume(abs(exact.det(exact.as_matrix(rows))) >= Fraction(1, 2))
    b = LatticeBasis(rows)
    f = TestFunction.bspline(k, (Fraction(1, 2), Fraction(1, 2)))
    coeffs, pts = enumerate_points(b, f.support_radius)
    inside = [c for c, p in zip(coeffs, pts) if any(c) and all(abs(x) < k / 4 for x in p)]
    assert (plancherel_defect(b, f).value == 0) == (not inside)


def test_scan_counts_for_dilations():
    rep = scan_family(LatticeFamily.dilation(LatticeBasis.identity(2)), [HAT], [Fraction(3, 2)], range(1, 7))
    assert rep.column("count_R") == [8, 0, 0, 0, 0, 0]
    assert rep.column("defect_f")[1:] == [0] * 5


def test_scan_counterexample_defects_increase():
    rep = scan_family(LatticeFamily.counterexample(), [HAT], [1], range(1, 9))
    d = rep.column("defect_f")
    assert all(a < b for a, b in zip(d[2:], d[3:]))
    assert rep.column("covol") == list(range(1, 9))


def test_scan_workers_do_not_change_output():
    fam = LatticeFamily.sublattice(LatticeBasis([[1, Fraction(1, 2)], [0, 1]]), [1, 2])
    a = scan_family(fam, [HAT], [1, 2], range(1, 6), workers=1)
    b = scan_family(fam, [HAT], [1, 2], range(1, 6), workers=3)
    assert a.to_json() == b.to_json()


def test_scan_records_failures_per_row():
    rep = scan_family(LatticeFamily.dilation(LatticeBasis.identity(2)), [HAT], [1], [1, 2], tail_tol=1e-12,
                      budget=10**4, strict=False)
    assert all(e.startswith("BudgetExceeded") for e in rep.column("error"))
    with pytest.raises(BudgetExceeded):
        scan_family(LatticeFamily.dilation(LatticeBasis.identity(2)), [HAT], [1], [1], tail_tol=1e-12, budget=10**4)


def test_bs_iff_plancherel_on_builtin_families():
    fs = [HAT, TestFunction.bspline(3, (2, 2))]
    pos = LatticeFamily.dilation(LatticeBasis([[1, Fraction(1, 3)], [0, 1]]))
    neg = LatticeFamily.counterexample()
    ns = range(1, 13)
    pos_sys = [shortest_vector(pos.member(n))[1] for n in ns]
    neg_sys = [shortest_vector(neg.member(n))[1] for n in ns]
    assert pos_sys[-1] > 10 and neg_sys[-1] < 0.1
    assert all(plancherel_defect(pos.member(n), f).value == 0 for f in fs for n in ns[-3:])
    assert all(plancherel_defect(neg.member(n), f).value >= 1 for f in fs for n in ns[-3:])


def test_count_in_ball_monotone():
    b = LatticeBasis([[1, Fraction(1, 2)], [0, Fraction(3, 2)]])
    counts = [count_in_ball(b, r) for r in (0, 1, 2, 3)]
    assert counts[0] == 0 and counts == sorted(counts)
