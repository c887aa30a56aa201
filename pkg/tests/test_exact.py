from fractions import Fraction

import sympy
from hypothesis import assume, given, strategies as st

from bslab import exact

small = st.integers(-6, 6)
fracs = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@given(st.integers(1, 4).flatmap(lambda d: st.lists(st.lists(fracs, min_size=d, max_size=d), min_size=d, max_size=d)))
def test_det_and_inverse_match_sympy(rows):
    m = exact.as_matrix(rows)
    ref = sympy.Matrix(rows)
    assert exact.det(m) == Fraction(str(ref.det()))
    assume(ref.det() != 0)
    inv = exact.inverse(m)
    assert exact.matmul(m, inv) == exact.identity(len(rows))


@given(st.lists(small, min_size=1, max_size=5))
def test_primitive_completion(c):
    from math import gcd

    g = 0
    for x in c:
        g = gcd(g, x)
    assume(g == 1)
    u = exact.primitive_completion(c)
    assert abs(exact.det(exact.as_matrix(u))) == 1
    image = [sum(c[i] * u[i][j] for i in range(len(c))) for j in range(len(c))]
    assert image == [1] + [0] * (len(c) - 1)


def test_floats_read_as_short_decimals():
    assert exact.to_fraction(0.1) == Fraction(1, 10)
    assert exact.integerize(exact.as_matrix([[0.5, 1], [Fraction(1, 3), 2]])) == ([[3, 6], [2, 12]], 6)
