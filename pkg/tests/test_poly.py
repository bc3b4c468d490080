import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _support import random_real_on_iR, small_fractions
from kleinian_unitarity.errors import BoundaryAmbiguity, NotRealOnLine
from kleinian_unitarity.numbers import I, make_exact, parse_number, format_number
from kleinian_unitarity.poly import (
    ComplexPoly,
    X,
    arith,
    bar_reflect,
    in_R_ix,
    nonneg_on_line,
    re_line,
    rho_count,
    roots,
    shift,
    squarefree_decomposition,
)

Q = Fraction(1, 4) - X * X


def test_arith_examples():
    assert arith(X, X, "add") == 2 * X
    assert arith(X + 1, X - 1, "mul") == X * X - 1
    assert Q.scale(-1) == X * X - Fraction(1, 4)


def test_shift_examples():
    assert shift(X * X, 1) == X * X + 2 * X + 1
    assert shift(Q, 1) == -(X * X) - 2 * X - Fraction(3, 4)
    assert shift(ComplexPoly([5]), -3) == ComplexPoly([5])


def test_bar_reflect_examples():
    assert bar_reflect(I * X, 0) == I * X
    assert bar_reflect(X, 0) == -X
    assert bar_reflect(X, Fraction(1, 2)) == 1 - X


def test_re_line_examples():
    assert re_line(X, 0).is_zero()
    assert re_line(X * X, 0) == X * X
    assert re_line(Q.shift(-1), 0) == -(X * X) - Fraction(3, 4)


def test_roots_examples():
    rs = roots(Q)
    assert sorted((complex(r).real, m) for r, m in rs) == [(-0.5, 1), (0.5, 1)]
    rs = roots((X - 2) ** 2 * (X + 2))
    assert sorted((complex(r).real, m) for r, m in rs) == [(-2.0, 1), (2.0, 2)]
    # exact inputs with rational roots get exact roots
    assert all(isinstance(r, Fraction) for r, _ in rs)


def test_roots_random_backsubstitution():
    rng = random.Random(3)
    for _ in range(10):
        P = ComplexPoly([complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(7)])
        rs = roots(P)
        assert rs.total == 6
        scale = np.sum(np.abs(P.to_numpy()))
        for r, _ in rs:
            assert abs(P(complex(r))) <= 1e-9 * scale * max(1, abs(complex(r))) ** 6


def test_roots_against_numpy():
    rng = random.Random(5)
    for _ in range(10):
        P = random_real_on_iR(rng, 5)
        ours = [complex(v) for v in roots(P).flat()]
        ref = list(np.roots(P.to_numpy()[::-1]))
        key = lambda z: (round(z.real, 6), round(z.imag, 6))
        assert sorted(map(key, ours)) == sorted(map(key, ref))


def test_rho_examples():
    assert rho_count(4 - X * X, 0, "lt") == 1
    assert rho_count(Q, -1, "gt") == 2
    assert rho_count(X * X, 0, "eq") == 2
    with pytest.raises(BoundaryAmbiguity):
        rho_count(X * X, 0, "lt")


def test_in_R_ix_examples():
    assert in_R_ix(Q)
    assert in_R_ix(I * X)
    assert not in_R_ix(X)


def test_nonneg_examples():
    assert nonneg_on_line(-(X * X), 0)
    assert nonneg_on_line(Q, 0)
    assert not nonneg_on_line(X * X - Fraction(1, 4), 0)
    with pytest.raises(NotRealOnLine):
        nonneg_on_line(X, 0)


def test_nonneg_float_path_agrees():
    for P in [Q, X * X - Fraction(1, 4), X**4 + 3 * X * X + 1, X**4 - X * X + 1]:
        assert nonneg_on_line(P, 0) == nonneg_on_line(P.to_float(), 0)


def test_parse_format_roundtrip():
    for text in ["0.25,0,-1", "1/2,3+2i,-i", "0,0,7/3"]:
        P = ComplexPoly.parse(text)
        assert ComplexPoly.parse(P.format()) == P
    assert parse_number("2-3i") == make_exact(2, -3)
    assert format_number(make_exact(0, -1)) == "-i"


polys = st.lists(small_fractions, min_size=1, max_size=5).map(ComplexPoly)


@given(polys, small_fractions, small_fractions)
def test_shift_composes(P, a, b):
    assert P.shift(a).shift(b) == P.shift(a + b)


@given(polys, small_fractions)
def test_shift_matches_evaluation(P, c):
    for x in [Fraction(-2), Fraction(1, 3), Fraction(5, 2)]:
        assert P.shift(c)(x) == P(x + c)


@given(polys, small_fractions)
def test_bar_reflect_is_involution(P, a):
    assert P.bar_reflect(a).bar_reflect(a) == P


@given(polys, small_fractions)
def test_bar_reflect_conjugates_on_line(P, a):
    P = P * (1 + I * X)
    for t in [Fraction(0), Fraction(1, 2), Fraction(-3)]:
        z = a + I * t
        assert P.bar_reflect(a)(z) == P(z).conjugate()


@given(polys, small_fractions)
def test_norm_form_is_nonneg(G, a):
    G = G * (X + I)
    assert nonneg_on_line((G * G.bar_reflect(a)).re_line(a), a)


@given(polys, polys)
def test_divmod_identity(A, B):
    if B.is_zero():
        return
    q, r = A.divmod(B)
    assert q * B + r == A
    assert r.is_zero() or r.degree < B.degree


@settings(max_examples=30)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(1, 3)), min_size=1, max_size=3, unique_by=lambda t: t[0]))
def test_squarefree_multiplicities(layout):
    P = ComplexPoly([1])
    for r, m in layout:
        P = P * (X - r) ** m
    rs = roots(P)
    assert sorted((int(complex(r).real), m) for r, m in rs) == sorted(layout)
    prod = ComplexPoly([1])
    for f, m in squarefree_decomposition(P):
        prod = prod * f ** m
    assert prod.degree == P.degree
