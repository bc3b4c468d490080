import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from _support import random_complex_poly, random_element, random_real_on_iR
from kleinian_unitarity.algebra import AlgebraContext, AlgebraElement, E, F, H
from kleinian_unitarity.errors import NotAPair, NotNonnegative
from kleinian_unitarity.poly import ComplexPoly, X
from kleinian_unitarity.traces import (
    SIGN_POSITIVE,
    build_basis,
    delta_P,
    form_eval,
    petrov_functional_value,
    petrov_trace,
    pullback_trace,
    solve_difference,
    trace_eval,
    weight_function_trace,
    weight_moment,
    weight_trace_total,
)

P0 = Fraction(1, 4) - X * X
half = Fraction(1, 2)


def test_delta_examples():
    assert delta_P(ComplexPoly([1]), P0) == -4 * X
    assert delta_P(X, P0) == -6 * X * X - Fraction(3, 2)
    assert delta_P(ComplexPoly(), P0).is_zero()


def test_basis_examples():
    B = build_basis(P0)
    assert B.dim == 1
    assert B.reduce(X * X) == (Fraction(-1, 4),)
    assert B.reduce(X) == (0,)
    assert B.reduce(ComplexPoly([7])) == (7,)


def _rank_dimension(P, N=6):
    """``dim C[x]_{<= N+n-1} / delta_P(C[x]_{<= N})``, by an exact rank computation."""
    n = P.degree
    rows = []
    for k in range(N + 1):
        img = delta_P(X ** k, P)
        row = [img.coeff(j) for j in range(N + n)]
        rows.append([sympy.Rational(complex(c).real).limit_denominator(10 ** 9) + sympy.I * sympy.Rational(complex(c).imag).limit_denominator(10 ** 9) for c in row])
    return N + n - sympy.Matrix(rows).rank()


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_dimension_matches_rank(n):
    rng = random.Random(n)
    P = random_real_on_iR(rng, n) if n % 2 == 0 else random_complex_poly(rng, n)
    assert build_basis(P).dim == n - 1 == _rank_dimension(P)


def test_reduction_is_consistent_with_image():
    rng = random.Random(2)
    P = random_real_on_iR(rng, 4)
    B = build_basis(P)
    for k in range(8):
        assert all(c == 0 for c in B.reduce(delta_P(X ** k, P)))


def test_solve_difference_examples():
    assert solve_difference(ComplexPoly([1])) == X * half
    assert solve_difference(X * X) == X ** 3 * Fraction(1, 6) - X * Fraction(1, 6)
    assert solve_difference(ComplexPoly()).is_zero()


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=1, max_size=6))
def test_solve_difference_property(cs):
    Fp = ComplexPoly(cs)
    S = solve_difference(Fp)
    assert S.shift(1) - S.shift(-1) == Fp
    assert S(0) == 0


def test_petrov_examples():
    T = petrov_trace(P0, -half, half)
    assert T.values[0] == half
    assert T(X * X) == Fraction(-1, 8)
    assert T.normalized()(X * X) == build_basis(P0).reduce(X * X)[0]
    assert T.hermitian
    with pytest.raises(NotAPair):
        petrov_trace(P0, half, half)


def test_trace_eval_examples():
    T = petrov_trace(P0, -half, half)
    ctx = AlgebraContext(P0)
    assert trace_eval(T, E()) == 0
    assert trace_eval(T, ctx.multiply(E(), F())) == T(P0.shift(-1))
    assert trace_eval(T, AlgebraElement.scalar(1)) == T.values[0]


def test_form_eval_examples():
    T = petrov_trace(P0, -half, half)
    ctx = AlgebraContext(P0)
    one = AlgebraElement.scalar(1)
    assert form_eval(T, one, one, ctx) == T.values[0]
    assert form_eval(T, E(), E(), ctx) == -T(P0.shift(-1))
    assert form_eval(T, H(), H(), ctx) == T(-(X * X))


def test_petrov_trace_property_exact():
    T = petrov_trace(P0, -half, half)
    ctx = AlgebraContext(P0)
    rng = random.Random(7)
    for _ in range(25):
        u, v = random_element(rng), random_element(rng)
        assert trace_eval(T, ctx.multiply(u, v)) == trace_eval(T, ctx.multiply(v, u))


def test_petrov_functional_kills_image():
    rng = random.Random(4)
    P = (X * X - Fraction(1, 9)) * (Fraction(1, 4) - X * X)
    for _ in range(10):
        S = ComplexPoly([Fraction(rng.randint(-5, 5)) for _ in range(rng.randint(1, 6))])
        assert petrov_functional_value(delta_P(S, P), -half, half) == 0
        assert petrov_functional_value(delta_P(S, P), Fraction(-1, 3), Fraction(1, 3)) == 0


def test_double_root_petrov():
    P = -(X * X) * (X * X - 4)
    T = petrov_trace(P, 0, 0)
    for k in range(6):
        assert T(delta_P(X ** k, P)) == 0


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 0.8])
def test_weight_moments_against_quad(lam):
    # even integrand; the tail beyond t = 60 is below 1e-70
    w = lambda t: 1.0 / (2 * np.cosh(np.pi * t) + 2 * math.cos(math.pi * lam))
    for m in [0, 2, 4, 8]:
        ref, _ = quad(lambda t: t ** m * w(t), 0, 60, epsabs=0, epsrel=1e-12, limit=400)
        mu, _ = weight_moment(m, lam)
        assert mu == pytest.approx(2 * ref, rel=1e-9)
    assert weight_moment(3, lam)[0] == pytest.approx(0, abs=1e-14)
    ref0, _ = quad(w, 0, 60, epsabs=0, epsrel=1e-12)
    assert weight_trace_total(lam) == pytest.approx(2 * ref0, rel=1e-10)


def test_weight_trace_for_quarter():
    T = weight_function_trace(P0, 0.5)
    assert T.values[0].real > 0
    assert T.sign_convention == SIGN_POSITIVE
    for j in range(7):
        assert abs(T.evaluate_direct(delta_P(X ** j, P0))) <= 1e-8
    Tp = petrov_trace(P0, -half, half).normalized()
    Tw = T.normalized()
    assert complex(Tw.values[0]) == pytest.approx(complex(Tp.values[0]), rel=1e-7)
    assert complex(Tw.evaluate_direct(X * X)) == pytest.approx(-0.25, rel=1e-7)


def test_weight_trace_with_cofactor():
    # cofactor 4 - x^2 is positive on iR
    Pw = (Fraction(1, 4) - X * X) * (4 - X * X)
    T = weight_function_trace(Pw, 0.5)
    for j in range(7):
        assert abs(T.evaluate_direct(delta_P(X ** j, Pw))) <= 1e-8 * max(1.0, abs(T.values[0]))


def test_pullback():
    T2 = petrov_trace(P0, -half, half)
    assert pullback_trace(T2, P0).values == T2.values
    P1 = P0 * (2 - X * X)
    T1 = pullback_trace(T2, P1)
    for k in range(8):
        assert T1(delta_P(X ** k, P1)) == 0
    with pytest.raises(NotNonnegative):
        pullback_trace(T2, P0 * (X * X - 2))
