import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kleinian_unitarity.errors import HypothesisFails, NearZeroOnLine, RootOnLine
from kleinian_unitarity.index_tools import (
    GoodApproximation,
    argument_profile,
    bounded_product_approximation,
    build_good_approximation,
    compose_good_approximations,
    good_approximation_quadratic,
    index,
    index_by_winding,
    root_balance_check,
    nonunitarizability_witness,
    pair_roots_across_half,
    quadratic_for_root,
    _exp_poly,
)
from kleinian_unitarity.numbers import I, make_exact
from kleinian_unitarity.poly import ComplexPoly, X
from kleinian_unitarity.positivity import check_nonunitarity_certificate


def random_off_line_product(rng, a=0, k=None):
    """Product of linear factors whose roots keep distance >= 1/4 from Re x = a."""
    k = k if k is not None else rng.randint(1, 5)
    P = ComplexPoly([1])
    for _ in range(k):
        re = Fraction(rng.choice([-1, 1]) * rng.randint(1, 12), 4) + a
        im = Fraction(rng.randint(-8, 8), 4)
        P = P * (X - make_exact(re, im))
    return P


def test_index_examples():
    assert index(X - 2, 0) == -1
    assert index((X - 1) * (X + 1), 0) == 0
    assert index(ComplexPoly([1]), 0) == 0
    with pytest.raises(RootOnLine):
        index(X * (X - 3), 0)


def test_index_additivity_and_winding():
    rng = random.Random(9)
    for _ in range(30):
        A, B = random_off_line_product(rng), random_off_line_product(rng)
        assert index(A * B) == index(A) + index(B)
        assert index_by_winding(A * B) == index(A * B)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(-1)]))
def test_index_winding_on_other_lines(seed, a):
    P = random_off_line_product(random.Random(seed), a)
    assert index(P, a) == index_by_winding(P, a)


def test_root_balance_examples():
    rep = root_balance_check(-(X * X), 0)
    assert rep.k == 0 and rep.rho_gt == 0 and rep.holds
    assert root_balance_check(ComplexPoly([1]), 0).holds
    with pytest.raises(HypothesisFails):
        root_balance_check(X * X - 1, 0)


def test_root_balance_leading_sign_cases():
    rep = root_balance_check(X + Fraction(1, 2), 0)
    assert rep.equality == "left" and rep.leading_sign_ok
    rep = root_balance_check(Fraction(1, 2) - X, 0)
    assert rep.equality == "right" and rep.leading_sign_ok


def _line_nonneg(rng, a):
    G = ComplexPoly([make_exact(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(1, 4))])
    if G.is_zero():
        G = ComplexPoly([1])
    A = G * G.bar_reflect(a)
    if rng.random() < 0.5:
        return A
    K = ComplexPoly([make_exact(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(1, 6))])
    Hr = K + K.bar_reflect(a)
    return A + I * Hr


def test_root_balance_random_families():
    rng = random.Random(42)
    for _ in range(30):
        a = Fraction(rng.randint(-2, 2), 2)
        F = _line_nonneg(rng, a)
        if F.is_zero():
            continue
        assert root_balance_check(F, a).holds


def test_argument_profile_examples():
    assert argument_profile(ComplexPoly([1]), 0).bound == 0
    c = 100
    prof = argument_profile(c - X * X, Fraction(1, 2), eps=1.0)
    near = np.abs(prof.t) < 1
    assert np.max(np.abs(prof.arg[near])) < 0.02
    with pytest.raises(NearZeroOnLine):
        argument_profile(X * X + 1, 0)


def test_argument_profile_matches_direct_evaluation():
    P = (X - make_exact(-1, 2)) * (X - 3) * (X + make_exact(Fraction(1, 2), -1))
    prof = argument_profile(P, 0, eps=0.5)
    t = prof.t[::97]
    direct = np.angle(np.array([complex(P(complex(0, s))) for s in t]))
    ours = prof.arg[::97]
    diff = (ours - direct + math.pi) % (2 * math.pi) - math.pi
    assert np.max(np.abs(diff)) < 1e-9


def test_e_factor_pair_bound():
    a, b = Fraction(-1), Fraction(2)
    for l in (2, 5, 9):
        prod = _exp_poly(l, b, -1) * _exp_poly(l, -a, 1)
        assert argument_profile(prod, 0, eps=0.5).bound < 0.5


def test_good_approximation_quadratic():
    g = good_approximation_quadratic(Fraction(-1), 0.3)
    assert isinstance(g, GoodApproximation)
    assert g.profile.bound < math.pi / 2 - 0.1 and g.profile.small_bound < 0.3
    assert g.quad == -(X + 1) * (X - 2) and g.quad == quadratic_for_root(-1)
    val = (g.F * g.quad)(Fraction(1, 2))
    assert val.imag == 0 if hasattr(val, "imag") else True
    assert complex(val).real > 0
    # the profile of the exact polynomial agrees with the factored evaluation
    direct = argument_profile(g.F * g.quad, 0, eps=0.3)
    assert direct.small_bound < 0.3 and direct.bound < math.pi / 2 - 0.1
    with pytest.raises(HypothesisFails):
        good_approximation_quadratic(Fraction(1, 2))


def test_good_approximation_complex_root():
    g = good_approximation_quadratic(make_exact(-2, 1), 0.3)
    assert g.quad == quadratic_for_root(make_exact(-2, 1))
    assert argument_profile(g.F * g.quad, 0, eps=0.3).small_bound < 0.3


def test_compose_single_and_pairs():
    g = good_approximation_quadratic(Fraction(-1), 0.3)
    F, _ = compose_good_approximations([g], 0.3)
    assert F == g.F
    F, parts = build_good_approximation([Fraction(-2), Fraction(-3)], 0.4)
    target = parts[0].quad * parts[1].quad
    prof = argument_profile(F * target, 0, eps=0.4)
    assert prof.bound < math.pi / 2 - 0.1 and prof.small_bound < 0.4
    F3, parts3 = build_good_approximation([Fraction(-3), Fraction(-4), make_exact(-3, 1)], 0.4)
    assert len(parts3) == 3


def test_pairing():
    P = (X * X - 4) * (X * X - 9)
    left = pair_roots_across_half(P.compose_affine(2, -1))
    assert sorted(complex(a).real for a in left) == [-1.0, -0.5]


@pytest.mark.parametrize("P", [4 - X * X, (X * X - 4) * (X * X - 9), (4 - X * X) ** 3, (X * X - 25) ** 6])
def test_witness_passes_exact_check(P):
    F = nonunitarizability_witness(P)
    assert check_nonunitarity_certificate(F, P)


def test_witness_guards():
    with pytest.raises(HypothesisFails):
        nonunitarizability_witness(Fraction(1, 4) - X * X)
    with pytest.raises(HypothesisFails):
        nonunitarizability_witness(X * X - 4)


def test_bounded_product_first_candidate_is_trivial():
    F, prof = bounded_product_approximation([Fraction(-3)])
    assert F == ComplexPoly([1])
