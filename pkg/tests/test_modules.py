from fractions import Fraction

import pytest

from _support import module_form_definiteness
from kleinian_unitarity.errors import NotDefined
from kleinian_unitarity.modules import (
    ModuleDescriptor,
    classify_sl2_bimodules,
    enumerate_irreducibles,
    is_unitarizable_module,
    one_dim_bimodule_candidates,
    sl2_form_coefficient,
    sl2_parameter_from_P,
)
from kleinian_unitarity.numbers import I, make_exact
from kleinian_unitarity.poly import ComplexPoly, X

P0 = Fraction(1, 4) - X * X
h = Fraction(1, 2)

ORACLE_POLYS = [
    X * X - 4,
    4 - X * X,
    (X * X - 1) * (X * X - 9),
    -(X * X - 1) * (X * X - 25),
    (X * X - 36) * (X * X + 1),
    X * X - 121,
    (X * X - Fraction(1, 4)) * (X * X - Fraction(49, 4)),
]


def finite_modules(P):
    return [d for d in enumerate_irreducibles(P) if d.is_finite]


def test_quarter_modules():
    mods = enumerate_irreducibles(P0)
    half_inf = [d for d in mods if d.bounded_below != d.bounded_above]
    assert sorted((d.start, d.end) for d in half_inf if d.bounded_below) == [(h, None), (3 * h, None)]
    assert sorted((d.start, d.end) for d in half_inf if d.bounded_above) == [(None, -3 * h), (None, -h)]
    assert not finite_modules(P0)
    fam = [d for d in mods if d.is_family]
    assert len(fam) == 1
    for d in half_inf:
        assert is_unitarizable_module(P0, d).unitarizable


def test_unit_module():
    mods = finite_modules(X * X - 1)
    assert [(d.start, d.end) for d in mods] == [(0, 0)]
    assert is_unitarizable_module(X * X - 1, mods[0]).unitarizable


def test_no_finite_modules_without_even_gaps():
    assert not finite_modules((X * X - Fraction(1, 4)) * (X * X - 2))


def test_family_instantiation():
    (fam,) = [d for d in enumerate_irreducibles(P0) if d.is_family]
    with pytest.raises(ValueError):
        fam.instantiate(h)
    m = fam.instantiate(Fraction(1, 3))
    assert not m.is_family and m.family_residue == Fraction(1, 3)


def test_unitarity_examples():
    d = ModuleDescriptor(3 * h, None)
    rep = is_unitarizable_module(P0, d)
    assert rep.unitarizable
    assert P0(5 * h) < 0
    bad = ModuleDescriptor(make_exact(1, 1), None)
    rep = is_unitarizable_module(P0, bad)
    assert not rep.unitarizable and "real" in rep.reason
    up = ModuleDescriptor(Fraction(2), None)
    assert not is_unitarizable_module(X * X - 1, up).unitarizable


def test_unitarity_needs_even_real():
    with pytest.raises(NotDefined):
        is_unitarizable_module(X ** 3, ModuleDescriptor(1, None))
    with pytest.raises(NotDefined):
        is_unitarizable_module(X * X + I * X, ModuleDescriptor(1, None))


@pytest.mark.parametrize("P", ORACLE_POLYS, ids=lambda p: p.format())
def test_criterion_matches_explicit_form(P):
    for d in finite_modules(P):
        verdict = is_unitarizable_module(P, d).unitarizable
        oracle = module_form_definiteness(P, d.weights())
        assert oracle != "degenerate"
        assert verdict == (oracle in ("positive", "negative")), d.label()


def test_sl2_coefficients():
    assert sl2_form_coefficient(0, 0) == 0
    assert sl2_form_coefficient(0, -h) == Fraction(1, 8)
    assert sl2_form_coefficient(1, 0) == Fraction(3, 5)


def test_sl2_table():
    t = dict(classify_sl2_bimodules(-h))
    assert t["regular"] and t["second"]
    t = dict(classify_sl2_bimodules(0))
    assert not t["regular"] and t["C"]
    t = dict(classify_sl2_bimodules(3))
    assert not t["regular"] and t["annihilator"]
    assert not dict(classify_sl2_bimodules(h))["regular"]
    assert dict(classify_sl2_bimodules(-0.3))["regular"]


def test_sl2_parameter():
    assert sl2_parameter_from_P(P0) == -h
    assert sl2_parameter_from_P(1 - X * X) == 0


def test_one_dim_candidates():
    assert one_dim_bimodule_candidates(X * X - 1) == [0]
    assert one_dim_bimodule_candidates(P0) == []
    assert one_dim_bimodule_candidates((X - 1) ** 2 * (X + 1) ** 2) == [0]
