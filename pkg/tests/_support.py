"""Shared generators and independent oracles for the tests."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from kleinian_unitarity.algebra import AlgebraElement
from kleinian_unitarity.numbers import I, make_exact
from kleinian_unitarity.poly import ComplexPoly

small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def real_on_iR(reals) -> ComplexPoly:
    """Polynomial with ``P(it)`` real: coefficient ``c_k = r_k (-i)^k``."""
    return ComplexPoly([Fraction(r) * (-I) ** k for k, r in enumerate(reals)])


def random_real_on_iR(rng: random.Random, n: int) -> ComplexPoly:
    rs = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)]
    rs.append(Fraction(rng.choice([-1, 1]) * rng.randint(1, 5), rng.randint(1, 3)))
    return real_on_iR(rs)


def random_complex_poly(rng: random.Random, n: int) -> ComplexPoly:
    cs = [make_exact(Fraction(rng.randint(-5, 5), rng.randint(1, 3)), Fraction(rng.randint(-5, 5), rng.randint(1, 3))) for _ in range(n)]
    cs.append(make_exact(rng.randint(1, 4), rng.randint(-2, 2)))
    return ComplexPoly(cs)


def random_element(rng: random.Random, max_deg: int = 4) -> AlgebraElement:
    """Random element of filtration degree ``<= max_deg`` (weights up to +-2*max_deg)."""
    comp = {}
    for _ in range(rng.randint(1, 3)):
        k = rng.randint(-2, 2)
        d = rng.randint(0, max(0, max_deg - abs(k)))
        comp[2 * k] = ComplexPoly(
            [make_exact(Fraction(rng.randint(-3, 3), rng.randint(1, 2)), rng.randint(-1, 1)) for _ in range(d + 1)]
        )
    return AlgebraElement(comp)


# ---- skew Laurent ring oracle --------------------------------------------
#
# A_P embeds in C[h][u, u^-1] with u g(h) = g(h - 2) u via
#   e -> u,   f -> P(h + 1) u^-1,   h -> h.

class Laurent:
    def __init__(self, comp=None):
        self.comp = {k: v for k, v in (comp or {}).items() if not v.is_zero()}

    def __mul__(self, other):
        out: dict = {}
        for k, g in self.comp.items():
            for l, g2 in other.comp.items():
                term = g * g2.shift(-2 * k)
                out[k + l] = out.get(k + l, ComplexPoly()) + term
        return Laurent(out)

    def __add__(self, other):
        out = dict(self.comp)
        for k, g in other.comp.items():
            out[k] = out.get(k, ComplexPoly()) + g
        return Laurent(out)

    def __eq__(self, other):
        return self.comp == other.comp


def laurent_image(P: ComplexPoly, a: AlgebraElement) -> Laurent:
    f = Laurent({-1: P.shift(1)})
    out = Laurent()
    for k, S in a.components.items():
        if k >= 0:
            out = out + Laurent({k // 2: S})
        else:
            fq = Laurent({0: ComplexPoly([1])})
            for _ in range(-k // 2):
                fq = fq * f
            out = out + fq * Laurent({0: S})
    return out


# ---- explicit module oracle ------------------------------------------------

def module_form_definiteness(P: ComplexPoly, weights: list) -> str:
    """Build ``e, f, h`` as matrices on the weight basis and solve for invariant forms.

    ``e v_w = v_{w+2}``, ``f v_w = P(w - 1) v_{w-2}``.  A symmetric real matrix
    ``G`` is invariant when ``G E = -F^T G`` and ``G H = H G``.  Returns
    ``"positive"``, ``"negative"`` (up to an overall sign), ``"indefinite"``
    or ``"degenerate"``.
    """
    d = len(weights)
    Em = sympy.zeros(d, d)
    Fm = sympy.zeros(d, d)
    Hm = sympy.diag(*[sympy.Rational(w.numerator, w.denominator) for w in weights])
    for j in range(d - 1):
        Em[j + 1, j] = 1
    for j in range(1, d):
        val = Fraction(P(weights[j] - 1))
        Fm[j - 1, j] = sympy.Rational(val.numerator, val.denominator)
    # the relations must hold exactly
    def Pm(shift):
        return sympy.diag(*[sympy.Rational(Fraction(P(w + shift)).numerator, Fraction(P(w + shift)).denominator) for w in weights])
    assert Hm * Em - Em * Hm == 2 * Em
    assert Hm * Fm - Fm * Hm == -2 * Fm
    assert Em * Fm == Pm(-1)
    assert Fm * Em == Pm(1)
    syms = sympy.symbols(f"g0:{d * d}")
    G = sympy.Matrix(d, d, syms)
    eqs = list(G - G.T) + list(G * Em + Fm.T * G) + list(G * Hm - Hm * G)
    sol = sympy.linsolve(eqs, syms)
    (vec,) = sol
    free = sorted(set().union(*[sympy.sympify(v).free_symbols for v in vec]), key=str)
    if len(free) != 1:
        return "degenerate"
    G0 = sympy.Matrix(d, d, [sympy.sympify(v).subs(free[0], 1) for v in vec])
    eig = [sympy.nsimplify(ev) for ev in G0.eigenvals(multiple=True)]
    if all(ev > 0 for ev in eig):
        return "positive"
    if all(ev < 0 for ev in eig):
        return "negative"
    if any(ev == 0 for ev in eig):
        return "degenerate"
    return "indefinite"
