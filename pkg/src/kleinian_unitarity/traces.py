"""Traces on A_P.

A trace is determined by its values on polynomials in ``h`` modulo the image
of ``delta_P(S) = S(x+1)P(x+1) - S(x-1)P(x-1)``.  The quotient has dimension
``deg P - 1`` and the monomials ``1, x, ..., x^{n-2}`` form a basis of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .algebra import AlgebraContext, AlgebraElement
from .errors import FactorizationMismatch, NotAPair, NotDivisible, NotNonnegative, NonConvergence
from .numbers import I, coerce, format_number, is_exact
from .poly import ComplexPoly, X, nonneg_on_line, roots


def delta_P(S: ComplexPoly, P: ComplexPoly) -> ComplexPoly:
    Q = S * P
    return Q.shift(1) - Q.shift(-1)


@dataclass(frozen=True)
class TraceBasis:
    """Reduction modulo the image of ``delta_P`` onto ``span(1, ..., x^{n-2})``.

    ``rows[j]`` holds the coordinates of ``x^j`` for ``j <= cap``.
    """

    P: ComplexPoly
    cap: int
    rows: tuple = field(repr=False)

    @property
    def dim(self) -> int:
        return self.P.degree - 1

    def reduce(self, F: ComplexPoly) -> tuple:
        """Coordinates of the class of ``F`` in the monomial basis."""
        if F.degree > self.cap:
            return self._reduce_direct(F)
        out = [Fraction(0)] * self.dim
        for j, c in enumerate(F.coeffs):
            if c == 0:
                continue
            row = self.rows[j]
            for m in range(self.dim):
                if row[m] != 0:
                    out[m] = out[m] + c * row[m]
        return tuple(out)

    def reduce_poly(self, F: ComplexPoly) -> ComplexPoly:
        return ComplexPoly(self.reduce(F))

    def _reduce_direct(self, F: ComplexPoly) -> tuple:
        n = self.P.degree
        G = F
        while G.degree >= n - 1:
            j = G.degree
            if j <= self.cap:
                head = self.reduce(ComplexPoly(G.coeffs))
                return head
            d = delta_P(ComplexPoly.monomial(j - n + 1), self.P)
            G = G - d.scale(G.leading / d.leading)
        return tuple(G.coeff(m) for m in range(self.dim))


def build_basis(P: ComplexPoly, degree_cap: int | None = None) -> TraceBasis:
    """Precompute reductions of ``x^j`` for ``j <= degree_cap`` (default ``2n + 16``)."""
    n = P.degree
    if n < 1:
        raise ValueError("P must be nonconstant")
    cap = 2 * n + 16 if degree_cap is None else max(degree_cap, n - 1)
    dim = n - 1
    rows: list[tuple] = []
    for j in range(cap + 1):
        if j < dim:
            rows.append(tuple(Fraction(int(m == j)) for m in range(dim)))
            continue
        d = delta_P(ComplexPoly.monomial(j - n + 1), P)
        lc = d.coeff(j)
        acc = [Fraction(0)] * dim
        for m in range(j):
            c = d.coeff(m)
            if c == 0:
                continue
            for q in range(dim):
                if rows[m][q] != 0:
                    acc[q] = acc[q] - c * rows[m][q]
        rows.append(tuple(a / lc for a in acc))
    return TraceBasis(P, cap, tuple(rows))


def solve_difference(F: ComplexPoly) -> ComplexPoly:
    """The polynomial ``S`` with ``S(x+1) - S(x-1) = F`` and ``S(0) = 0``.

    When ``F(it)`` is real for real ``t`` the solution satisfies
    ``S(-x) = -conj(S)(x)``.
    """
    if F.is_zero():
        return ComplexPoly()
    d = F.degree + 1
    s = [Fraction(0)] * (d + 1)
    # coefficient of x^j in (x+1)^k - (x-1)^k is 2*C(k, j) when k - j is odd
    for j in range(d - 1, -1, -1):
        acc = F.coeff(j)
        for k in range(j + 3, d + 1, 2):
            acc = acc - 2 * comb(k, j) * s[k]
        s[j + 1] = acc / (2 * (j + 1))
    S = ComplexPoly(s)
    if F == F.bar_reflect(0) and F.is_exact:
        assert S.compose_affine(-1, 0) == -S.conj(), "normalization identity failed"
    return S


@dataclass(frozen=True)
class TraceFunctional:
    """A trace given by its values ``T(x^m)`` for ``m = 0, ..., n-2``.

    ``moments`` optionally holds directly computed values ``T(x^m)`` for a
    longer range; it lets the trace property be tested without going through
    the quotient.  ``error`` is an estimate of the relative error of the values.
    """

    basis: TraceBasis
    values: tuple
    provenance: str = "manual"
    moments: tuple | None = field(default=None, repr=False)
    error: float = 0.0
    sign_convention: str | None = None
    params: tuple = ()

    @property
    def P(self) -> ComplexPoly:
        return self.basis.P

    @property
    def is_exact(self) -> bool:
        return all(is_exact(v) for v in self.values)

    @property
    def hermitian(self) -> bool:
        tol = 0 if self.is_exact else 1e-9 * max(1.0, max(abs(complex(v)) for v in self.values))
        for m, v in enumerate(self.values):
            w = (I ** m) * v
            if abs(complex(w).imag) > tol:
                return False
        return True

    def evaluate(self, F: ComplexPoly):
        coords = self.basis.reduce(F)
        acc = Fraction(0)
        for c, v in zip(coords, self.values):
            acc = acc + c * v
        return acc

    __call__ = evaluate

    def evaluate_direct(self, F: ComplexPoly):
        """Evaluate without the quotient, using the stored moments when present."""
        if self.moments is None:
            return self.evaluate(F)
        if F.degree >= len(self.moments):
            raise ValueError(f"moments known only up to degree {len(self.moments) - 1}")
        acc = 0j
        for c, mu in zip(F.coeffs, self.moments):
            acc += complex(c) * complex(mu)
        return acc

    def normalized(self) -> "TraceFunctional":
        """Rescaled so that ``T(1) = 1``."""
        t0 = self.values[0]
        if t0 == 0:
            raise ZeroDivisionError("T(1) = 0 cannot be normalized")
        vals = tuple(v / t0 for v in self.values)
        mom = tuple(m / t0 for m in self.moments) if self.moments is not None else None
        return replace(self, values=vals, moments=mom)

    def real_coordinates(self) -> np.ndarray:
        """The real numbers ``T((ix)^m)``."""
        return np.array([complex((I ** m) * v).real for m, v in enumerate(self.values)])

    def to_json(self) -> dict:
        out = {
            "P": self.P.format(),
            "values": [[complex(v).real, complex(v).imag] for v in self.values],
            "hermitian": self.hermitian,
            "provenance": self.provenance,
        }
        if self.is_exact:
            out["exact_values"] = [format_number(v) for v in self.values]
        if self.sign_convention is not None:
            out["sign_convention"] = self.sign_convention
        if self.error:
            out["error_estimate"] = self.error
        return out


def trace_from_values(P: ComplexPoly, values: Sequence, provenance: str = "manual", basis: TraceBasis | None = None) -> TraceFunctional:
    basis = basis or build_basis(P)
    vals = tuple(coerce(v) for v in values)
    if len(vals) != basis.dim:
        raise ValueError(f"expected {basis.dim} values, got {len(vals)}")
    return TraceFunctional(basis, vals, provenance)


def trace_from_real_coordinates(P: ComplexPoly, y: Sequence[float], provenance: str = "manual", basis: TraceBasis | None = None) -> TraceFunctional:
    """Inverse of :meth:`TraceFunctional.real_coordinates`: ``T(x^m) = (-i)^m y_m``."""
    basis = basis or build_basis(P)
    vals = []
    for m, v in enumerate(y):
        v = coerce(v)
        vals.append(((-I) ** m) * v if m % 4 else v)
    return TraceFunctional(basis, tuple(vals), provenance)


def trace_eval(T: TraceFunctional, u: AlgebraElement):
    return T.evaluate(u.component(0))


def form_eval(T: TraceFunctional, u: AlgebraElement, v: AlgebraElement, ctx: AlgebraContext | None = None):
    """The Hermitian form ``(u, v) = T(u r(v))``."""
    ctx = ctx or AlgebraContext(T.P)
    return trace_eval(T, ctx.multiply(u, ctx.involution_r(v)))


# ---------------------------------------------------------------------------
# constructions

def _root_tol(z) -> float:
    return 1e-9 * max(1.0, abs(complex(z)))


def _multiplicity(P: ComplexPoly, z) -> int:
    m = 0
    Q = P
    while Q.degree >= 1:
        if Q.is_exact and is_exact(z):
            if Q(z) != 0:
                break
        elif abs(complex(Q(complex(z)))) > 1e-7 * max(1.0, float(np.sum(np.abs(Q.to_numpy())))):
            break
        m += 1
        Q = Q.derivative()
    return m


def petrov_trace(P: ComplexPoly, alpha, beta, basis: TraceBasis | None = None) -> TraceFunctional:
    """Trace ``T(F) = S(beta) - S(alpha)`` where ``S = solve_difference(F)``.

    For ``alpha == beta`` the value is ``2 S'(alpha)`` and ``alpha`` must be a
    multiple root.
    """
    alpha, beta = coerce(alpha), coerce(beta)
    pair = alpha + beta.conjugate()
    if abs(complex(pair)) > _root_tol(alpha) + _root_tol(beta):
        raise NotAPair(f"alpha + conj(beta) = {format_number(pair)} is not zero")
    need_a = 2 if alpha == beta else 1
    if _multiplicity(P, alpha) < need_a or _multiplicity(P, beta) < 1:
        raise NotAPair("alpha and beta must be roots of P")
    basis = basis or build_basis(P)
    vals = []
    for m in range(basis.dim):
        S = solve_difference(ComplexPoly.monomial(m))
        if alpha == beta:
            vals.append(2 * S.derivative()(alpha))
        else:
            vals.append(S(beta) - S(alpha))
    return TraceFunctional(basis, tuple(vals), "petrov", params=(alpha, beta))


def petrov_functional_value(F: ComplexPoly, alpha, beta):
    """Value of the Petrov-type functional on an arbitrary polynomial (no quotient)."""
    S = solve_difference(F)
    if alpha == beta:
        return 2 * S.derivative()(alpha)
    return S(beta) - S(alpha)


def weight_moment(m: int, lam: float, rtol: float = 1e-13, max_panels: int = 1 << 14):
    """``mu_m = int_R t^m / (2 cosh(pi t) + 2 cos(pi lam)) dt`` and an error estimate."""
    if m % 2:
        return 0.0, 0.0
    c = 2 * math.cos(math.pi * lam)
    # integrand ~ t^m e^{-pi t}; pick the cutoff where it is negligible
    T0 = 8.0
    while (T0 ** m) * math.exp(-math.pi * T0) > 1e-18 * max(1.0, math.gamma(m + 1) / math.pi ** (m + 1)):
        T0 *= 1.25
    width = max(0.05, (1 - lam) / 2)
    panels = max(8, int(math.ceil(T0 / width)))
    nodes, weights = np.polynomial.legendre.leggauss(20)
    prev = None
    while panels <= max_panels:
        edges = np.linspace(0.0, T0, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        w = (half[:, None] * weights[None, :]).ravel()
        # 1/(2 cosh(pi t) + c) written to avoid overflow
        e = np.exp(-math.pi * t)
        f = e / (1 + c * e + e * e)
        vals = np.power(t, m) * f * w
        cur = 2 * math.fsum(vals.tolist())
        if prev is not None and abs(cur - prev) <= rtol * abs(cur):
            return cur, abs(cur - prev)
        prev = cur
        panels *= 2
    raise NonConvergence(f"quadrature for moment {m} did not converge")


def weight_trace_total(lam: float) -> float:
    """Closed form of the weight-function integral of 1."""
    if lam == 0:
        return 1 / math.pi
    return lam / math.sin(math.pi * lam)


SIGN_POSITIVE = "P(it) >= 0 on iR"
SIGN_NEGATIVE = "-P(it) >= 0 on iR"


def weight_function_trace(
    P: ComplexPoly,
    lam: float,
    max_moment: int | None = None,
    rtol: float = 1e-13,
    diagnostic_degree: int = 3,
    basis: TraceBasis | None = None,
) -> TraceFunctional:
    """Trace given by integrating against the weight function along ``iR``.

    On the imaginary axis the weight is ``1/(2 cosh(pi t) + 2 cos(pi lam))``,
    so ``T(x^m) = i^m mu_m``.  ``P`` must vanish at ``lam`` and ``-lam`` (to
    second order when ``lam == 0``) and the cofactor must have constant sign on
    ``iR``.  The overall sign of ``P`` for which the form is positive is
    decided from Gram diagnostics and recorded in ``sign_convention``.
    """
    from .positivity import gram_matrices

    lam = float(lam)
    if not 0 <= lam < 1:
        raise ValueError("lam must lie in [0, 1)")
    n = P.degree
    lam_q = Fraction(lam).limit_denominator(10**6)
    lam_exact = lam_q if abs(float(lam_q) - lam) < 1e-15 else None
    if P.is_exact and lam_exact is not None:
        lam_pt = lam_exact
        base = ComplexPoly([-lam_pt * lam_pt, 0, 1])
        q, r = P.divmod(base)
        if not r.is_zero():
            raise FactorizationMismatch(f"+-{lam} are not roots of P (with the needed multiplicity)")
    else:
        base = ComplexPoly([-lam * lam, 0, 1])
        q, r = P.to_float().divmod(base)
        if any(abs(complex(c)) > 1e-8 * max(1.0, abs(complex(P.leading))) for c in r.coeffs):
            raise FactorizationMismatch(f"+-{lam} are not roots of P")
        q = ComplexPoly(q.coeffs)
    if not q.is_zero() and q.degree > 0:
        try:
            sign_ok = nonneg_on_line(q, 0) or nonneg_on_line(-q, 0)
        except Exception as exc:  # not real on the line
            raise FactorizationMismatch(f"cofactor is not real on iR: {exc}") from exc
        if not sign_ok:
            raise FactorizationMismatch("cofactor changes sign on iR")
    basis = basis or build_basis(P)
    top = max_moment if max_moment is not None else max(2 * n + 2 * diagnostic_degree + 4, 24)
    moments, err = [], 0.0
    for m in range(top + 1):
        mu, e = weight_moment(m, lam, rtol)
        moments.append(complex((1j) ** m * mu))
        if mu:
            err = max(err, e / abs(mu))
    values = tuple(moments[: basis.dim])
    T = TraceFunctional(basis, values, "weight", tuple(moments), err, None, (lam,))
    from .errors import SignConventionUnresolved

    D = diagnostic_degree
    pos = gram_matrices(T, P, D).positive
    neg = gram_matrices(T, -P, D).positive
    if pos:
        return replace(T, sign_convention=SIGN_POSITIVE)
    if neg:
        return replace(T, sign_convention=SIGN_NEGATIVE)
    raise SignConventionUnresolved("neither sign of P gives positive Gram diagnostics")


def pullback_trace(T2: TraceFunctional, P1: ComplexPoly, basis: TraceBasis | None = None) -> TraceFunctional:
    """Express a trace for ``P2`` as a trace for a multiple ``P1 = Q P2``.

    ``Q`` must be nonnegative on ``iR``; then ``delta_{P1}(S) = delta_{P2}(SQ)``
    so the same functional on polynomials kills the image for ``P1``.
    """
    P2 = T2.P
    if P1.is_exact and P2.is_exact:
        Q, r = P1.divmod(P2)
        if not r.is_zero():
            raise NotDivisible("P1 is not a multiple of P2")
    else:
        Q, r = P1.to_float().divmod(P2.to_float())
        if not r.allclose(ComplexPoly(), 1e-8):
            raise NotDivisible("P1 is not a multiple of P2")
        Q = ComplexPoly(c if abs(complex(c)) > 1e-13 else 0 for c in Q.coeffs)
        Q = ComplexPoly(complex(c).real if abs(complex(c).imag) < 1e-12 else c for c in Q.coeffs)
    if not nonneg_on_line(Q, 0):
        raise NotNonnegative("P1/P2 is not nonnegative on iR")
    basis = basis or build_basis(P1)
    vals = tuple(T2.evaluate(ComplexPoly.monomial(m)) for m in range(basis.dim))
    return TraceFunctional(
        basis,
        vals,
        f"{T2.provenance}, pulled back" if P1 != P2 else T2.provenance,
        T2.moments,
        T2.error,
        T2.sign_convention,
        T2.params,
    )
