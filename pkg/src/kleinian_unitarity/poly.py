"""Univariate complex polynomials, line-restricted parts, roots and root counts.

Coefficients are stored ascending.  A polynomial is *exact* when every
coefficient is a ``Fraction`` or :class:`~kleinian_unitarity.numbers.GaussRational`;
exactness survives ring operations, shifts and reflections with exact
arguments.  Floating coefficients are Python ``complex``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundaryAmbiguity, NonConvergence, NotRealOnLine
from .numbers import (
    I,
    coerce,
    format_number,
    _exact_parts,
    is_exact,
    make_exact,
    parse_number,
)

DEFAULT_TOL = 1e-9


def _trim(coeffs: list) -> tuple:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class ComplexPoly:
    """Dense polynomial ``sum(coeffs[k] * x**k)``.

    Instances are immutable and hashable by value.
    """

    __slots__ = ("coeffs", "_exact")

    def __init__(self, coeffs: Iterable = ()):
        cs = _trim([coerce(c) for c in coeffs])
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "_exact", all(is_exact(c) for c in cs))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexPoly is immutable")

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "ComplexPoly":
        return cls([c])

    @classmethod
    def x(cls) -> "ComplexPoly":
        return cls([0, 1])

    @classmethod
    def monomial(cls, k: int, c=1) -> "ComplexPoly":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable, leading=1) -> "ComplexPoly":
        out = cls([leading])
        for r in roots:
            out = out * cls([-coerce(r), 1])
        return out

    @classmethod
    def parse(cls, text: str) -> "ComplexPoly":
        """Parse the comma-separated ascending coefficient format, e.g. ``0.25,0,-1``."""
        parts = [p for p in text.replace(";", ",").split(",")]
        if not any(p.strip() for p in parts):
            raise ValueError("empty coefficient list")
        return cls(parse_number(p) for p in parts)

    def format(self) -> str:
        if not self.coeffs:
            return "0"
        return ",".join(format_number(c) for c in self.coeffs)

    # basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        return self._exact

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly):
            try:
                other = ComplexPoly([other])
            except TypeError:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"ComplexPoly({self.format()})"

    def allclose(self, other: "ComplexPoly", tol: float = 1e-9) -> bool:
        n = max(len(self), len(other))
        a = np.array([complex(self.coeff(k)) for k in range(n)])
        b = np.array([complex(other.coeff(k)) for k in range(n)])
        scale = max(1.0, float(np.max(np.abs(a), initial=0)), float(np.max(np.abs(b), initial=0)))
        return bool(np.all(np.abs(a - b) <= tol * scale))

    def to_float(self) -> "ComplexPoly":
        return ComplexPoly(complex(c) for c in self.coeffs)

    def to_numpy(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    # ring operations ----------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return ComplexPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return ComplexPoly()
            out = [Fraction(0)] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                if ai == 0:
                    continue
                for j, bj in enumerate(b):
                    out[i + j] = out[i + j] + ai * bj
            return ComplexPoly(out)
        try:
            c = coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def scale(self, c) -> "ComplexPoly":
        c = coerce(c)
        return ComplexPoly(c * a for a in self.coeffs)

    def __truediv__(self, other):
        if isinstance(other, ComplexPoly):
            q, r = self.divmod(other)
            if not r.is_zero():
                raise ValueError("polynomial division leaves a remainder")
            return q
        return self.scale(1 / coerce(other))

    def __pow__(self, k: int):
        out = ComplexPoly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other: "ComplexPoly"):
        """Long division; exact when both operands are exact."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        num = list(self.coeffs)
        den = other.coeffs
        dl = den[-1]
        if len(num) < len(den):
            return ComplexPoly(), self
        q = [Fraction(0)] * (len(num) - len(den) + 1)
        for k in range(len(num) - len(den), -1, -1):
            c = num[k + len(den) - 1] / dl
            q[k] = c
            if c == 0:
                continue
            for j, dj in enumerate(den):
                num[k + j] = num[k + j] - c * dj
        rem = num[: len(den) - 1]
        if not self.is_exact or not other.is_exact:
            # leading-term subtraction in floating point leaves rounding residue
            scale = max((abs(complex(c)) for c in self.coeffs), default=1.0)
            rem = [c if abs(complex(c)) > 1e-300 * max(1.0, scale) else 0 for c in rem]
        return ComplexPoly(q), ComplexPoly(rem)

    # evaluation ---------------------------------------------------------
    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return np.polyval(self.to_numpy()[::-1], x) if self.coeffs else np.zeros_like(x, dtype=complex)
        x = coerce(x) if not isinstance(x, (float, complex)) else x
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "ComplexPoly":
        return ComplexPoly(k * c for k, c in enumerate(self.coeffs) if k)

    def conj(self) -> "ComplexPoly":
        """Coefficient-wise complex conjugate."""
        return ComplexPoly(c.conjugate() for c in self.coeffs)

    # substitutions ------------------------------------------------------
    def shift(self, c) -> "ComplexPoly":
        """Return ``S(x + c)`` (Taylor shift by repeated synthetic division)."""
        c = coerce(c)
        a = list(self.coeffs)
        n = len(a)
        if n <= 1 or c == 0:
            return self
        cp = _exact_parts(c)
        if self.is_exact and cp is not None and cp[1] == 0:
            parts = [_exact_parts(z) for z in a]
            re = _shift_rational([p[0] for p in parts], cp[0])
            im = _shift_rational([p[1] for p in parts], cp[0])
            return ComplexPoly(make_exact(x, y) for x, y in zip(re, im))
        for k in range(n - 1):
            for j in range(n - 2, k - 1, -1):
                a[j] = a[j] + c * a[j + 1]
        return ComplexPoly(a)

    def compose_affine(self, alpha, beta) -> "ComplexPoly":
        """Return ``S(alpha*x + beta)``."""
        alpha = coerce(alpha)
        shifted = self.shift(beta)
        out = []
        p = Fraction(1)
        for c in shifted.coeffs:
            out.append(c * p)
            p = p * alpha
        return ComplexPoly(out)

    def bar_reflect(self, a=0) -> "ComplexPoly":
        """Return ``conj(S)(2a - x)``: the value at ``a + it`` is ``conj(S(a + it))``."""
        return self.conj().compose_affine(-1, 2 * coerce(a))

    def re_line(self, a=0) -> "ComplexPoly":
        return (self + self.bar_reflect(a)).scale(Fraction(1, 2))

    def im_line(self, a=0) -> "ComplexPoly":
        return (self - self.bar_reflect(a)) * (1 / (2 * I))

    def on_line(self, a=0) -> "ComplexPoly":
        """The polynomial ``t -> S(a + i t)``."""
        return self.compose_affine(I, a)


def _shift_rational(a: list, c: Fraction) -> list:
    """Taylor shift of rational coefficients in integer arithmetic.

    With ``c = p/q`` and ``L`` a common denominator of the ``a_k``, the
    polynomial ``U(x) = L q^(n-1) S(x/q)`` has integer coefficients and
    ``U(x + p)`` has coefficients ``L q^(n-1-j) b_j``.
    """
    n = len(a)
    if not any(a):
        return a
    p, q = c.numerator, c.denominator
    L = 1
    for x in a:
        L = L * x.denominator // math.gcd(L, x.denominator)
    w = [int(x * L) * q ** (n - 1 - k) for k, x in enumerate(a)]
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            w[j] += p * w[j + 1]
    return [Fraction(w[j], L * q ** (n - 1 - j)) for j in range(n)]


def _as_poly(x):
    if isinstance(x, ComplexPoly):
        return x
    try:
        return ComplexPoly([x])
    except TypeError:
        return None


X = ComplexPoly.x()
ONE = ComplexPoly.const(1)
ZERO = ComplexPoly()


def poly(*coeffs) -> ComplexPoly:
    """Shorthand: ``poly(Fraction(1, 4), 0, -1)`` is ``1/4 - x**2``."""
    return ComplexPoly(coeffs)


# ---------------------------------------------------------------------------
# the [OP] surface of the module

def arith(a: ComplexPoly, b, op: str) -> ComplexPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown op {op!r}")


def shift(S: ComplexPoly, c) -> ComplexPoly:
    return S.shift(c)


def bar_reflect(S: ComplexPoly, a=0) -> ComplexPoly:
    return S.bar_reflect(a)


def re_line(S: ComplexPoly, a=0) -> ComplexPoly:
    return S.re_line(a)


def im_line(S: ComplexPoly, a=0) -> ComplexPoly:
    return S.im_line(a)


def in_R_ix(P: ComplexPoly, tol: float = 0.0) -> bool:
    """True iff ``P(it)`` is real for every real ``t``."""
    other = P.re_line(0)
    if P.is_exact and tol == 0.0:
        return P == other
    return P.allclose(other, tol or 1e-12)


# ---------------------------------------------------------------------------
# gcd / square-free decomposition (exact inputs)

def monic(p: ComplexPoly) -> ComplexPoly:
    return p.scale(1 / p.leading) if p.coeffs else p


def poly_gcd(a: ComplexPoly, b: ComplexPoly) -> ComplexPoly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return monic(a)


def squarefree_decomposition(p: ComplexPoly) -> list[tuple[ComplexPoly, int]]:
    """Yun's algorithm: ``p = lc * prod(f_i ** i)`` with square-free coprime ``f_i``."""
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p / a
    c = dp / a
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        b = b / a
        c = d / a
        d = c - b.derivative()
        if a.degree > 0:
            out.append((monic(a), i))
        i += 1
    return out


# ---------------------------------------------------------------------------
# roots

@dataclass(frozen=True)
class RootMultiset:
    """Roots with multiplicities.  Values are exact when they were verified exactly."""

    roots: tuple = field(default_factory=tuple)
    residual: float = 0.0

    @property
    def total(self) -> int:
        return sum(m for _, m in self.roots)

    def values(self) -> list[complex]:
        return [complex(r) for r, _ in self.roots]

    def flat(self) -> list:
        out = []
        for r, m in self.roots:
            out.extend([r] * m)
        return out

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def _aberth(c: np.ndarray, maxiter: int = 2000) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration on ascending complex coefficients."""
    deg = len(c) - 1
    p = (c / c[-1])[::-1]
    if deg == 1:
        return np.array([-p[1]])
    dp = np.polyder(p)
    # Fujiwara bound for the initial circle
    rad = 2 * max(abs(p[k]) ** (1.0 / k) for k in range(1, deg + 1))
    rad = max(rad, 1e-8)
    z = 0.5 * rad * np.exp(1j * (2 * np.pi * np.arange(deg) / deg + 0.4))
    for _ in range(maxiter):
        pz = np.polyval(p, z)
        dpz = np.polyval(dp, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dpz != 0, pz / dpz, pz)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 0)
        z = z - w
        if np.all(np.abs(w) <= 4e-16 * (1 + np.abs(z))):
            break
    else:
        pz = np.polyval(p, z)
        scale = np.polyval(np.abs(p), np.abs(z))
        if np.any(np.abs(pz) > 1e-8 * scale):
            raise NonConvergence("Aberth iteration did not converge")
    return z


def _newton_polish(c: np.ndarray, z: np.ndarray, steps: int = 3) -> np.ndarray:
    p = c[::-1]
    dp = np.polyder(p)
    for _ in range(steps):
        d = np.polyval(dp, z)
        ok = d != 0
        step = np.zeros_like(z)
        step[ok] = np.polyval(p, z[ok]) / d[ok]
        z = z - step
    return z


def _cluster(points: Sequence[complex], mult: int, tol: float):
    """Greedy clustering; each point carries multiplicity ``mult``."""
    clusters: list[list] = []
    for z in points:
        for cl in clusters:
            if abs(cl[0] - z) <= tol * max(1.0, abs(z)):
                cl[1].append(z)
                break
        else:
            clusters.append([z, [z]])
    return [(complex(np.mean(cl[1])), mult * len(cl[1])) for cl in clusters]


def _snap_exact(P: ComplexPoly, value: complex, mult: int):
    """Try to replace a numerical root by an exactly verified rational one."""
    for den in (10**3, 10**6):
        cand = make_exact(
            Fraction(value.real).limit_denominator(den),
            Fraction(value.imag).limit_denominator(den),
        )
        if abs(complex(cand) - value) > 1e-6 * max(1.0, abs(value)):
            continue
        factor = ComplexPoly([-cand, 1]) ** mult
        if P.divmod(factor)[1].is_zero():
            return cand
    return value


def roots(P: ComplexPoly, tol: float = DEFAULT_TOL) -> RootMultiset:
    """All complex roots of ``P`` with multiplicities.

    Exact input is first split into square-free parts, so each numerical solve
    sees only simple roots; roots that are exactly rational (Gaussian) are
    returned as exact scalars.
    """
    if P.is_zero():
        raise ValueError("the zero polynomial has no root multiset")
    if P.degree == 0:
        return RootMultiset((), 0.0)
    found: list[tuple] = []
    if P.is_exact:
        for factor, mult in squarefree_decomposition(P):
            c = factor.to_numpy()
            z = _newton_polish(c, _aberth(c))
            for value, m in _cluster(list(z), mult, tol):
                found.append((_snap_exact(factor, value, 1) if m == mult else value, m))
    else:
        c = P.to_numpy()
        z = _newton_polish(c, _aberth(c))
        found = _cluster(list(z), 1, tol)
    found.sort(key=lambda rm: (round(complex(rm[0]).real, 9), round(complex(rm[0]).imag, 9)))
    cf = P.to_numpy()
    residual = max(abs(np.polyval(cf[::-1], complex(r))) for r, _ in found)
    return RootMultiset(tuple(found), float(residual))


_CMPS = ("lt", "le", "gt", "ge", "eq")


def rho_count(P: ComplexPoly, a, cmp: str, tol: float = DEFAULT_TOL, root_set: RootMultiset | None = None) -> int:
    """Number of roots (with multiplicity) whose real part compares to ``a`` as ``cmp``.

    Roots within ``tol`` of the line count as lying on it; a strict
    comparison with such a root present raises :class:`BoundaryAmbiguity`.
    """
    if cmp not in _CMPS:
        raise ValueError(f"cmp must be one of {_CMPS}")
    rs = root_set if root_set is not None else roots(P, tol)
    a = float(a)
    below = on = above = 0
    for r, m in rs:
        d = complex(r).real - a
        if abs(d) <= tol:
            on += m
        elif d < 0:
            below += m
        else:
            above += m
    if on and cmp in ("lt", "gt"):
        raise BoundaryAmbiguity(f"{on} root(s) within {tol} of Re x = {a}")
    return {"lt": below, "le": below + on, "gt": above, "ge": above + on, "eq": on}[cmp]


# ---------------------------------------------------------------------------
# nonnegativity on a vertical line

def _real_nonneg_exact(coeffs: list[Fraction]) -> bool:
    import sympy

    t = sympy.Symbol("t")
    desc = [sympy.QQ(c.numerator, c.denominator) for c in reversed(coeffs)]
    g = sympy.Poly.from_list(desc, t, domain=sympy.QQ)
    if g.is_zero:
        return True
    if g.degree() % 2 or g.LC() < 0:
        return False
    for factor, mult in g.sqf_list()[1]:
        if mult % 2 and factor.count_roots() > 0:
            return False
    return True


def _real_nonneg_float(coeffs: list[float], tol: float) -> bool:
    g = ComplexPoly(coeffs)
    if g.is_zero():
        return True
    if g.degree % 2 or complex(g.leading).real < 0:
        return False
    if g.degree == 0:
        return True
    rs = roots(g, tol)
    for r, m in rs:
        z = complex(r)
        if m % 2 and abs(z.imag) <= 1e-7 * max(1.0, abs(z)):
            return False
    return True


def nonneg_on_line(S: ComplexPoly, a=0, tol: float = 1e-12) -> bool:
    """Decide whether ``t -> S(a + it)`` is nonnegative on the whole real line.

    Exact input is decided exactly (square-free parts and real root counts);
    floating input by numerical real-root analysis.  ``S`` must be real on the
    line, otherwise :class:`NotRealOnLine` is raised.
    """
    g = S.on_line(a)
    if S.is_exact:
        if any(c.imag for c in g.coeffs):
            raise NotRealOnLine(f"polynomial is not real on Re x = {a}")
        return _real_nonneg_exact([Fraction(c.real) for c in g.coeffs])
    arr = g.to_numpy()
    scale = max(1.0, float(np.max(np.abs(arr), initial=0)))
    if np.any(np.abs(arr.imag) > 1e-9 * scale):
        raise NotRealOnLine(f"polynomial is not real on Re x = {a}")
    return _real_nonneg_float(list(arr.real), tol)
