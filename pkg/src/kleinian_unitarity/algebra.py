"""The algebra A_P on generators e, f, h with

    [h, e] = 2e,  [h, f] = -2f,  ef = P(h - 1),  fe = P(h + 1).

Every element is stored in normal form as a sum of weight components:
weight ``2p > 0`` is ``S(h) e^p``, weight ``-2q < 0`` is ``f^q S(h)`` and
weight 0 is ``S(h)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import NotDefined
from .numbers import coerce, format_number, parse_number
from .poly import ComplexPoly, ONE, X


class AlgebraElement:
    """Immutable element of A_P given by its weight components."""

    __slots__ = ("_comp",)

    def __init__(self, components: Mapping[int, ComplexPoly] | Iterable = ()):
        items = components.items() if isinstance(components, Mapping) else components
        comp = {}
        for k, S in items:
            if k % 2:
                raise ValueError(f"weights are even integers, got {k}")
            S = S if isinstance(S, ComplexPoly) else ComplexPoly([S])
            S = comp.get(k, ComplexPoly()) + S
            if S.is_zero():
                comp.pop(k, None)
            else:
                comp[k] = S
        object.__setattr__(self, "_comp", tuple(sorted(comp.items())))

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @property
    def components(self) -> dict[int, ComplexPoly]:
        return dict(self._comp)

    def weights(self) -> list[int]:
        return [k for k, _ in self._comp]

    def component(self, k: int) -> ComplexPoly:
        for w, S in self._comp:
            if w == k:
                return S
        return ComplexPoly()

    def is_zero(self) -> bool:
        return not self._comp

    @property
    def is_exact(self) -> bool:
        return all(S.is_exact for _, S in self._comp)

    def __iter__(self):
        return iter(self._comp)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self._comp == other._comp

    def __hash__(self):
        return hash(self._comp)

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            other = AlgebraElement.scalar(other)
        return AlgebraElement(list(self._comp) + list(other._comp))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement((k, -S) for k, S in self._comp)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            other = AlgebraElement.scalar(other)
        return self + (-other)

    def scale(self, c) -> "AlgebraElement":
        c = coerce(c)
        return AlgebraElement((k, S.scale(c)) for k, S in self._comp)

    def __mul__(self, c):
        if isinstance(c, AlgebraElement):
            raise TypeError("use AlgebraContext.multiply for products of elements")
        return self.scale(c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"AlgebraElement({format_element(self)})"

    def allclose(self, other: "AlgebraElement", tol: float = 1e-9) -> bool:
        ks = set(self.weights()) | set(other.weights())
        return all(self.component(k).allclose(other.component(k), tol) for k in ks)

    # constructors -------------------------------------------------------
    @classmethod
    def scalar(cls, c) -> "AlgebraElement":
        return cls({0: ComplexPoly([c])})

    @classmethod
    def h_poly(cls, S: ComplexPoly) -> "AlgebraElement":
        return cls({0: S})

    @classmethod
    def weight(cls, k: int, S: ComplexPoly) -> "AlgebraElement":
        return cls({k: S})


def E(p: int = 1) -> AlgebraElement:
    return AlgebraElement({2 * p: ONE}) if p >= 0 else F(-p)


def F(q: int = 1) -> AlgebraElement:
    return AlgebraElement({-2 * q: ONE}) if q >= 0 else E(-q)


def H() -> AlgebraElement:
    return AlgebraElement({0: X})


def weight_component(u: AlgebraElement, k: int) -> ComplexPoly:
    return u.component(k)


@dataclass(frozen=True)
class AlgebraContext:
    """The defining parameter ``P`` of the algebra."""

    P: ComplexPoly

    def __post_init__(self):
        if self.P.degree < 1:
            raise ValueError("the defining polynomial must be nonconstant")

    @property
    def n(self) -> int:
        return self.P.degree

    # products of P-shifts, cached per context
    def _prod(self, start, step: int, count: int) -> ComplexPoly:
        return _shift_product(self.P, start, step, count)

    def _ef(self, b: int, c: int):
        """``e^b f^c`` as ``(a', M, b')`` meaning ``f^{a'} M(h) e^{b'}``."""
        if b >= c:
            return 0, self._prod(-1 - 2 * (b - c), -2, c), b - c
        return c - b, self._prod(-1 - 2 * (c - b), -2, b), 0

    def _fe(self, a: int, m: int):
        """``f^a e^m`` as ``(a', M, b')``."""
        if a >= m:
            return a - m, self._prod(1, 2, m), 0
        return 0, self._prod(1, 2, a), m - a

    def _normalize(self, A: int, W: ComplexPoly, B: int):
        """Normal form of ``f^A W(h) e^B``."""
        if A == 0 or B == 0:
            return A, W, B
        A2, N, B2 = self._fe(A, B)
        return A2, W.shift(2 * A - 2 * A2) * N, B2

    def _mono(self, a: int, S: ComplexPoly, b: int, c: int, T: ComplexPoly, d: int):
        a2, M, b2 = self._ef(b, c)
        W = S.shift(-2 * a2) * M * T.shift(-2 * b2)
        return self._normalize(a + a2, W, b2 + d)

    def multiply(self, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
        out: dict[int, ComplexPoly] = {}
        for k1, S in u:
            a, b = _powers(k1)
            for k2, T in v:
                c, d = _powers(k2)
                A, W, B = self._mono(a, S, b, c, T, d)
                k = 2 * (B - A)
                out[k] = out.get(k, ComplexPoly()) + W
        return AlgebraElement(out)

    def product(self, *factors: AlgebraElement) -> AlgebraElement:
        out = AlgebraElement.scalar(1)
        for u in factors:
            out = self.multiply(out, u)
        return out

    def power(self, u: AlgebraElement, k: int) -> AlgebraElement:
        return self.product(*([u] * k))

    def commutator(self, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
        return self.multiply(u, v) - self.multiply(v, u)

    # involutions ---------------------------------------------------------
    def involution_r(self, u: AlgebraElement) -> AlgebraElement:
        """Antilinear automorphism with ``e -> -f``, ``f -> -e``, ``h -> -h``."""
        if self.n % 2 or not _is_r_compatible(self.P):
            raise NotDefined("r needs n even and P(it) real for real t")
        out = {}
        for k, S in u:
            p = abs(k) // 2
            out[-k] = S.conj().compose_affine(-1, 2 * p).scale((-1) ** p)
        return AlgebraElement(out)

    def antiinvolution_tau(self, u: AlgebraElement) -> AlgebraElement:
        """Linear antiautomorphism with ``e -> e``, ``f -> (-1)^n f``, ``h -> -h``."""
        if not _is_tau_compatible(self.P):
            raise NotDefined("tau needs P(x) = (-1)^n P(-x)")
        out = {}
        for k, S in u:
            p = abs(k) // 2
            sign = (-1) ** (self.n * p) if k < 0 else 1
            out[k] = S.compose_affine(-1, 2 * p).scale(sign)
        return AlgebraElement(out)


def _powers(k: int) -> tuple[int, int]:
    return (0, k // 2) if k >= 0 else (-k // 2, 0)


@lru_cache(maxsize=4096)
def _shift_product(P: ComplexPoly, start, step: int, count: int) -> ComplexPoly:
    """``prod_{j=0}^{count-1} P(h + start + j*step)``."""
    out = ONE
    for j in range(count):
        out = out * P.shift(start + j * step)
    return out


def multiply(ctx: AlgebraContext, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
    return ctx.multiply(u, v)


def involution_r(ctx: AlgebraContext, u: AlgebraElement) -> AlgebraElement:
    return ctx.involution_r(u)


def antiinvolution_tau(ctx: AlgebraContext, u: AlgebraElement) -> AlgebraElement:
    return ctx.antiinvolution_tau(u)


def _is_tau_compatible(P: ComplexPoly) -> bool:
    return P == P.compose_affine(-1, 0).scale((-1) ** P.degree)


def _is_r_compatible(P: ComplexPoly) -> bool:
    return P == P.bar_reflect(0)


@dataclass(frozen=True)
class LiftingReport:
    n: int
    tau_lifts: bool
    r_lifts: bool
    r_tau_commute: bool
    notes: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "tau_lifts": self.tau_lifts,
            "r_lifts": self.r_lifts,
            "r_tau_commute": self.r_tau_commute,
            "notes": list(self.notes),
        }


def lifting_report(P: ComplexPoly) -> LiftingReport:
    """Which of tau, r and their commutation are available for ``A_P``."""
    n = P.degree
    notes = []
    tau = _is_tau_compatible(P)
    if not tau:
        notes.append("tau does not lift: P(x) != (-1)^n P(-x)")
    real_on_iR = _is_r_compatible(P)
    if n % 2:
        r = False
        notes.append("n odd: r is not available and r, tau do not commute")
    else:
        r = real_on_iR
        if not r:
            notes.append("r does not lift: conj(P)(-x) != P(x)")
    commute = tau and r and n % 2 == 0
    return LiftingReport(n, tau, r, commute, tuple(notes))


# ---------------------------------------------------------------------------
# text format: sums of f^a*(poly in h)*e^b

def _format_coeff(c) -> str:
    s = format_number(c)
    return f"({s})" if ("i" in s and any(ch in s[1:] for ch in "+-")) else s


def format_h_poly(S: ComplexPoly) -> str:
    if S.is_zero():
        return "0"
    terms = []
    for k in range(S.degree, -1, -1):
        c = S.coeff(k)
        if c == 0:
            continue
        mon = "" if k == 0 else ("h" if k == 1 else f"h^{k}")
        cs = _format_coeff(c)
        neg = cs.startswith("-") and not cs.startswith("(")
        if neg:
            cs = cs[1:]
        if mon:
            body = mon if cs == "1" else f"{cs}*{mon}"
        else:
            body = cs
        terms.append(("-" if neg else "+", body))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def format_element(u: AlgebraElement) -> str:
    if u.is_zero():
        return "0"
    parts = []
    for k, S in sorted(u, key=lambda kv: kv[0]):
        body = f"({format_h_poly(S)})"
        if k > 0:
            body += "*e" if k == 2 else f"*e^{k // 2}"
        elif k < 0:
            body = ("f*" if k == -2 else f"f^{-k // 2}*") + body
        parts.append(body)
    return " + ".join(parts)


def parse_h_poly(text: str) -> ComplexPoly:
    """Parse a polynomial in ``h`` written as a sum of ``c*h^k`` terms."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")") and _balanced(s[1:-1]):
        s = s[1:-1]
    out = ComplexPoly()
    for term in _split_terms(s):
        t = term.replace(" ", "")
        sign = 1
        while t and t[0] in "+-":
            if t[0] == "-":
                sign = -sign
            t = t[1:]
        if not t:
            raise ValueError(f"empty term in {text!r}")
        m = re.fullmatch(r"(?:(.*?)\*)?h(?:\^(\d+))?", t)
        if m and (m.group(1) is None or m.group(1) != ""):
            c = _parse_coeff(m.group(1)) if m.group(1) else Fraction(1)
            k = int(m.group(2)) if m.group(2) else 1
        elif t.endswith("h") and "*" not in t:
            c, k = _parse_coeff(t[:-1]), 1
        else:
            c, k = _parse_coeff(t), 0
        out = out + ComplexPoly.monomial(k, c).scale(sign)
    return out


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def _parse_coeff(s: str):
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    return parse_number(s)


def _split_terms(s: str) -> list[str]:
    """Split a sum at top-level + and - that are not exponent or complex-literal signs."""
    parts, depth, cur = [], 0, ""
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur.strip():
            prev = cur.rstrip()
            if prev[-1] in "eE" and len(prev) >= 2 and prev[-2].isdigit():
                cur += ch
                continue
            if prev[-1] in "*^":
                cur += ch
                continue
            parts.append(cur)
            cur = ch
            continue
        cur += ch
    if cur.strip():
        parts.append(cur)
    return parts


def parse_element(text: str) -> AlgebraElement:
    """Inverse of :func:`format_element`; also accepts bare ``e``, ``f``, ``h`` factors."""
    s = text.strip()
    if s in ("", "0"):
        return AlgebraElement()
    out = AlgebraElement()
    for term in _split_sum(s):
        out = out + _parse_term(term)
    return out


def _split_sum(s: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for i in range(len(s)):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch == "+" and cur.strip():
            parts.append(cur)
            cur = ""
            continue
        cur += ch
    if cur.strip():
        parts.append(cur)
    return parts


def _parse_term(term: str) -> AlgebraElement:
    t = term.strip()
    sign = 1
    if t.startswith("-"):
        sign, t = -1, t[1:].strip()
    factors = _split_star(t)
    a = b = 0
    S = ONE
    poly_seen = False
    for fac in factors:
        fac = fac.strip()
        m = re.fullmatch(r"([ef])(?:\^(\d+))?", fac)
        if m:
            p = int(m.group(2)) if m.group(2) else 1
            if m.group(1) == "f":
                if poly_seen or b:
                    raise ValueError(f"f must come first in term {term!r}")
                a += p
            else:
                b += p
            continue
        if b:
            raise ValueError(f"e must come last in term {term!r}")
        S = S * parse_h_poly(fac)
        poly_seen = True
    if a and b:
        raise ValueError(f"term {term!r} is not in normal form")
    k = 2 * b - 2 * a
    return AlgebraElement({k: S.scale(sign)})


def _split_star(t: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in t:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch == "*":
            parts.append(cur)
            cur = ""
            continue
        cur += ch
    parts.append(cur)
    # rejoin "c*h^k" pieces that belong to a polynomial factor
    out = []
    for p in parts:
        ps = p.strip()
        if out and re.fullmatch(r"h(\^\d+)?", ps) and not re.fullmatch(r"[ef](\^\d+)?", out[-1].strip()):
            out[-1] = out[-1] + "*" + p
        else:
            out.append(p)
    return out
