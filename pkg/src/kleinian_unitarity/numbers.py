"""Exact Gaussian rationals and the coefficient text format.

Exact scalars are ``Fraction`` (real) or ``GaussRational`` (nonzero imaginary
part).  Floating scalars are ``complex``.  Mixing an exact scalar with a float
yields a ``complex``.
"""

from __future__ import annotations

import numbers
import re
from fractions import Fraction


class GaussRational:
    """A complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def conjugate(self):
        return make_exact(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_number(self)

    def __eq__(self, other):
        p = _exact_parts(other)
        if p is None:
            if isinstance(other, (float, complex)):
                return complex(self) == other
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __neg__(self):
        return make_exact(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        p = _exact_parts(other)
        if p is None:
            return _float_fallback(self, other, lambda a, b: a + b)
        return make_exact(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = _exact_parts(other)
        if p is None:
            return _float_fallback(self, other, lambda a, b: a - b)
        return make_exact(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = _exact_parts(other)
        if p is None:
            return _float_fallback(self, other, lambda a, b: b - a)
        return make_exact(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        p = _exact_parts(other)
        if p is None:
            return _float_fallback(self, other, lambda a, b: a * b)
        a, b = self.re, self.im
        c, d = p
        return make_exact(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = _exact_parts(other)
        if p is None:
            return _float_fallback(self, other, lambda a, b: a / b)
        c, d = p
        den = c * c + d * d
        if not den:
            raise ZeroDivisionError("GaussRational division by zero")
        a, b = self.re, self.im
        return make_exact((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        p = _exact_parts(other)
        if p is None:
            return _float_fallback(self, other, lambda a, b: b / a)
        return GaussRational(*p) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return complex(self) ** k
        if k < 0:
            return 1 / (self ** (-k))
        out = Fraction(1)
        base = self
        while k:
            if k & 1:
                out = base * out
            base = base * base
            k >>= 1
        return out


def _float_fallback(z, other, op):
    if isinstance(other, (float, complex, numbers.Complex)):
        return op(complex(z), complex(other))
    return NotImplemented


def _exact_parts(x):
    if isinstance(x, GaussRational):
        return x.re, x.im
    if isinstance(x, numbers.Rational):
        return Fraction(x), Fraction(0)
    return None


def make_exact(re, im=0):
    """Normalized exact scalar: a ``Fraction`` when the imaginary part vanishes."""
    re = Fraction(re)
    im = Fraction(im)
    if im:
        return GaussRational(re, im)
    return re


I = GaussRational(0, 1)


def is_exact(z) -> bool:
    return isinstance(z, (Fraction, GaussRational, int)) and not isinstance(z, bool)


def coerce(z):
    """Bring a scalar into one of the two supported representations."""
    if isinstance(z, GaussRational):
        return make_exact(z.re, z.im)
    if isinstance(z, bool):
        return Fraction(int(z))
    if isinstance(z, numbers.Rational):
        return Fraction(z)
    if isinstance(z, str):
        return parse_number(z)
    if isinstance(z, numbers.Complex):
        return complex(z)
    raise TypeError(f"unsupported scalar {z!r}")


def to_float(z) -> complex:
    return complex(z)


def rationalize(z, max_denominator: int | None = None):
    """Exact scalar equal to a float (binary expansion) or its best rational fit."""
    if is_exact(z):
        return coerce(z)
    z = complex(z)
    re, im = Fraction(z.real), Fraction(z.imag)
    if max_denominator is not None:
        re = re.limit_denominator(max_denominator)
        im = im.limit_denominator(max_denominator)
    return make_exact(re, im)


_REAL = r"[0-9]*\.?[0-9]*(?:[eE][+-]?[0-9]+)?(?:/[0-9]+)?"


def _parse_real(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?" + _REAL, text) or not re.search(r"[0-9]", text):
        raise ValueError(f"cannot parse real number {text!r}")
    return Fraction(text)


def parse_number(text: str):
    """Parse ``a``, ``bi`` or ``a+bi`` with decimal or ``p/q`` parts, exactly."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty number")
    if s[-1] not in "ij":
        return _parse_real(s)
    body = s[:-1]
    split = None
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE":
            split = pos
            break
    if split is None:
        re_part, im_part = "0", body
    else:
        re_part, im_part = body[:split], body[split:]
    if im_part in ("", "+"):
        im = Fraction(1)
    elif im_part == "-":
        im = Fraction(-1)
    else:
        im = _parse_real(im_part)
    return make_exact(_parse_real(re_part), im)


def _format_real(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_number(z) -> str:
    """Inverse of :func:`parse_number` (floats printed with ``repr`` precision)."""
    if isinstance(z, (Fraction, int)) and not isinstance(z, bool):
        return _format_real(Fraction(z))
    if isinstance(z, GaussRational):
        re_, im_ = z.re, z.im
    else:
        z = complex(z)
        re_, im_ = z.real, z.imag
    if not im_:
        return _format_real(re_)
    im_text = _format_real(abs(im_))
    if im_text == "1":
        im_text = ""
    sign = "-" if im_ < 0 else "+"
    if not re_:
        return f"{'-' if im_ < 0 else ''}{im_text}i"
    return f"{_format_real(re_)}{sign}{im_text}i"
