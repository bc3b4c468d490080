"""Irreducible weight modules of A_P and their unitarizability, plus the n = 2
bimodule table.

An irreducible module with involution-compatible filtration is described by
its set of h-weights: a progression with step 2 that starts at ``alpha + 1``
or at minus infinity and ends at ``beta - 1`` or at plus infinity, with
``alpha, beta`` roots of ``P``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import NotDefined
from .numbers import coerce, format_number, is_exact
from .poly import ComplexPoly, roots

STEP = 2


@dataclass(frozen=True)
class ModuleDescriptor:
    """Weights ``start, start+2, ..., end``; ``None`` marks an infinite end.

    A doubly infinite module is ``residue + 2Z``; with ``residue=None`` the
    descriptor stands for the whole family, minus ``excluded_residues``.
    """

    start: object = None
    end: object = None
    step: int = STEP
    family_residue: object = None
    excluded_residues: tuple = ()

    @property
    def bounded_below(self) -> bool:
        return self.start is not None

    @property
    def bounded_above(self) -> bool:
        return self.end is not None

    @property
    def is_finite(self) -> bool:
        return self.bounded_below and self.bounded_above

    @property
    def is_family(self) -> bool:
        return not self.bounded_below and not self.bounded_above and self.family_residue is None

    @property
    def dimension(self) -> int | None:
        if not self.is_finite:
            return None
        return int(round(complex(self.end - self.start).real)) // self.step + 1

    def weights(self, limit: int | None = None) -> list:
        """Weights in increasing order; infinite progressions are truncated to ``limit`` terms."""
        if self.is_finite:
            return [self.start + self.step * j for j in range(self.dimension)]
        if limit is None:
            raise ValueError("infinite weight set needs a limit")
        if self.bounded_below:
            return [self.start + self.step * j for j in range(limit)]
        if self.bounded_above:
            return [self.end - self.step * j for j in range(limit)][::-1]
        if self.family_residue is None:
            raise ValueError("choose a residue first")
        half = limit // 2
        return [self.family_residue + self.step * j for j in range(-half, limit - half)]

    def instantiate(self, residue) -> "ModuleDescriptor":
        if not self.is_family:
            raise ValueError("only the doubly infinite family can be instantiated")
        residue = coerce(residue)
        for r in self.excluded_residues:
            if _congruent(residue, r, self.step, 1e-12):
                raise ValueError(f"residue {format_number(residue)} gives a reducible module")
        return ModuleDescriptor(None, None, self.step, residue, self.excluded_residues)

    def to_json(self) -> dict:
        out = {
            "start": "-inf" if self.start is None else _pair(self.start),
            "end": "+inf" if self.end is None else _pair(self.end),
            "step": self.step,
            "family_residue": None if self.family_residue is None else _pair(self.family_residue),
        }
        if self.is_family:
            out["excluded_residues"] = [_pair(r) for r in self.excluded_residues]
        return out

    def label(self) -> str:
        if self.is_family:
            ex = ", ".join(format_number(r) for r in self.excluded_residues)
            return f"lambda0 + 2Z, lambda0 not in {{{ex}}} mod 2"
        if not self.bounded_below and not self.bounded_above:
            return f"{format_number(self.family_residue)} + 2Z"
        lo = "-inf" if self.start is None else format_number(self.start)
        hi = "+inf" if self.end is None else format_number(self.end)
        return f"[{lo}, {hi}] step {self.step}"


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _close(a, b, tol: float) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(a)))


def _congruent(a, b, step: int, tol: float) -> bool:
    """``a - b`` lies in ``step * Z``."""
    d = complex(a) - complex(b)
    if abs(d.imag) > tol:
        return False
    q = d.real / step
    if is_exact(a) and is_exact(b):
        dd = coerce(a) - coerce(b)
        return getattr(dd, "imag", 0) == 0 and (Fraction(dd.real) / step).denominator == 1
    return abs(q - round(q)) <= tol


def _nonneg_multiple(d, step: int, tol: float) -> int | None:
    """``d / step`` when it is a nonnegative integer, otherwise ``None``."""
    if is_exact(d):
        if getattr(d, "imag", 0) != 0:
            return None
        q = Fraction(d.real) / step
        return int(q) if q.denominator == 1 and q >= 0 else None
    z = complex(d)
    if abs(z.imag) > tol:
        return None
    q = z.real / step
    k = round(q)
    return int(k) if abs(q - k) <= tol and k >= 0 else None


def _vanishes(P: ComplexPoly, x, tol: float, rootlist) -> bool:
    """``P(x) == 0`` decided against the clustered roots."""
    return any(_close(x, r, tol) for r in rootlist)


def _breaks(P: ComplexPoly, lam, rootlist, tol: float) -> bool:
    return _vanishes(P, lam - 1, tol, rootlist)


def enumerate_irreducibles(P: ComplexPoly, n_parity: str | None = None, tol: float = 1e-9) -> list[ModuleDescriptor]:
    """All irreducible modules, with the doubly infinite ones as a single family descriptor."""
    parity = n_parity or ("even" if P.degree % 2 == 0 else "odd")
    if parity not in ("even", "odd"):
        raise ValueError("n_parity must be 'even' or 'odd'")
    rs = roots(P, tol)
    rootlist = [r for r, _ in rs]
    starts = [r + 1 for r in rootlist]
    ends = [r - 1 for r in rootlist]
    out: list[ModuleDescriptor] = []

    # finite
    for s in starts:
        for t in ends:
            k = _nonneg_multiple(t - s, STEP, tol)
            if k is None:
                continue
            interior = [s + STEP * j for j in range(1, k + 1)]
            if any(_breaks(P, lam, rootlist, tol) for lam in interior):
                continue
            end = s + STEP * k if is_exact(s) else t
            out.append(ModuleDescriptor(s, end))
    # bounded below
    for s in starts:
        if _progression_meets_root(s, +1, rootlist, tol):
            continue
        out.append(ModuleDescriptor(s, None))
    if parity == "even":
        for t in ends:
            if _progression_meets_root(t, -1, rootlist, tol):
                continue
            out.append(ModuleDescriptor(None, t))
        excluded = []
        for s in starts:
            if not any(_congruent(s, e, STEP, tol) for e in excluded):
                excluded.append(s)
        out.append(ModuleDescriptor(None, None, STEP, None, tuple(_reduce_residue(e) for e in excluded)))
    return out


def _reduce_residue(z):
    if is_exact(z):
        re_ = Fraction(coerce(z).real) % STEP
        return coerce(z) - (Fraction(coerce(z).real) - re_)
    w = complex(z)
    return complex(w.real % STEP, w.imag)


def _progression_meets_root(endpoint, direction: int, rootlist, tol: float) -> bool:
    """Does the half-infinite progression hit a point with ``P(lam - 1) = 0`` away from its minimum?

    For ``direction=+1`` the progression is ``s, s+2, ...`` and the relevant
    points are ``s+2, s+4, ...``.  For ``direction=-1`` it is ``..., t-2, t``
    and every point counts.
    """
    for r in rootlist:
        lam = r + 1
        d = (lam - endpoint) * direction
        k = _nonneg_multiple(d, STEP, tol)
        if k is None:
            continue
        if direction == +1 and k == 0:
            continue
        return True
    return False


@dataclass(frozen=True)
class UnitarityReport:
    unitarizable: bool
    failing_weight: object = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "unitarizable": self.unitarizable,
            "failing_weight": None if self.failing_weight is None else _pair(self.failing_weight),
            "reason": self.reason,
        }


def _real_part_exact(z):
    return Fraction(coerce(z).real) if is_exact(z) else complex(z).real


def is_unitarizable_module(P: ComplexPoly, d: ModuleDescriptor, tol: float = 1e-9) -> UnitarityReport:
    """Positivity of the unique invariant form: weights real and ``P(lam - 1) < 0`` off the minimum."""
    if P.degree % 2:
        raise NotDefined("the unitarity criterion needs n even")
    if any(getattr(c, "imag", 0) != 0 for c in P.coeffs):
        raise NotDefined("the unitarity criterion needs P with real coefficients")
    if d.is_family:
        raise ValueError("pick a residue with ModuleDescriptor.instantiate first")
    anchor = d.start if d.bounded_below else (d.end if d.bounded_above else d.family_residue)
    if abs(complex(anchor).imag) > (0 if is_exact(anchor) else tol):
        return UnitarityReport(False, anchor, "weights not real (Lambda not in R)")
    rs = roots(P, tol)
    R = 2 + max((abs(complex(r)) for r, _ in rs), default=0.0)
    a = _real_part_exact(anchor)
    Pr = ComplexPoly(_real_part_exact(c) for c in P.coeffs)

    def value(lam):
        v = Pr(lam - 1)
        return v if is_exact(v) else complex(v).real

    def check(lam):
        v = value(lam)
        return v < 0 if is_exact(v) else v < -tol * max(1.0, abs(v))

    # explicit window over Lambda'; beyond |lam| > R the sign of P(lam - 1) is the asymptotic one
    if d.bounded_below:
        first = a + STEP
    else:
        top = _real_part_exact(d.end) if d.bounded_above else a
        first = top - STEP * max(0, math.ceil((float(top) + R) / STEP))
    if d.bounded_above:
        last = _real_part_exact(d.end)
    else:
        last = first + STEP * max(0, math.ceil((R - float(first)) / STEP))
    lam = first
    while lam <= last:
        if not check(lam):
            return UnitarityReport(False, lam, f"P(lambda - 1) >= 0 at lambda = {format_number(lam)}")
        lam = lam + STEP
    lo = first
    lead = float(complex(P.leading).real)
    if not d.bounded_above and lead >= 0:
        return UnitarityReport(False, lam, "P(lambda - 1) > 0 for large lambda")
    if not d.bounded_below:
        sign_minus = lead * (-1) ** P.degree
        if sign_minus >= 0:
            w = lo - STEP
            return UnitarityReport(False, w, "P(lambda - 1) > 0 for very negative lambda")
    return UnitarityReport(True, None, "all weights real and P(lambda - 1) < 0 on Lambda'")


# ---------------------------------------------------------------------------
# n = 2 bimodules

def sl2_form_coefficient(k: int, lam):
    """Ratio ``(eu, eu) / (u, u)`` for a highest weight vector ``u`` of weight ``2k``."""
    lam = coerce(lam)
    k = coerce(k)
    return (k + 1) / (4 * k + 6) * ((k + 1) ** 2 - (lam + 1) ** 2)


def sl2_parameter_from_P(P: ComplexPoly):
    """``lam`` with ``P = kappa ((lam + 1)^2 - x^2)``, ``kappa > 0``."""
    if P.degree != 2 or P.coeff(1) != 0:
        raise ValueError("P must be kappa((lam+1)^2 - x^2)")
    kappa = -P.leading
    if getattr(kappa, "imag", 0) != 0 or kappa <= 0:
        raise ValueError("leading coefficient must be negative real")
    s = P.coeff(0) / kappa
    if is_exact(s) and getattr(s, "imag", 0) == 0 and s >= 0:
        r = Fraction(s)
        num, den = r.numerator, r.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd) - 1
    root = cmath.sqrt(complex(s))
    return (root - 1) if abs(root.imag) > 0 else root.real - 1


def _chain_positive(lam, k_from, k_to=None) -> bool:
    """Coefficients for ``k = k_from, k_from + 1, ...`` (below ``k_to`` if given) are positive reals.

    ``(k+1)^2 - (lam+1)^2`` increases with ``k`` for ``k >= 0``, so an infinite
    chain is positive as soon as its first coefficient is.
    """
    stop = k_to if k_to is not None else k_from + 1
    k = k_from
    while k < stop:
        c = sl2_form_coefficient(k, lam)
        if is_exact(c):
            if getattr(c, "imag", 0) != 0 or c <= 0:
                return False
        else:
            z = complex(c)
            if abs(z.imag) > 1e-12 * max(1.0, abs(z)) or z.real <= 0:
                return False
        k = k + 1
    return True


def classify_sl2_bimodules(lam) -> list[tuple[str, bool]]:
    """Irreducible bimodules for ``n = 2`` with their unitarizability.

    Unitarity of a bimodule whose components have highest weights
    ``2k`` for ``k`` in a chain is positivity of every coefficient linking
    consecutive components.
    """
    lam = coerce(lam)
    z = complex(lam)
    out = []
    is_int = abs(z.imag) == 0 and float(z.real).is_integer() and z.real != -1
    is_half = abs(z.imag) == 0 and (2 * z.real).is_integer() and not float(z.real).is_integer()
    if is_int:
        l = int(z.real)
        if l < 0:
            l = -2 - l
        L = Fraction(l)
        out.append(("regular", _chain_positive(L, 0)))
        out.append(("annihilator", _chain_positive(L, l + 1)))
        name = "C" if l == 0 else f"End(V), dim V = {l + 1}"
        out.append((name, _chain_positive(L, 0, l)))
        return out
    if is_half:
        L = Fraction(z.real).limit_denominator(2) if not is_exact(lam) else Fraction(coerce(lam).real)
        if L < Fraction(-1, 2):
            L = -2 - L
        out.append(("regular", _chain_positive(L, 0)))
        out.append(("second", _chain_positive(L, L + 1)))
        return out
    out.append(("regular", _chain_positive(lam, 0)))
    return out


def one_dim_bimodule_candidates(P: ComplexPoly, tol: float = 1e-9) -> list:
    """Weights ``lam`` with ``P(lam - 1) = P(lam + 1) = 0``."""
    rs = [r for r, _ in roots(P, tol)] if P.degree > 0 else []
    out = []
    for a in rs:
        for b in rs:
            if _close(b - a, 2, tol):
                lam = a + 1
                if not any(_close(lam, x, tol) for x in out):
                    out.append(lam)
    return out
