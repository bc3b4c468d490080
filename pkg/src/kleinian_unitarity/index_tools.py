"""Index of a polynomial along a vertical line, root-count inequalities for
line-nonnegative polynomials, and explicit certificates that zero lies in the
cone of norms (non-unitarizability witnesses).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    HypothesisFails,
    NearZeroOnLine,
    PairingFailure,
    RootOnLine,
    SearchExhausted,
)
from .numbers import I, coerce, is_exact, make_exact
from .poly import ComplexPoly, RootMultiset, nonneg_on_line, roots

HALF_PI = math.pi / 2


# ---------------------------------------------------------------------------
# index

def index(F: ComplexPoly, a=0, tol: float = 1e-9, root_set: RootMultiset | None = None) -> int:
    """``sum over roots r of -sign(Re r - a)``, counted with multiplicity."""
    if F.is_zero():
        raise ValueError("index of the zero polynomial")
    rs = root_set if root_set is not None else roots(F, tol)
    a = float(a)
    out = 0
    for r, m in rs:
        d = complex(r).real - a
        if abs(d) <= tol:
            raise RootOnLine(f"root {complex(r)} lies on Re x = {a}")
        out += -m if d > 0 else m
    return out


def _horner(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z, dtype=complex)
    for coef in c[::-1]:
        acc = acc * z + coef
    return acc


def index_by_winding(F: ComplexPoly, a=0, max_points: int = 1 << 18) -> int:
    """The index from the continuous argument of ``F(a + it)``, without computing roots.

    The argument is unwrapped on an adaptively refined grid; the remaining
    change beyond the sampled segment is read off the leading term.
    """
    if F.degree < 1:
        return 0
    c = F.to_numpy()
    a = float(a)
    lead = c[-1]
    # Cauchy bound on the roots; beyond it the leading term dominates
    bound = 1 + float(np.max(np.abs(c[:-1] / lead))) if len(c) > 1 else 1.0
    T = 50.0 * (bound + abs(a) + 1)
    t = np.concatenate([-np.geomspace(T, 1e-3, 400), np.linspace(-1e-3, 1e-3, 3), np.geomspace(1e-3, T, 400)])
    t = np.unique(np.concatenate([t, np.linspace(-2 * bound - 2, 2 * bound + 2, 2000)]))
    for _ in range(40):
        vals = _horner(c, a + 1j * t)
        if np.any(vals == 0):
            raise RootOnLine("F vanishes on the sampled line")
        ang = np.angle(vals)
        jump = np.abs(np.diff(np.unwrap(ang)))
        bad = np.nonzero(jump > math.pi / 8)[0]
        if len(bad) == 0:
            break
        if len(t) + len(bad) > max_points:
            raise NearZeroOnLine("argument varies too fast to unwrap; a root is very close to the line")
        t = np.unique(np.concatenate([t, 0.5 * (t[bad] + t[bad + 1])]))
    phi = np.unwrap(ang)
    d = F.degree
    base = np.angle(lead)
    lim_plus = base + d * HALF_PI
    lim_minus = base - d * HALF_PI
    end_plus = phi[-1] + _nearest_branch(lim_plus - phi[-1])
    end_minus = phi[0] + _nearest_branch(lim_minus - phi[0])
    return int(round((end_plus - end_minus) / math.pi))


def _nearest_branch(delta: float) -> float:
    return delta - 2 * math.pi * round(delta / (2 * math.pi))


# ---------------------------------------------------------------------------
# root-count inequalities for polynomials with nonnegative real part on a line

@dataclass(frozen=True)
class RootBalanceReport:
    rho_gt: int
    rho_lt: int
    rho_eq: int
    k: int
    inequality_1: bool
    inequality_2: bool
    equality: str | None
    leading_sign_ok: bool | None

    @property
    def holds(self) -> bool:
        return self.inequality_1 and self.inequality_2 and self.leading_sign_ok is not False


def root_balance_check(F: ComplexPoly, a=0, tol: float = 1e-7) -> RootBalanceReport:
    """Check the root-count inequalities for ``F`` with ``Re F >= 0`` on ``Re x = a``.

    ``k`` is the number of distinct roots on the line with odd multiplicity.
    When one inequality is an equality the degree is ``2d - 1`` and the
    leading coefficient has sign ``(-1)^d`` (more roots right of the line) or
    ``(-1)^(d-1)`` (more roots left of it).
    """
    if not nonneg_on_line(F.re_line(a), a):
        raise HypothesisFails("Re F is not nonnegative on the line")
    rs = roots(F, tol) if F.degree > 0 else RootMultiset(())
    a_f = float(a)
    gt = lt = eq = k = 0
    for r, m in rs:
        dd = complex(r).real - a_f
        if abs(dd) <= tol:
            eq += m
            k += m % 2
        elif dd > 0:
            gt += m
        else:
            lt += m
    ineq1 = gt <= lt + k + 1
    ineq2 = lt <= gt + k + 1
    equality = None
    sign_ok = None
    lc = complex(F.leading)
    if gt == lt + k + 1 or lt == gt + k + 1:
        equality = "right" if gt == lt + k + 1 else "left"
        deg = F.degree
        if deg % 2 == 0 or abs(lc.imag) > 1e-9 * abs(lc):
            sign_ok = False
        else:
            d = (deg + 1) // 2
            want = (-1) ** d if equality == "right" else (-1) ** (d - 1)
            sign_ok = (lc.real > 0) == (want > 0)
    return RootBalanceReport(gt, lt, eq, k, ineq1, ineq2, equality, sign_ok)


# ---------------------------------------------------------------------------
# argument profiles

@dataclass(frozen=True)
class ArgumentProfile:
    line: float
    t: np.ndarray = field(repr=False)
    arg: np.ndarray = field(repr=False)
    log_modulus: np.ndarray = field(repr=False)
    window: float
    bound: float
    small_bound: float

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return [(float(t), float(g), float(math.exp(min(m, 700)))) for t, g, m in zip(self.t, self.arg, self.log_modulus)]

    def is_bounded(self, a: float) -> bool:
        return self.bound < a

    def is_small(self, eps: float) -> bool:
        return self.small_bound < eps


ArgEvaluator = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def root_evaluator(F: ComplexPoly, a: float, tol: float = 1e-12) -> ArgEvaluator:
    """Continuous argument and log-modulus of ``F(a + it)`` from the factored form."""
    rs = roots(F, 1e-9) if F.degree > 0 else RootMultiset(())
    lead = complex(F.leading)
    pts = [(complex(r), m) for r, m in rs]
    for z, _ in pts:
        if abs(z.real - a) <= tol:
            raise NearZeroOnLine(f"root {z} lies on the line")
    # continuous branch whose limit at t -> -infinity is the principal value
    lim = math.atan2(lead.imag, lead.real) - sum(m for _, m in pts) * HALF_PI
    shift = -_nearest_branch_offset(lim)

    def ev(t: np.ndarray):
        arg = np.full_like(t, math.atan2(lead.imag, lead.real), dtype=float)
        logm = np.full_like(t, math.log(abs(lead)), dtype=float)
        for z, m in pts:
            u = a - z.real
            v = t - z.imag
            if u > 0:
                arg += m * np.arctan(v / u)
            else:
                arg += m * (-math.pi - np.arctan(v / -u))
            logm += m * 0.5 * np.log(u * u + v * v)
        return arg + shift, logm

    return ev


def _nearest_branch_offset(x: float) -> float:
    """Multiple of ``2 pi`` to subtract from ``x`` to land in ``(-pi, pi]``."""
    return 2 * math.pi * math.floor((x + math.pi) / (2 * math.pi)) if not (-math.pi < x <= math.pi) else 0.0


def _sample_grid(window: float, t_max: float, density: int, n_samples: int | None) -> np.ndarray:
    inner_n = max(int(2 * window * density), 64)
    if n_samples is not None:
        inner_n = min(inner_n, n_samples)
    inner = np.linspace(-window, window, inner_n)
    outer = np.geomspace(window, max(t_max, 2 * window), max(200, inner_n // 10))
    return np.unique(np.concatenate([-outer[::-1], inner, outer]))


def argument_profile(
    F: ComplexPoly,
    a=0,
    eps: float = 0.3,
    t_max: float | None = None,
    n_samples: int | None = None,
    evaluator: ArgEvaluator | None = None,
    floor: float = 1e-300,
) -> ArgumentProfile:
    """Continuous argument of ``F(a + it)``; ``bound`` is its sup, ``small_bound`` the sup on ``|t| < 1/eps``."""
    a = float(a)
    window = 1.0 / eps
    deg = max(F.degree, 1)
    if t_max is None:
        scale = 1.0
        if F.degree > 0:
            c = F.to_numpy()
            scale = 1 + float(np.max(np.abs(c[:-1] / c[-1]))) if len(c) > 1 else 1.0
        t_max = 1e4 * max(window, scale)
    t = _sample_grid(window, t_max, 64 * deg, n_samples)
    if F.degree == 0 and evaluator is None:
        c = complex(F.coeff(0))
        arg = np.full_like(t, math.atan2(c.imag, c.real))
        logm = np.full_like(t, math.log(abs(c)) if c else -np.inf)
    else:
        ev = evaluator or root_evaluator(F, a)
        arg, logm = ev(t)
    if np.min(logm) < math.log(floor):
        raise NearZeroOnLine("modulus falls below the floor on the line")
    inside = np.abs(t) < window
    bound = float(np.max(np.abs(arg)))
    small = float(np.max(np.abs(arg[inside]))) if np.any(inside) else 0.0
    return ArgumentProfile(a, t, arg, logm, window, bound, small)


# ---------------------------------------------------------------------------
# good approximations for the quadratics -(x - a)(x - 1 + conj(a))

@dataclass(frozen=True)
class GoodApproximation:
    """``F`` with ``F * quad`` of bounded, small argument on ``Re x = 0``."""

    root: complex
    F: ComplexPoly
    quad: ComplexPoly
    ls: tuple
    profile: ArgumentProfile
    evaluator: ArgEvaluator = field(repr=False, compare=False)


def quadratic_for_root(a) -> ComplexPoly:
    """``-(x - a)(x - 1 + conj(a))``, positive on ``Re x = 1/2``."""
    a = coerce(a)
    return -(ComplexPoly([-a, 1]) * ComplexPoly([-(1 - a.conjugate()), 1]))


def _exp_poly(l: int, c, sign: int) -> ComplexPoly:
    """``((l + c + sign*x) / l)^l``."""
    return ComplexPoly([Fraction(l) + c, sign]).scale(Fraction(1, l)) ** l


def _e_factor_evaluator(s: float, b: float, r: float, ls: Sequence[int]) -> ArgEvaluator:
    """Argument of ``R(it - ir)`` with ``R = (prod E+_l - 1)(prod E-_l - 1)`` on ``Re x = 0``."""

    def ev(t: np.ndarray):
        x = 1j * (t - r)
        Lm = sum(l * np.log((l + x - s) / l) for l in ls)
        Lp = sum(l * np.log((l + b - x) / l) for l in ls)
        arg = Lm.imag + Lp.imag + np.angle(1 - np.exp(-Lm)) + np.angle(1 - np.exp(-Lp))
        logm = Lm.real + Lp.real + np.log(np.abs(1 - np.exp(-Lm))) + np.log(np.abs(1 - np.exp(-Lp)))
        return arg, logm

    return ev


def _rational(x: float, den: int = 1 << 20) -> Fraction:
    return Fraction(x).limit_denominator(den)


@dataclass(frozen=True)
class SearchCaps:
    max_n: int = 4
    l_values: tuple = (1, 2, 4, 8, 16, 32, 64)
    ratios: tuple = (1, 2, 3)
    max_degree: int = 400


def _l_sequence(n: int, l: int, q: int) -> tuple:
    return tuple(l * q ** i for i in range(n))


def _candidates(caps: SearchCaps):
    """Parameter sequences: the count ``n`` first, then ``l``, then the growth ratio."""
    seen = set()
    for n in range(1, caps.max_n + 1):
        for l in caps.l_values:
            for q in caps.ratios:
                ls = _l_sequence(n, l, q)
                if ls in seen or 2 * sum(ls) > caps.max_degree:
                    continue
                seen.add(ls)
                yield ls


def _root_parts(a_root):
    a_root = coerce(a_root)
    if is_exact(a_root):
        return Fraction(a_root.real), Fraction(a_root.imag)
    z = complex(a_root)
    return _rational(z.real), _rational(z.imag)


def _e_factor_F(s: Fraction, r: Fraction, ls: Sequence[int]):
    """Exact ``F = R / quad`` and ``quad``, shifted by ``i r``."""
    b = 1 - s
    quad_real = -(ComplexPoly([-s, 1]) * ComplexPoly([-b, 1]))
    Ep = ComplexPoly([1])
    Em = ComplexPoly([1])
    for l in ls:
        Ep = Ep * _exp_poly(l, b, -1)
        Em = Em * _exp_poly(l, -s, 1)
    R = (Ep - 1) * (Em - 1)
    Fr, rem = R.divmod(quad_real)
    if not rem.is_zero():
        raise ArithmeticError("R is not divisible by the quadratic")
    if r:
        shift = -make_exact(0, r)
        return Fr.shift(shift), quad_real.shift(shift)
    return Fr, quad_real


def good_approximation_quadratic(
    a_root,
    eps: float = 0.3,
    margin: float = 0.1,
    bound_target: float | None = None,
    caps: SearchCaps | None = None,
) -> GoodApproximation:
    """Polynomial ``F`` such that ``F * quad`` has bounded and ``eps``-small argument on ``iR``.

    The construction takes ``R = (prod E+_l - 1)(prod E-_l - 1)`` over a
    sequence ``l_1 <= ... <= l_n`` with ``E-_l(x) = ((l + x - s)/l)^l`` and
    ``E+_l(x) = ((l + b - x)/l)^l``, ``s = Re a``, ``b = 1 - s``.  ``R``
    vanishes at ``s`` and ``b``, so ``F = R / (-(x - s)(x - b))`` is a
    polynomial; it is then shifted back by ``Im a``.
    """
    caps = caps or SearchCaps()
    if not complex(coerce(a_root)).real < 0:
        raise HypothesisFails("the root must have negative real part")
    target = bound_target if bound_target is not None else HALF_PI - margin
    s, r = _root_parts(a_root)
    best = None
    for ls in _candidates(caps):
        ev = _e_factor_evaluator(float(s), float(1 - s), float(r), ls)
        prof = argument_profile(ComplexPoly([1]), 0, eps, t_max=1e4 * (ls[-1] + 1 / eps) + abs(float(r)), evaluator=ev, n_samples=20000)
        if best is None or (prof.small_bound, prof.bound) < (best[0].small_bound, best[0].bound):
            best = (prof, ls)
        if prof.bound < target and prof.small_bound < eps:
            F, quad = _e_factor_F(s, r, ls)
            return GoodApproximation(complex(coerce(a_root)), F, quad, ls, prof, ev)
    raise SearchExhausted(
        f"no E-factor parameters within the caps give a {target:.3f}-bounded {eps}-small argument",
        best=best,
    )


def _arg_F_only(g: GoodApproximation) -> ArgEvaluator:
    """Argument of ``F`` alone: that of ``F * quad`` minus that of ``quad``."""
    qev = root_evaluator(g.quad, 0.0)

    def ev(t):
        a1, m1 = g.evaluator(t)
        a2, m2 = qev(t)
        return a1 - a2, m1 - m2

    return ev


def _sum_evaluators(evs: Sequence[ArgEvaluator]) -> ArgEvaluator:
    def ev(t):
        arg = np.zeros_like(t, dtype=float)
        logm = np.zeros_like(t, dtype=float)
        for e in evs:
            a_, m_ = e(t)
            arg = arg + a_
            logm = logm + m_
        return arg, logm

    return ev


def _tail_threshold(ev: ArgEvaluator, eps: float, t_max: float) -> float:
    """Smallest sampled ``T`` with ``|arg| < eps`` for all sampled ``|t| >= T``."""
    t = np.geomspace(1e-2, t_max, 20000)
    tt = np.concatenate([-t[::-1], t])
    arg, _ = ev(tt)
    bad = np.abs(arg) >= eps
    if not np.any(bad):
        return 0.0
    return float(np.max(np.abs(tt[bad])))


def compose_good_approximations(factors: Sequence, eps: float = 0.3, margin: float = 0.1, bound: float | None = None):
    """Multiply approximations and re-certify the product on ``Re x = 0``.

    ``factors`` holds :class:`GoodApproximation` objects, or ``(P_i, F_i)``
    pairs whose product is certified from its roots.
    """
    target = bound if bound is not None else HALF_PI - margin
    F = ComplexPoly([1])
    Ptot = ComplexPoly([1])
    evs = []
    for fac in factors:
        if isinstance(fac, GoodApproximation):
            F = F * fac.F
            Ptot = Ptot * fac.quad
            evs.append(fac.evaluator)
        else:
            Pi, Fi = fac
            F = F * Fi
            Ptot = Ptot * Pi
            evs.append(root_evaluator(Pi * Fi, 0.0))
    prof = argument_profile(ComplexPoly([1]), 0, eps, t_max=1e5 / eps, evaluator=_sum_evaluators(evs), n_samples=40000)
    if not (prof.bound < target and prof.small_bound < eps):
        raise SearchExhausted(
            f"product has bound {prof.bound:.3f} and small bound {prof.small_bound:.3f}", best=prof
        )
    return F, prof


def build_good_approximation(roots_left: Sequence, eps: float = 0.3, margin: float = 0.1):
    """Good approximation for the product of the quadratics attached to ``roots_left``.

    Follows the epsilon schedule: each new factor is made small on a window
    wide enough that the previous factors' argument is already below ``eps``
    outside it.
    """
    k = len(roots_left)
    if k == 0:
        return ComplexPoly([1]), []
    target = HALF_PI - margin - (eps if k > 1 else 0.0)
    # later factors get narrower tolerances, so the roots far from the line go last
    order = sorted(roots_left, key=lambda a: -complex(coerce(a)).real)
    approx = []
    cur_eps = eps / 2 if k > 1 else eps
    for i, a in enumerate(order):
        g = good_approximation_quadratic(a, cur_eps, margin, bound_target=target)
        approx.append(g)
        if i + 1 < k:
            T = _tail_threshold(_sum_evaluators([_arg_F_only(h) for h in approx]), eps, 1e5 / eps)
            cur_eps = min(cur_eps, 1.0 / T if T > 0 else cur_eps) * 0.999
    F, prof = compose_good_approximations(approx, eps, margin)
    return F, approx


# ---------------------------------------------------------------------------
# non-unitarizability witness

def pair_roots_across_half(P2: ComplexPoly, tol: float = 1e-7) -> list:
    """Match each root ``y`` with ``Re y < 0`` to a root ``1 - conj(y)``; returns the left roots."""
    rs = roots(P2, 1e-9)
    left, right = [], []
    for r, m in rs:
        z = complex(r)
        if z.real < 0:
            left.extend([r] * m)
        elif z.real > 1:
            right.extend([r] * m)
        else:
            raise PairingFailure(f"root {z} lies in the strip 0 <= Re x <= 1")
    if len(left) != len(right):
        raise PairingFailure("unequal numbers of roots on the two sides")
    out = []
    pool = list(right)
    for y in left:
        target = 1 - complex(y).conjugate()
        j = min(range(len(pool)), key=lambda i: abs(complex(pool[i]) - target))
        if abs(complex(pool[j]) - target) > tol * max(1.0, abs(target)):
            raise PairingFailure(f"no partner for root {complex(y)}")
        pool.pop(j)
        out.append(y)
    return out


def bounded_product_approximation(roots_left: Sequence, margin: float = 0.1, caps: SearchCaps | None = None):
    """``Ft`` with ``Ft * prod quad_i`` of argument bounded by ``pi/2 - margin`` on ``iR``.

    Uses one E-factor sequence for every quadratic and tries the candidates
    in the search order (the first candidate gives ``Ft = 1``).  Only a
    bounded argument is required here, not a small one.
    """
    caps = caps or SearchCaps(max_degree=200)
    parts = [_root_parts(a) for a in roots_left]
    target = HALF_PI - margin
    best = None
    for ls in _candidates(caps):
        ev = _sum_evaluators([_e_factor_evaluator(float(s), float(1 - s), float(r), ls) for s, r in parts])
        prof = argument_profile(ComplexPoly([1]), 0, 1.0, t_max=1e5 * (ls[-1] + 1), evaluator=ev, n_samples=20000)
        if best is None or prof.bound < best[0].bound:
            best = (prof, ls)
        if prof.bound < target:
            F = ComplexPoly([1])
            for s, r in parts:
                F = F * _e_factor_F(s, r, ls)[0]
            return F, prof
    raise SearchExhausted("no common E-factor sequence gives a bounded product", best=best)


def nonunitarizability_witness(P: ComplexPoly, eps: float = 0.3, margin: float = 0.1, tol: float = 1e-9) -> ComplexPoly:
    """A certificate ``F`` with ``Re F >= 0`` and ``Re F(x-1)P(x-1) >= 0`` on ``iR``.

    Requires ``P > 0`` on ``iR`` and every root with ``|Re| > 1``.  The roots
    of ``P(2x - 1)`` are paired across ``Re x = 1/2`` into the quadratics
    ``-(x - a)(x - 1 + conj(a))``; an ``Ft`` making ``Ft * P(2x - 1)`` of
    bounded argument on ``iR`` is found, and ``F(x) = Ft((x + 1)/2)``.  The
    cheap bounded-product search runs first, the full epsilon-schedule
    composition second.  The result is checked exactly before it is returned.
    """
    from .positivity import check_nonunitarity_certificate

    rs = roots(P, tol)
    for r, _ in rs:
        if abs(complex(r).real) <= 1 + tol:
            raise HypothesisFails("every root must satisfy |Re| > 1")
    if P.degree % 2 or not (complex(P.leading * I ** P.degree).real > 0):
        raise HypothesisFails("P must be positive on iR (even degree, P(it) -> +inf)")
    left = pair_roots_across_half(P.compose_affine(2, -1))
    attempts = [ComplexPoly([1])]
    try:
        attempts.append(bounded_product_approximation(left, margin)[0])
    except SearchExhausted:
        pass
    for Ft in attempts:
        F = Ft.compose_affine(Fraction(1, 2), Fraction(1, 2))
        if check_nonunitarity_certificate(F, P):
            return F
    Ft, _ = build_good_approximation(left, eps, margin)
    F = Ft.compose_affine(Fraction(1, 2), Fraction(1, 2))
    if not check_nonunitarity_certificate(F, P):
        raise SearchExhausted("constructed F fails the exact certificate check")
    return F
