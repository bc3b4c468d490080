"""Positivity of traces, the cone of norms, and the decision procedure for the
regular bimodule.

A trace ``T`` gives a positive definite form exactly when it is positive on the
two generator families

    R1:  R(x) * conj(R)(-x)
    R2:  -Re_0( conj(R)(1-x) R(x-1) P(x-1) ).

``gram_matrices`` assembles both families on polynomials of degree ``<= D``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import AlgebraContext, AlgebraElement
from .errors import (
    BoundaryAmbiguity,
    KleinianError,
    NotHomogeneous,
    NotRealOnLine,
    NumericalFailure,
    NumericalStall,
)
from .numbers import I, coerce, is_exact, make_exact
from .poly import ComplexPoly, X, in_R_ix, nonneg_on_line, roots
from .traces import (
    TraceBasis,
    TraceFunctional,
    build_basis,
    petrov_trace,
    pullback_trace,
    trace_from_real_coordinates,
    weight_function_trace,
)

GRAM_RTOL = 1e-10


@dataclass(frozen=True)
class ConeGenerator:
    kind: str
    witness: ComplexPoly
    image: ComplexPoly


def cone_generator(kind: str, R: ComplexPoly, P: ComplexPoly) -> ConeGenerator:
    if kind == "R1":
        image = R * R.bar_reflect(0)
    elif kind == "R2":
        image = -(R.bar_reflect(Fraction(1, 2)) * R.shift(-1) * P.shift(-1)).re_line(0)
    else:
        raise ValueError("kind must be 'R1' or 'R2'")
    return ConeGenerator(kind, R, image)


# ---------------------------------------------------------------------------
# norms of homogeneous elements

def reduce_norm_element(ctx: AlgebraContext, a: AlgebraElement) -> AlgebraElement:
    """An element of weight 0 or 2 with the same norm ``T(a r(a))`` under every Hermitian trace.

    For ``a = e^j X`` the element ``X (-f)^j`` has the same norm.  Negative
    weights are first sent to positive ones by ``r``: for a Hermitian trace
    ``(a, a) = (r(a), r(a))``.
    """
    ws = a.weights()
    if len(ws) > 1:
        raise NotHomogeneous("reduce_norm_element needs a single weight component")
    if not ws:
        return a
    if ws[0] < 0:
        a = ctx.involution_r(a)
    k = a.weights()[0]
    S = a.component(k)
    minus_f = AlgebraElement({-2: ComplexPoly([-1])})
    while k > 2:
        p = k // 2
        j = p // 2
        # S(h) e^p = e^j S(h + 2j) e^(p - j)
        X_ = AlgebraElement({2 * (p - j): S.shift(2 * j)})
        b = ctx.multiply(X_, ctx.power(minus_f, j))
        k = b.weights()[0]
        S = b.component(k)
    return AlgebraElement({k: S})


# ---------------------------------------------------------------------------
# Gram matrices

@dataclass(frozen=True)
class GramReport:
    degree: int
    G1: np.ndarray = field(repr=False)
    G2: np.ndarray = field(repr=False)
    min_eigenvalues: tuple
    positive: bool
    exact: bool = False

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "min_eigenvalues": [float(v) for v in self.min_eigenvalues],
            "positive": self.positive,
            "exact": self.exact,
        }


def _gram_entries(T: TraceFunctional, P: ComplexPoly, D: int):
    n1 = [[None] * (D + 1) for _ in range(D + 1)]
    n2 = [[None] * (D + 1) for _ in range(D + 1)]
    Pm = P.shift(-1)
    xm1 = [ComplexPoly([-1, 1]) ** j for j in range(D + 1)]
    one_m_x = [ComplexPoly([1, -1]) ** k for k in range(D + 1)]
    K = [[xm1[j] * one_m_x[k] * Pm for k in range(D + 1)] for j in range(D + 1)]
    for j in range(D + 1):
        for k in range(D + 1):
            n1[j][k] = T.evaluate(ComplexPoly.monomial(j + k, (-1) ** k))
            v = T.evaluate(K[j][k]) + T.evaluate(K[k][j].bar_reflect(0))
            n2[j][k] = -v / 2
    return n1, n2


def _hermitian_exact_pd(M) -> bool:
    """Exact LDL^* test of positive definiteness."""
    A = [list(row) for row in M]
    n = len(A)
    for k in range(n):
        piv = A[k][k]
        if isinstance(piv, complex):
            return False
        piv_re = piv.real if not isinstance(piv, Fraction) else piv
        if piv_re <= 0:
            return False
        for i in range(k + 1, n):
            if A[i][k] == 0:
                continue
            c = A[i][k] / piv
            for j in range(k + 1, n):
                A[i][j] = A[i][j] - c * A[k][j]
    return True


def _min_eig(G: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(G)[0]) if G.size else float("inf")


def _pd_float(G: np.ndarray, rtol: float) -> bool:
    lo = _min_eig(G)
    scale = float(np.max(np.abs(G))) if G.size else 1.0
    return lo > rtol * scale


def _to_array(M) -> np.ndarray:
    A = np.array([[complex(v) for v in row] for row in M], dtype=complex)
    return 0.5 * (A + A.conj().T)


def gram_matrices(T: TraceFunctional, P: ComplexPoly, D: int, rtol: float = GRAM_RTOL) -> GramReport:
    """Gram matrices of both generator families on ``1, x, ..., x^D``.

    The form on coefficient vectors is ``sum c_j conj(c_k) G[j, k]``.
    Exact traces are tested by exact pivoting; floating ones by the smallest
    eigenvalue relative to the largest entry.
    """
    n1, n2 = _gram_entries(T, P, D)
    G1, G2 = _to_array(n1), _to_array(n2)
    mins = (_min_eig(G1), _min_eig(G2))
    exact = T.is_exact and P.is_exact
    if exact:
        positive = _hermitian_exact_pd(n1) and _hermitian_exact_pd(n2)
    else:
        positive = _pd_float(G1, rtol) and _pd_float(G2, rtol)
    return GramReport(D, G1, G2, mins, positive, exact)


def is_positive_definite_up_to(T: TraceFunctional, P: ComplexPoly, D: int) -> bool:
    return gram_matrices(T, P, D).positive


# ---------------------------------------------------------------------------
# LP over the trace space

@dataclass(frozen=True)
class LPSampling:
    n_random: int = 120
    seed: int = 0
    max_cuts: int = 60
    threshold: float = 1e-9
    witness_tol: float = 1e-8


@dataclass(frozen=True)
class FeasiblePoint:
    trace: TraceFunctional
    margin: float
    gram: GramReport


@dataclass(frozen=True)
class Infeasible:
    generators: tuple
    weights: tuple
    residual: float

    def combination(self) -> ComplexPoly:
        out = ComplexPoly()
        for g, w in zip(self.generators, self.weights):
            out = out + g.image.scale(w)
        return out


def _real_row(basis: TraceBasis, image: ComplexPoly) -> np.ndarray:
    coords = basis.reduce(image)
    row = np.array([complex(c) * complex((-1j) ** m) for m, c in enumerate(coords)])
    return row.real


def _generator_family(P: ComplexPoly, D: int, sampling: LPSampling) -> list[ConeGenerator]:
    gens = []
    rng = np.random.default_rng(sampling.seed)
    polys = [ComplexPoly.monomial(j) for j in range(D + 1)]
    for j, k in itertools.combinations(range(D + 1), 2):
        for c in (1, -1, I, -I):
            polys.append(ComplexPoly.monomial(j) + ComplexPoly.monomial(k, c))
    for _ in range(sampling.n_random):
        d = int(rng.integers(0, D + 1))
        cs = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        polys.append(ComplexPoly([complex(round(c.real, 6), round(c.imag, 6)) for c in cs]))
    for R in polys:
        gens.append(cone_generator("R1", R, P))
        gens.append(cone_generator("R2", R, P))
    return gens


def _solve_margin(A: np.ndarray):
    from scipy.optimize import linprog

    m, d = A.shape
    norms = np.linalg.norm(A, axis=1)
    keep = norms > 1e-14
    A, norms = A[keep], norms[keep]
    # variables (y_0..y_{d-1}, s); maximize s
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-A, norms[:, None]])
    b_ub = np.zeros(len(A))
    bounds = [(-1, 1)] * d + [(None, 1)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise NumericalStall(f"margin LP failed: {res.message}")
    return res.x[:d], float(res.x[-1])


def _solve_witness(A: np.ndarray):
    from scipy.optimize import linprog

    m, d = A.shape
    norms = np.linalg.norm(A, axis=1)
    # variables mu (m), u (d); minimize sum u with -u <= A^T mu <= u
    c = np.concatenate([np.zeros(m), np.ones(d)])
    A_ub = np.vstack([
        np.hstack([A.T, -np.eye(d)]),
        np.hstack([-A.T, -np.eye(d)]),
    ])
    b_ub = np.zeros(2 * d)
    A_eq = np.concatenate([norms, np.zeros(d)])[None, :]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * (m + d), method="highs")
    if res.status != 0:
        raise NumericalStall(f"witness LP failed: {res.message}")
    return res.x[:m], float(res.fun)


def _cut_from_gram(report: GramReport, P: ComplexPoly) -> list[ConeGenerator]:
    cuts = []
    for kind, G in (("R1", report.G1), ("R2", report.G2)):
        w, v = np.linalg.eigh(G)
        for idx in range(min(2, len(w))):
            if w[idx] > GRAM_RTOL * max(1.0, float(np.max(np.abs(G)))):
                continue
            # the form is sum c_j conj(c_k) G[j,k] = c^T G conj(c); take c = conj(v)
            R = ComplexPoly(np.conj(v[:, idx]))
            cuts.append(cone_generator(kind, R, P))
    return cuts


def lp_feasibility(P: ComplexPoly, D: int = 6, sampling: LPSampling | None = None, basis: TraceBasis | None = None):
    """Search for a trace positive on the sampled cone, or a witness that none exists.

    Coordinates are ``y_m = T((ix)^m)``.  The LP maximizes the uniform margin
    ``s`` in ``a_g . y >= s |a_g|`` over the generator family, within the box
    ``|y| <= 1``.  Positive margins are refined by Gram cutting planes until the
    point is Gram-positive at degree ``D``.
    """
    sampling = sampling or LPSampling()
    basis = basis or build_basis(P, max(2 * P.degree + 16, 2 * D + P.degree + 2))
    if basis.dim > 12:
        raise ValueError("trace space too large for the LP")
    gens = _generator_family(P, D, sampling)
    rows = [_real_row(basis, g.image) for g in gens]
    for _ in range(sampling.max_cuts + 1):
        A = np.array(rows)
        y, s = _solve_margin(A)
        if s <= sampling.threshold:
            mu, resid = _solve_witness(A)
            if resid > sampling.witness_tol:
                raise NumericalStall(f"no positive margin, but witness residual {resid:.3g} is too large")
            keep = mu > 1e-12
            return Infeasible(
                tuple(g for g, k in zip(gens, keep) if k),
                tuple(float(w) for w, k in zip(mu, keep) if k),
                resid,
            )
        T = trace_from_real_coordinates(P, [float(v) / float(y[0]) for v in y], "lp", basis) if y[0] > 0 else None
        if T is None:
            raise NumericalStall("LP point has T(1) <= 0")
        report = gram_matrices(T, P, D)
        if report.positive:
            return FeasiblePoint(T, s, report)
        cuts = _cut_from_gram(report, P)
        if not cuts:
            raise NumericalStall("Gram test failed but no cutting plane found")
        gens.extend(cuts)
        rows.extend(_real_row(basis, g.image) for g in cuts)
    raise NumericalStall("cutting-plane loop did not reach a Gram-positive point")


# ---------------------------------------------------------------------------
# certificates of non-unitarizability

def check_nonunitarity_certificate(F: ComplexPoly, P: ComplexPoly) -> bool:
    """True when ``Re F >= 0`` and ``Re F(x-1)P(x-1) >= 0`` on ``iR`` (so 0 lies in the cone)."""
    if F.is_zero():
        raise ValueError("certificate must be nonzero")
    try:
        first = nonneg_on_line(F.re_line(0), 0)
        if not first:
            return False
        return nonneg_on_line((F.shift(-1) * P.shift(-1)).re_line(0), 0)
    except NotRealOnLine:
        return False


def certificate_checks(F: ComplexPoly, P: ComplexPoly) -> dict:
    return {
        "re_F_nonneg": nonneg_on_line(F.re_line(0), 0),
        "re_FP_shift_nonneg": nonneg_on_line((F.shift(-1) * P.shift(-1)).re_line(0), 0),
    }


# ---------------------------------------------------------------------------
# decision procedure

UNITARIZABLE = "Unitarizable"
NOT_UNITARIZABLE = "NotUnitarizable"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    status: str
    rationale: str
    trace: TraceFunctional | None = None
    gram: GramReport | None = None
    certificate: ComplexPoly | None = None
    root_counts: dict = field(default_factory=dict)
    notes: tuple = ()

    def to_json(self) -> dict:
        ev: dict = {"root_counts": dict(self.root_counts)}
        if self.trace is not None:
            ev["trace"] = self.trace.to_json()
        if self.gram is not None:
            ev["gram"] = self.gram.as_dict()
        if self.certificate is not None:
            ev["certificate"] = self.certificate.format()
        out = {"status": self.status, "rationale": self.rationale, "evidence": ev}
        if self.trace is not None and self.trace.sign_convention:
            out["sign_convention"] = self.trace.sign_convention
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _classify_roots(P: ComplexPoly, tol: float):
    rs = roots(P, tol)
    inner, boundary, outer = [], [], []
    for r, m in rs:
        d = abs(complex(r).real) - 1
        if abs(d) <= tol:
            boundary.append((r, m))
        elif d < 0:
            inner.append((r, m))
        else:
            outer.append((r, m))
    return rs, inner, boundary, outer


def _pos_on_iR_leading(P: ComplexPoly) -> bool:
    if P.degree % 2:
        return False
    lead = complex(P.leading * (I ** P.degree))
    return lead.real > 0 and abs(lead.imag) <= 1e-12 * abs(lead)


def inner_root_factor(P: ComplexPoly, tol: float = 1e-9) -> ComplexPoly:
    """The factor of ``P`` carrying its roots with ``|Re| < 1``, signed so ``P/Q > 0`` on ``iR``."""
    rs, inner, boundary, _ = _classify_roots(P, tol)
    if boundary:
        raise BoundaryAmbiguity("P has roots within tol of |Re x| = 1")
    c = sum(m for _, m in inner)
    if c == P.degree:
        return P
    if c == 0:
        return ComplexPoly([1])
    Q0 = ComplexPoly([1])
    for r, m in inner:
        Q0 = Q0 * ComplexPoly([-r, 1]) ** m
    Q = Q0.scale(I ** c)
    if not Q.is_exact:
        Q = _clean_real_on_iR(Q)
    cof, _ = P.divmod(Q)
    v = complex(cof(0))
    if v.real < 0:
        Q = -Q
    return Q


def _clean_real_on_iR(Q: ComplexPoly) -> ComplexPoly:
    """Drop rounding noise so that ``Q(it)`` is exactly real in floating point."""
    out = []
    for k, c in enumerate(Q.coeffs):
        w = complex(c) * (1j ** k)
        out.append(complex(w.real, 0) * ((-1j) ** k))
    return ComplexPoly(out)


def _candidate_traces(Q: ComplexPoly, tol: float):
    """Explicit traces for the inner-root factor, in order of preference."""
    rs = roots(Q, tol)
    vals = [(r, m) for r, m in rs]
    # weight-function traces from real pairs +-lam
    for r, m in vals:
        z = complex(r)
        if abs(z.imag) <= tol and 0 <= z.real < 1:
            lam = float(z.real) if not is_exact(r) else r
            need = 2 if z.real == 0 else 1
            if m < need:
                continue
            if z.real != 0 and not any(abs(complex(s) + z) <= tol for s, _ in vals):
                continue
            try:
                yield weight_function_trace(Q, float(lam))
            except KleinianError:
                pass
    # Petrov traces from pairs alpha + conj(beta) = 0
    seen = set()
    for (a, ma), (b, mb) in itertools.product(vals, vals):
        za, zb = complex(a), complex(b)
        if abs(za + zb.conjugate()) > tol or za.real > zb.real + tol:
            continue
        if a == b and ma < 2:
            continue
        key = (round(za.real, 9), round(za.imag, 9), round(zb.real, 9), round(zb.imag, 9))
        if key in seen:
            continue
        seen.add(key)
        if not is_exact(b) and is_exact(a):
            b = complex(b)
        try:
            yield petrov_trace(Q, a, b)
        except KleinianError:
            pass


def _trace_evidence(P: ComplexPoly, Q: ComplexPoly, D: int, tol: float):
    for TQ in _candidate_traces(Q, tol):
        try:
            T = pullback_trace(TQ, P)
        except KleinianError:
            continue
        rep = gram_matrices(T, P, D)
        if rep.positive:
            return T, rep
    for target in (Q, P):
        if target.degree < 2 or target.degree - 1 > 12:
            continue
        try:
            res = lp_feasibility(target, D)
        except NumericalFailure:
            continue
        if isinstance(res, FeasiblePoint):
            T = res.trace if target is P else pullback_trace(res.trace, P)
            rep = gram_matrices(T, P, D)
            if rep.positive:
                return T, rep
    return None, None


TRACE_METHODS = ("auto", "quotient", "petrov", "weight")


def explicit_trace(P: ComplexPoly, method: str = "auto", D: int = 6, tol: float = 1e-9) -> TraceFunctional:
    """A trace on ``A_P`` built by one method.

    ``weight`` and ``petrov`` build the trace for the inner-root factor and
    pull it back; ``quotient`` solves for a positive point directly in the
    coordinates of the quotient space; ``auto`` tries them in that order and
    keeps the first one with positive Gram matrices at ``D``.
    """
    if method not in TRACE_METHODS:
        raise ValueError(f"unknown trace method {method!r}")
    if method == "auto":
        T, _ = _trace_evidence(P, inner_root_factor(P, tol), D, tol)
        if T is None:
            raise NumericalStall(f"no Gram-positive trace found at D = {D}")
        return T
    if method == "quotient":
        res = lp_feasibility(P, D)
        if not isinstance(res, FeasiblePoint):
            raise NumericalStall("the cone of norms meets zero numerically; no positive trace")
        return res.trace
    Q = inner_root_factor(P, tol)
    want = "weight" if method == "weight" else "petrov"
    for TQ in _candidate_traces(Q, tol):
        if not TQ.provenance.startswith(want):
            continue
        try:
            return pullback_trace(TQ, P)
        except KleinianError:
            continue
    raise NumericalStall(f"no {method} trace applies to this P")


def decide_regular_unitarizability(P: ComplexPoly, tol: float = 1e-9, D: int = 6, with_evidence: bool = True) -> Verdict:
    """Decide unitarizability of the regular bimodule from the root geometry of ``P``."""
    from .index_tools import nonunitarizability_witness
    from .modules import one_dim_bimodule_candidates

    if not in_R_ix(P, 0.0 if P.is_exact else 1e-12):
        raise NotRealOnLine("P must satisfy P(it) real for real t")
    n = P.degree
    rs, inner, boundary, outer = _classify_roots(P, tol)
    c = sum(m for _, m in inner)
    b = sum(m for _, m in boundary)
    asc = _pos_on_iR_leading(P)
    counts = {"inner": c, "boundary": b, "outer": sum(m for _, m in outer), "degree": n, "ascending": asc}

    if c >= 3 or (n % 2 == 0 and asc and c >= 1):
        why = (
            f"{c} roots with |Re| < 1 (at least three)"
            if c >= 3
            else f"n even, P(it) -> +inf, and {c} root(s) with |Re| < 1"
        )
        if not with_evidence or b:
            return Verdict(UNITARIZABLE, why, root_counts=counts)
        Q = inner_root_factor(P, tol)
        notes = []
        if one_dim_bimodule_candidates(Q, tol):
            notes.append("inner factor admits one-dimensional bimodules; semidefinite forms may degenerate")
        T, rep = _trace_evidence(P, Q, D, tol)
        if T is None:
            notes.append(f"no Gram-positive trace found at D = {D}")
        return Verdict(UNITARIZABLE, why, T, rep, root_counts=counts, notes=tuple(notes))

    if n % 2 == 0 and asc and c == 0 and b == 0:
        why = "n even, P(it) -> +inf, and every root has |Re| > 1"
        if not with_evidence:
            return Verdict(NOT_UNITARIZABLE, why, root_counts=counts)
        notes = []
        F = None
        if check_nonunitarity_certificate(ComplexPoly([1]), P):
            F = ComplexPoly([1])
        else:
            try:
                F = nonunitarizability_witness(P)
            except KleinianError as exc:
                notes.append(f"witness construction failed: {exc}")
        return Verdict(NOT_UNITARIZABLE, why, certificate=F, root_counts=counts, notes=tuple(notes))

    if b:
        why = f"{b} root(s) on |Re x| = 1; the root criteria do not decide this case"
    elif n % 2:
        why = f"n odd with {c} root(s) with |Re| < 1; fewer than three"
    elif not asc:
        why = f"P(it) -> -inf and {c} root(s) with |Re| < 1; fewer than three"
    else:
        why = "not covered by the root criteria"
    return Verdict(UNKNOWN, why, root_counts=counts)


# ---------------------------------------------------------------------------
# several independent positive traces

@dataclass(frozen=True)
class ConeDimensionReport:
    pairs: tuple
    traces: tuple
    grams: tuple
    rank: int
    hypotheses_hold: bool

    @property
    def all_positive(self) -> bool:
        return all(g.positive for g in self.grams)


def independent_petrov_traces(P: ComplexPoly, D: int = 4, tol: float = 1e-9) -> ConeDimensionReport:
    """Petrov traces for every root pair ``alpha + conj(beta) = 0`` of ``P``.

    The hypotheses checked are: ``deg P = 2m``, ``P(it) -> +inf``, ``2m``
    distinct roots, ``0 < |Re alpha| <= 1`` for each root.
    """
    n = P.degree
    rs = roots(P, tol)
    distinct = all(m == 1 for _, m in rs) and len(rs) == n
    strip = all(tol < abs(complex(r).real) <= 1 + tol for r, _ in rs)
    hyp = n % 2 == 0 and _pos_on_iR_leading(P) and distinct and strip
    neg = [r for r, _ in rs if complex(r).real < 0]
    pairs = []
    for a in neg:
        match = [b for b, _ in rs if abs(complex(a) + complex(b).conjugate()) <= tol]
        if match:
            pairs.append((a, match[0]))
    basis = build_basis(P)
    traces, grams = [], []
    for a, b in pairs:
        T = petrov_trace(P, a, b, basis).normalized()
        traces.append(T)
        grams.append(gram_matrices(T, P, D))
    if traces:
        M = np.array([T.real_coordinates() for T in traces])
        rank = int(np.linalg.matrix_rank(M, tol=1e-9))
    else:
        rank = 0
    return ConeDimensionReport(tuple(pairs), tuple(traces), tuple(grams), rank, hyp)
