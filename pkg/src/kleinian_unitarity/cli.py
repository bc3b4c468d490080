"""Command line front end.

    kleinian-unitarity decide --coeffs "0.25,0,-1"
    kleinian-unitarity classify --roots "1/2,-1/2" --leading -1 --json

Exit status: 0 for any verdict (including Unknown), 2 for bad input,
3 for a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .algebra import lifting_report
from .errors import InputError, KleinianError, NotDefined, NumericalFailure
from .index_tools import nonunitarizability_witness
from .modules import enumerate_irreducibles, is_unitarizable_module
from .numbers import parse_number
from .poly import ComplexPoly
from .positivity import (
    NOT_UNITARIZABLE,
    TRACE_METHODS,
    UNITARIZABLE,
    certificate_checks,
    decide_regular_unitarizability,
    explicit_trace,
    gram_matrices,
)
from .traces import SIGN_POSITIVE

COMMANDS = ("classify", "decide", "trace", "gram", "witness", "report")


@dataclass(frozen=True)
class JobSpec:
    command: str
    P: ComplexPoly
    degree: int = 6
    tol: float = 1e-9
    method: str = "auto"
    json: bool = False


def polynomial_from_args(coeffs: str | None, roots: str | None, leading: str | None) -> ComplexPoly:
    if (coeffs is None) == (roots is None):
        raise InputError("give exactly one of --coeffs and --roots")
    if coeffs is not None:
        P = ComplexPoly.parse(coeffs)
    else:
        rs = [parse_number(r) for r in roots.replace(";", ",").split(",") if r.strip()]
        lead = parse_number(leading) if leading is not None else 1
        P = ComplexPoly.from_roots(rs, lead)
    if P.degree < 1:
        raise InputError("P must have positive degree")
    return P


def _classify(job: JobSpec) -> dict:
    P = job.P
    mods = []
    for d in enumerate_irreducibles(P, tol=job.tol):
        entry = {"module": d.to_json(), "label": d.label(), "dimension": d.dimension}
        if d.is_family:
            entry["unitarizable"] = None
            entry["reason"] = "depends on the residue; instantiate one member to test it"
        else:
            try:
                entry.update(is_unitarizable_module(P, d, job.tol).to_json())
            except NotDefined as exc:
                entry["unitarizable"] = None
                entry["reason"] = str(exc)
        mods.append(entry)
    return {"P": P.format(), "lifting": lifting_report(P).as_dict(), "modules": mods}


def _decide(job: JobSpec) -> dict:
    v = decide_regular_unitarizability(job.P, job.tol, job.degree)
    out = v.to_json()
    out.setdefault("sign_convention", SIGN_POSITIVE)
    if v.certificate is not None:
        out["evidence"]["certificate_checks"] = certificate_checks(v.certificate, job.P)
    return out


def _trace(job: JobSpec) -> dict:
    T = explicit_trace(job.P, job.method, job.degree, job.tol)
    out = T.to_json()
    out.setdefault("sign_convention", SIGN_POSITIVE)
    return out


def _gram(job: JobSpec) -> dict:
    T = explicit_trace(job.P, job.method, job.degree, job.tol)
    rep = gram_matrices(T, job.P, job.degree)
    return {
        "P": job.P.format(),
        "trace": T.to_json(),
        "gram": rep.as_dict(),
        "sign_convention": T.sign_convention or SIGN_POSITIVE,
    }


def _witness(job: JobSpec) -> dict:
    F = nonunitarizability_witness(job.P)
    return {
        "P": job.P.format(),
        "certificate": F.format(),
        "degree": F.degree,
        "checks": certificate_checks(F, job.P),
        "sign_convention": SIGN_POSITIVE,
    }


def _report(job: JobSpec) -> dict:
    out = {"P": job.P.format(), "classify": _classify(job)}
    try:
        dec = _decide(job)
    except NotDefined as exc:
        dec = {"status": None, "reason": str(exc)}
    out["decide"] = dec
    if dec.get("status") == UNITARIZABLE:
        try:
            out["gram"] = _gram(job)
        except NumericalFailure as exc:
            out["gram"] = {"error": f"{type(exc).__name__}: {exc}"}
    elif dec.get("status") == NOT_UNITARIZABLE:
        if "certificate" in dec.get("evidence", {}):
            out["witness"] = {"certificate": dec["evidence"]["certificate"], "checks": dec["evidence"]["certificate_checks"]}
        else:
            try:
                out["witness"] = _witness(job)
            except KleinianError as exc:
                out["witness"] = {"error": f"{type(exc).__name__}: {exc}"}
    out["sign_convention"] = SIGN_POSITIVE
    return out


HANDLERS = {
    "classify": _classify,
    "decide": _decide,
    "trace": _trace,
    "gram": _gram,
    "witness": _witness,
    "report": _report,
}


def _text(data, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for k, v in data.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(data, list):
        for item in data:
            if isinstance(item, dict):
                lines.append(f"{pad}-")
                lines.extend(_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{data}")
    return lines


def run(job: JobSpec) -> tuple[int, dict]:
    try:
        return 0, HANDLERS[job.command](job)
    except (InputError, ValueError) as exc:
        return 2, {"error": f"{job.command}: {type(exc).__name__}: {exc}"}
    except (NumericalFailure, ArithmeticError) as exc:
        return 3, {"error": f"{job.command}: {type(exc).__name__}: {exc}"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kleinian-unitarity", description="Unitarizability for quantizations of type-A Kleinian singularities.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--coeffs", help="ascending coefficients of P, e.g. '0.25,0,-1'")
    ap.add_argument("--roots", help="comma-separated roots of P, e.g. '1/2,-1/2'")
    ap.add_argument("--leading", help="leading coefficient when --roots is used (default 1)")
    ap.add_argument("--degree", type=int, default=6, help="degree cap D for Gram matrices")
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--method", choices=TRACE_METHODS, default="auto")
    ap.add_argument("--json", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.degree < 1:
            raise InputError("--degree must be at least 1")
        P = polynomial_from_args(args.coeffs, args.roots, args.leading)
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    job = JobSpec(args.command, P, args.degree, args.tol, args.method, args.json)
    status, data = run(job)
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print("\n".join(_text(data)))
    return status


if __name__ == "__main__":
    sys.exit(main())
