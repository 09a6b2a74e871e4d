"""Command-line front end.

Every subcommand reads a JSON document (``--input``, ``-`` for stdin) and
prints a JSON or plain-text report. Exit status: 0 success, 1 domain error
(a mathematical precondition failed, or a check came out false), 2 input or
schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any

from . import destab_chain as dc
from . import effective_sections as es
from . import hodge_lattice as hl
from . import linear_system as ls
from . import restriction_bounds as rb
from . import sheaf_numerics as sn
from .errors import CoveringError, DomainError, SchemaError
from .rational import fmt, fmt_vector, parse_rational, parse_vector
from .suites import DEFAULT_SEED, SUITES, verify_identities

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2


class CheckFailed(Exception):
    """A report was produced but its certificate is negative."""

    def __init__(self, report: dict):
        super().__init__("check failed")
        self.report = report


def _load(path: str | None) -> Any:
    if path is None:
        raise SchemaError("--input is required for this subcommand")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"input file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}") from None


def _field(obj: dict, key: str):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"input is missing {key!r}")
    return obj[key]


def _int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{name} must be an integer")
    return value


def cmd_cone(args) -> dict:
    data = _load(args.input)
    L = hl.PolarizedLattice.from_json(_field(data, "lattice"))
    x = hl.NSClass(parse_vector(_field(data, "x")))
    sig = hl.verify_signature(L)
    pos = hl.cone_position(L, x)
    cert = hl.dual_cone_test(L, x, samples=args.cases or 100, seed=args.seed)
    report = {
        "seed": args.seed,
        "signature": sig.to_json(),
        "position": pos.value,
        "square": fmt(L.square(x)),
        "ample_pairing": fmt(L.pair(x, L.ample)),
        "dual_cone": cert.to_json(),
    }
    if not cert.holds:
        raise CheckFailed(report)
    return report


def cmd_delta(args) -> dict:
    data = _load(args.input)
    L = hl.PolarizedLattice.from_json(_field(data, "lattice"))
    E = sn.SheafClass.from_json(_field(data, "sheaf"))
    P = sn.Polarization(hl.NSClass(parse_vector(data["polarization"])) if "polarization" in data else L.ample)
    P.check(L)
    report: dict = {"discriminant": fmt(sn.discriminant(L, E)), "slope": fmt(sn.slope(L, E, P))}
    if "candidates" in data:
        cands = [sn.SheafClass.from_json(c) for c in data["candidates"]]
        report["semistability"] = sn.semistability_report(L, E, cands, P).to_json()
    if "exterior_power" in data:
        W = sn.exterior_power(L, E, _int(data["exterior_power"], "exterior_power"))
        report["exterior_power"] = {**W.to_json(), "discriminant": fmt(sn.discriminant(L, W))}
    if "extension" in data:
        ext = data["extension"]
        S = sn.SheafClass.from_json(_field(ext, "sub"))
        Q = sn.SheafClass.from_json(_field(ext, "quotient"))
        ident = sn.verify_identity_2_1(L, S, Q)
        report["extension"] = {
            "middle": sn.compose_extension(L, S, Q).to_json(),
            "identity_2_1": ident.to_json(),
            "inequality_2_2": sn.inequality_2_2_check(L, S, Q).to_json(),
        }
        if not ident.holds:
            raise CheckFailed(report)
    return report


def _sheaf_for_bounds(args):
    if args.input is not None:
        data = _load(args.input)
        L = hl.PolarizedLattice.from_json(_field(data, "lattice"))
        E = sn.SheafClass.from_json(_field(data, "sheaf"))
        return L, E, data
    if args.rank is None or args.delta is None:
        raise SchemaError("give --input, or both --rank and --delta")
    # a one-dimensional carrier with c1 = 0 realizes any discriminant
    L = hl.PolarizedLattice.diagonal([1])
    return L, sn.SheafClass(args.rank, hl.NSClass((0,)), -parse_rational(args.delta)), {}


def cmd_bounds(args) -> dict:
    formula = rb.FormulaId(args.formula.replace("-", "_"))
    if formula is rb.FormulaId.FLENNER:
        if args.input is not None:
            data = _load(args.input)
            d, r, hd = _int(_field(data, "d"), "d"), _int(_field(data, "r"), "r"), parse_rational(_field(data, "hd"))
        else:
            if args.d is None or args.r is None or args.hd is None:
                raise SchemaError("flenner needs --d, --r and --hd (or --input)")
            d, r, hd = args.d, args.r, parse_rational(args.hd)
        return rb.flenner_bound(d, r, hd, cap=args.cap).to_json()
    L, E, data = _sheaf_for_bounds(args)
    if formula is rb.FormulaId.LEMMA_3_2:
        return rb.lemma_3_2_bound(L, E).to_json()
    if formula is rb.FormulaId.COROLLARY_3_3:
        factors = [sn.SheafClass.from_json(q) for q in data.get("jh_factors", [])]
        P = sn.Polarization(L.ample)
        return rb.corollary_3_3_bound(L, E, factors or None, P).to_json()
    reflexive = bool(data.get("reflexive", not args.non_reflexive))
    return rb.theorem_3_1_bound(L, E, reflexive=reflexive).to_json()


def cmd_sing_degree(args) -> dict:
    data = _load(args.input)
    if isinstance(data, dict) and "profiles" in data:
        profiles = [ls.ChernProfile.from_json(p) for p in data["profiles"]]
        cp = ls.component_sum(profiles)
        per_component = [fmt(ls.sing_degree(p)) for p in profiles]
    else:
        cp = ls.ChernProfile.from_json(data)
        per_component = None
    report: dict = {"profile": cp.to_json()}
    degree = ls.sing_degree(cp)
    report["sing_degree"] = fmt(degree)
    if per_component is not None:
        report["component_degrees"] = per_component
    if cp.d >= 2:
        report["pencil_decomposition"] = ls.pencil_decomposition_check(cp).to_json()
    warnings = ls.degree_warnings(degree)
    if args.m is not None:
        bound = ls.zm_degree_bound(cp, args.m, args.points)
        report["zm_degree_bound"] = {"m": args.m, "points": args.points, "degree": fmt(bound)}
        warnings += ls.degree_warnings(bound)
    report["sufficiently_ample_asserted"] = cp.sufficiently_ample
    if warnings:
        report["warnings"] = warnings
    return report


def cmd_grid_check(args) -> dict:
    data = _load(args.input)
    n, d = _int(_field(data, "n"), "n"), _int(_field(data, "d"), "d")
    g = es.GridSpec.from_json(data.get("grid", {"a": [0] * n, "c": 1}))
    cert = es.determining_matrix(n, d, g)
    report = {"n": n, "d": d, "grid": g.to_json(), **cert.to_json(include_matrix=args.matrix)}
    if not cert.invertible:
        raise CheckFailed(report)
    return report


def cmd_grid_find(args) -> dict:
    data = _load(args.input)
    f = es.GridPolynomial.from_json(_field(data, "polynomial"))
    g = es.GridSpec.from_json(data.get("grid", {"a": [0] * f.nvars, "c": 1}))
    report = es.find_nonvanishing(f, g).to_json()
    if args.trace or report["verdict"] == "zero":
        report["trace"] = es.elimination_proof_trace(f, g).to_json()
    return report


def cmd_residue_search(args) -> dict:
    rs = es.ResidueSystem.from_json(_load(args.input))
    a = es.residue_search(rs, seed=args.seed, retry_cap=args.cap)
    return {
        "seed": args.seed,
        "l": rs.l,
        "primes": rs.primes,
        "a": list(a),
        "residues": {str(p): [x % p for x in a] for p in rs.primes},
        "satisfied": rs.satisfied_by(a),
    }


def cmd_supnorm_m(args) -> dict:
    data = _load(args.input)
    p_poly = [_int(c, "p_poly coefficient") for c in _field(data, "p_poly")]
    d_poly = [_int(c, "d_poly coefficient") for c in _field(data, "d_poly")]
    l = _int(_field(data, "l"), "l")
    r = parse_rational(_field(data, "r"))
    m = es.supnorm_threshold(p_poly, d_poly, l, r, cap=args.cap)
    return {"minimal_m": m, "bound_at_m": fmt(es.supnorm_bound(p_poly, d_poly, l, r, m))}


def cmd_section(args) -> dict:
    data = _load(args.input)
    rs = es.ResidueSystem.from_json(_field(data, "residues"))
    avoid = es.GridPolynomial.from_json(_field(data, "avoid"))
    r = parse_rational(data["r"]) if "r" in data else None
    m = _int(data["m"], "m") if "m" in data else None
    report = {"seed": args.seed, **es.section_plan(rs, avoid, r, m, seed=args.seed).to_json()}
    return report


def cmd_chain(args) -> dict:
    data = _load(args.input)
    if isinstance(data, dict) and "filtration" in data:
        L = hl.PolarizedLattice.from_json(_field(data, "lattice"))
        T = [sn.SheafClass.from_json(t) for t in data["filtration"]]
        cert = dc.corollary_2_5_check(L, T)
        report = {"filtration": cert.to_json()}
        if cert.applicable and not cert.holds:
            raise CheckFailed(report)
        return report
    U = dc.SubsheafUniverse.from_json(data)
    A = hl.NSClass(parse_vector(data["auxiliary_ample"])) if "auxiliary_ample" in data else None
    select = "first" if args.select_first else "max-pairing"
    trace = dc.run_chain(U, A, prefer_quotient=args.prefer_quotient, select=select)
    report = trace.to_json()
    try:
        report["extremal"] = dc.corollary_2_4_extremal(U).to_json()
    except DomainError:
        report["extremal"] = None
    return report


def cmd_verify(args) -> dict:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in SUITES:
        raise SchemaError(f"unknown suite {args.suite!r}; choose from all, {', '.join(SUITES)}")
    if args.cases is not None and args.cases < 1:
        raise SchemaError("--cases must be at least 1")
    cases = args.cases or 1000
    results = [verify_identities(name, cases, args.seed) for name in names]
    report = {"seed": args.seed, "suites": [r.to_json() for r in results]}
    if not all(r.ok for r in results):
        raise CheckFailed(report)
    return report


def _common(p: argparse.ArgumentParser, seed_default: int = DEFAULT_SEED) -> None:
    p.add_argument("--input", help="JSON input file, '-' for stdin")
    p.add_argument("--seed", type=int, default=seed_default, help=f"random seed (default {seed_default})")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--cap", type=_positive, default=10**6, help="search cap (default 1000000)")
    p.add_argument("--cases", type=int, default=None, help="sample / case count")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bogomolov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cone", help="signature, cone position and dual-cone certificate")
    _common(p)
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("delta", help="slope, discriminant, semistability and extension identities")
    _common(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("bounds", help="restriction thresholds")
    _common(p)
    p.add_argument("--formula", required=True, choices=("flenner", "lemma-3-2", "corollary-3-3", "theorem-3-1"))
    p.add_argument("--d", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--hd")
    p.add_argument("--rank", type=_positive)
    p.add_argument("--delta")
    p.add_argument("--non-reflexive", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sing-degree", help="degree of the singular locus and the Z_m bound")
    _common(p)
    p.add_argument("--m", type=_positive)
    p.add_argument("--points", type=int, default=0)
    p.set_defaults(func=cmd_sing_degree)

    p = sub.add_parser("grid-check", help="invertibility of the simplex-grid evaluation matrix")
    _common(p)
    p.add_argument("--matrix", action="store_true", help="include the matrix in the report")
    p.set_defaults(func=cmd_grid_check)

    p = sub.add_parser("grid-find", help="first grid point where a polynomial does not vanish")
    _common(p)
    p.add_argument("--trace", action="store_true", help="include the elimination trace")
    p.set_defaults(func=cmd_grid_find)

    p = sub.add_parser("residue-search", help="coefficients avoiding all residue hyperplanes")
    _common(p, seed_default=0)
    p.set_defaults(func=cmd_residue_search)

    p = sub.add_parser("supnorm-m", help="least m with (p(m)(l-1) + d(m) l) r^m < 1")
    _common(p)
    p.set_defaults(func=cmd_supnorm_m)

    p = sub.add_parser("section", help="residues, grid shift and norm bound composed")
    _common(p, seed_default=0)
    p.set_defaults(func=cmd_section)

    p = sub.add_parser("chain", help="destabilizing chain, extremal node, or filtration bound")
    _common(p)
    p.add_argument("--prefer-quotient", action="store_true")
    p.add_argument("--select-first", action="store_true", help="start from the first positive node")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("verify-identities", help="run seeded property suites")
    _common(p)
    p.add_argument("--suite", default="all", help=f"all, {', '.join(SUITES)}")
    p.set_defaults(func=cmd_verify)
    return parser


def _render(report: dict, style: str) -> str:
    if style == "json":
        return json.dumps(report, indent=2, default=_default)
    lines: list[str] = []

    def walk(prefix: str, value) -> None:
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
            for i, v in enumerate(value):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix}: {json.dumps(value, default=_default)}")

    walk("", report)
    return "\n".join(lines)


def _default(obj):
    if isinstance(obj, Fraction):
        return fmt(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
        status = EXIT_OK
    except CheckFailed as exc:
        report, status = exc.report, EXIT_DOMAIN
    except CoveringError as exc:
        report = {"error": str(exc), "kind": "covering", "certificate": exc.certificate}
        status = EXIT_DOMAIN
    except SchemaError as exc:
        report, status = {"error": str(exc), "kind": "input"}, EXIT_INPUT
    except DomainError as exc:
        report, status = {"error": str(exc), "kind": type(exc).__name__}, EXIT_DOMAIN
    print(_render(report, args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
