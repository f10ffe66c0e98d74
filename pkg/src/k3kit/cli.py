"""Command-line entry point: ``k3kit <group> <command> [options]``.

All results are printed as JSON on stdout.  Errors are printed as JSON objects
on stderr with exit code 2 (precondition failures) or 3 (budget exhausted).
Integers that may exceed 64 bits are emitted as decimal strings.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from typing import List, Optional

from .errors import BudgetError, K3KitError, PreconditionError

EXIT_OK, EXIT_PRECONDITION, EXIT_BUDGET = 0, 2, 3


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _load_pencil(path: Optional[str]):
    from .k3zeta import K3Pencil, paper_pencil, paper_pencil_path
    if path is None:
        return paper_pencil()
    if not os.path.exists(path):
        if os.path.basename(path) == os.path.basename(paper_pencil_path()):
            return paper_pencil()
        raise PreconditionError(f"pencil file not found: {path}")
    try:
        return K3Pencil.from_json(path)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path}: invalid JSON ({exc})") from exc


def _rationals(text: str, count: Optional[int] = None) -> List[Fraction]:
    try:
        vals = [Fraction(s.strip()) for s in text.split(",") if s.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"cannot parse coordinates {text!r}") from exc
    if count is not None and len(vals) != count:
        raise PreconditionError(f"expected {count} comma-separated values, got {text!r}")
    return vals


def _point(text: str):
    vals = _rationals(text)
    if len(vals) not in (3, 4):
        raise PreconditionError(f"expected x,y,z or x,y,z,w; got {text!r}")
    return vals


def _fstr(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

def cmd_lattice_classify(a):
    from .lattice import SublatticeParams, classify, theorem_disc_group
    params = SublatticeParams(a.d, a.p, a.i, a.c)
    return {"d": a.d, "p": a.p, "i_alpha": a.i, "c_alpha": a.c,
            "label": classify(params).value, "group": theorem_disc_group(params)}


def cmd_lattice_count(a):
    from .lattice import count_lattices
    counts = count_lattices(a.d, a.p)
    return {"d": a.d, "p": a.p, "counts": {k.value: str(v) for k, v in counts.items()},
            "total": str(sum(counts.values()))}


def cmd_lattice_disc(a):
    from .lattice import (GramLattice, SublatticeParams, discriminant_form, gram_of_M_alpha,
                          invariant_factors_of, theorem_disc_group)
    if a.gram:
        try:
            L = GramLattice(json.loads(a.gram))
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"--gram: invalid JSON ({exc})") from exc
        return {"gram": L.as_lists(), "discriminant_form": discriminant_form(L).to_json()}
    if None in (a.d, a.p, a.i, a.c):
        raise PreconditionError("give --gram or all of --d --p --i --c")
    params = SublatticeParams(a.d, a.p, a.i, a.c)
    L = gram_of_M_alpha(params)
    return {"gram": L.as_lists(), "discriminant_form": discriminant_form(L).to_json(),
            "predicted_group": invariant_factors_of(theorem_disc_group(params))}


def cmd_lattice_census(a):
    from .lattice import census
    rows = census(a.d, a.p)
    return {"d": a.d, "p": a.p, "sublattices": len(rows),
            "all_agree": all(r["agrees"] for r in rows), "rows": rows}


# ---------------------------------------------------------------------------
# clifford
# ---------------------------------------------------------------------------

def cmd_clifford_minors(a):
    from .clifford import leading_principal_minors
    P = _load_pencil(a.pencil)
    minors = leading_principal_minors(P.matrix())
    return {f"m{i + 1}": str(m) for i, m in enumerate(minors)}


def cmd_clifford_class(a):
    from .clifford import even_clifford_from_minors, relevant_places, brauer_invariant
    P = _load_pencil(a.pencil)
    rep = even_clifford_from_minors(P.matrix())
    out = {"representative": "(-m2, -m1*m3) ⊗ (m4, -m3*m5)", "class": rep.to_json()}
    if a.point:
        pt = _rationals(a.point, 3)
        special = rep.specialize(pt)
        out["specialized"] = special.to_json()
        out["invariants"] = {str(v): str(brauer_invariant(special, v).value)
                             for v in relevant_places(special.entries())}
    return out


def cmd_clifford_signature(a):
    from .clifford import signature_exact
    P = _load_pencil(a.pencil)
    pt = _rationals(a.point, 3)
    pos, neg = signature_exact(P.at(pt))
    return {"point": [_fstr(c) for c in pt], "signature": [pos, neg]}


# ---------------------------------------------------------------------------
# k3
# ---------------------------------------------------------------------------

def _known_factors(a):
    from .k3zeta import parse_known_factor
    if not a.known_factor:
        return None
    return [parse_known_factor(s) for s in a.known_factor]


def _counts(a, P):
    from .k3zeta import count_points
    if a.counts:
        return [int(c) for c in a.counts.split(",")]
    return [count_points(P, a.p, n, threads=a.threads, orbits=a.orbits) for n in range(1, a.nmax + 1)]


def cmd_k3_count(a):
    from .k3zeta import count_points, count_points_naive
    P = _load_pencil(a.pencil)
    if a.naive:
        N = count_points_naive(P, a.p, a.n)
    else:
        N = count_points(P, a.p, a.n, threads=a.threads, orbits=a.orbits)
    return {"p": a.p, "n": a.n, "count": str(N)}


def cmd_k3_zeta(a):
    from .k3zeta import zeta_from_counts
    P = _load_pencil(a.pencil)
    return zeta_from_counts(_counts(a, P), a.p, _known_factors(a)).to_json()


def cmd_k3_picard_bound(a):
    from .k3zeta import zeta_from_counts
    P = _load_pencil(a.pencil)
    rep = zeta_from_counts(_counts(a, P), a.p, _known_factors(a))
    return {"p": a.p, "nmax": len(rep.counts), "picard_bound": rep.cyclotomic_roots}


def cmd_k3_tritangents(a):
    from .k3zeta import tritangent_search
    P = _load_pencil(a.pencil)
    return tritangent_search(P, a.p, a.k).to_json()


# ---------------------------------------------------------------------------
# bm
# ---------------------------------------------------------------------------

def _surface_point(P, vals):
    from .brauer_manin import SurfaceRationalPoint, SurfaceRealPoint
    if len(vals) == 4:
        return SurfaceRationalPoint.on(P, vals)
    return SurfaceRealPoint.over(P, vals)


def cmd_bm_real_invariant(a):
    from .brauer_manin import real_invariant
    P = _load_pencil(a.pencil)
    pt = _point(a.point)
    return {"point": [_fstr(c) for c in pt], "inv_inf": _fstr(real_invariant(P, pt[:3]).value)}


def cmd_bm_adelic_sum(a):
    from .brauer_manin import adelic_sum
    P = _load_pencil(a.pencil)
    base = _surface_point(P, _point(a.base))
    assignment = {}
    for item in a.assign or []:
        if "=" not in item:
            raise PreconditionError(f"--assign expects place=x,y,z[,w]; got {item!r}")
        place, coords = item.split("=", 1)
        assignment[place] = _surface_point(P, _point(coords))
    total, per_place = adelic_sum(P, assignment, base, detail=True)
    return {"invariants": {str(v): _fstr(val.value) for v, val in per_place.items()},
            "total": _fstr(total.value)}


def cmd_bm_certify(a):
    from .brauer_manin import wa_failure_certificate
    P = _load_pencil(a.pencil)
    P1 = _point(a.p1) if a.p1 else None
    P2 = _point(a.p2) if a.p2 else None
    return wa_failure_certificate(P, P1, P2).to_json()


# ---------------------------------------------------------------------------
# fourfold, repro
# ---------------------------------------------------------------------------

def cmd_fourfold_associate(a):
    from .lattice import cubic_fourfold_association
    status, reason = cubic_fourfold_association(a.d, a.p)
    return {"d": a.d, "p": a.p, "association": status.value, "reason": reason}


def cmd_repro(a):
    from .repro import run_all
    results = run_all(full=a.full, threads=a.threads)
    failed = [r for r in results if not r.ok and not r.gated]
    if not a.json:
        for r in results:
            print(r.line())
    payload = {"results": [r.to_json() for r in results], "all_passed": not failed,
               "mode": "full" if a.full else "fast"}
    return payload, (1 if failed else 0), bool(a.json)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="k3kit", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for point counting (default: numba's default)")
    parser.add_argument("--manifest", default=None, help="write a run manifest (JSON) to this path")
    groups = parser.add_subparsers(dest="group", required=True)

    def add(group_parsers, name, func, help_text):
        sp = group_parsers.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        return sp

    def lattice_args(sp):
        for flag in ("--d", "--p", "--i", "--c"):
            sp.add_argument(flag, type=int, required=True)

    lat = groups.add_parser("lattice", help="index-p sublattices and discriminant forms").add_subparsers(
        dest="command", required=True)
    sp = add(lat, "classify", cmd_lattice_classify, "isomorphism class of Gamma_{i,c}")
    lattice_args(sp)
    sp = add(lat, "count", cmd_lattice_count, "number of index-p sublattices per class")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp = add(lat, "disc", cmd_lattice_disc, "discriminant form via Smith normal form")
    for flag in ("--d", "--p", "--i", "--c"):
        sp.add_argument(flag, type=int, default=None)
    sp.add_argument("--gram", default=None, help="JSON Gram matrix instead of (d, p, i, c)")
    sp = add(lat, "census", cmd_lattice_census, "enumerate index-p sublattices of <-2d> + U")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)

    cl = groups.add_parser("clifford", help="minors, Clifford classes, signatures").add_subparsers(
        dest="command", required=True)
    sp = add(cl, "minors", cmd_clifford_minors, "leading principal minors of x M1 + y M2 + z M3")
    sp.add_argument("--pencil", default=None)
    sp = add(cl, "class", cmd_clifford_class, "even Clifford representative")
    sp.add_argument("--pencil", default=None)
    sp.add_argument("--point", default=None, help="optional x,y,z to specialize at")
    sp = add(cl, "signature", cmd_clifford_signature, "signature of M(x,y,z)")
    sp.add_argument("--pencil", default=None)
    sp.add_argument("--point", required=True)

    k3 = groups.add_parser("k3", help="point counts, zeta functions, tritangents").add_subparsers(
        dest="command", required=True)
    sp = add(k3, "count", cmd_k3_count, "#S(F_{p^n})")
    sp.add_argument("--pencil", default=None)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--orbits", action="store_true", help="Galois-orbit fast path")
    sp.add_argument("--naive", action="store_true", help="use the table-free reference counter")
    for name, func, text in (("zeta", cmd_k3_zeta, "Frobenius characteristic polynomial"),
                             ("picard-bound", cmd_k3_picard_bound, "upper bound for the Picard number")):
        sp = add(k3, name, func, text)
        sp.add_argument("--pencil", default=None)
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--nmax", type=int, default=10)
        sp.add_argument("--known-factor", action="append", default=None,
                        help='e.g. "(t-3)^2"; default (t-p)')
        sp.add_argument("--orbits", action="store_true")
        sp.add_argument("--counts", default=None, help="comma-separated precomputed N_1,...,N_nmax")
    sp = add(k3, "tritangents", cmd_k3_tritangents, "lines whose pullback splits")
    sp.add_argument("--pencil", default=None)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, default=1)

    bm = groups.add_parser("bm", help="Brauer-Manin invariants").add_subparsers(dest="command", required=True)
    sp = add(bm, "real-invariant", cmd_bm_real_invariant, "inv_inf at a real point")
    sp.add_argument("--pencil", default=None)
    sp.add_argument("--point", required=True)
    sp = add(bm, "adelic-sum", cmd_bm_adelic_sum, "sum of local invariants of an adelic point")
    sp.add_argument("--pencil", default=None)
    sp.add_argument("--assign", action="append", default=None, help='place=x,y,z[,w], e.g. "inf=0,-1,1"')
    sp.add_argument("--base", required=True, help="rational point x,y,z,w used at unassigned places")
    sp = add(bm, "certify", cmd_bm_certify, "weak-approximation failure certificate")
    sp.add_argument("--pencil", default=None)
    sp.add_argument("--p1", default=None, help="rational point x,y,z,w (searched if omitted)")
    sp.add_argument("--p2", default=None, help="real base point x,y,z (searched if omitted)")

    ff = groups.add_parser("fourfold", help="cubic fourfold criteria").add_subparsers(
        dest="command", required=True)
    sp = add(ff, "associate", cmd_fourfold_associate, "associated cubic fourfolds for (d, p)")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)

    sp = groups.add_parser("repro", help="run every acceptance check")
    sp.set_defaults(func=cmd_repro, command=None)
    sp.add_argument("--full", action="store_true", help="direct point counts up to n = 10")
    sp.add_argument("--json", action="store_true", help="structured report only")
    return parser


def _emit(obj) -> str:
    text = json.dumps(obj, indent=2, ensure_ascii=False, default=str)
    print(text)
    return text


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    code, text = EXIT_OK, ""
    try:
        result = args.func(args)
        if isinstance(result, tuple):
            payload, code, show = result
            text = _emit(payload) if show else json.dumps(payload, default=str)
        else:
            text = _emit(result)
    except K3KitError as exc:
        code = EXIT_BUDGET if isinstance(exc, BudgetError) else EXIT_PRECONDITION
        err = exc.to_dict()
        if isinstance(exc, PreconditionError) and hasattr(exc, "component"):
            err["component"] = exc.component
        print(json.dumps(err), file=sys.stderr)
    if args.manifest:
        manifest = {
            "command": " ".join(x for x in (args.group, getattr(args, "command", None)) if x),
            "arguments": {k: v for k, v in vars(args).items() if k not in ("func",)},
            "wall_time_s": round(time.perf_counter() - t0, 3),
            "threads": args.threads or 1,
            "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
            "exit_code": code,
        }
        with open(args.manifest, "w") as fh:
            json.dump(manifest, fh, indent=2, default=str)
    return code


if __name__ == "__main__":
    sys.exit(main())
