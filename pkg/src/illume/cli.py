"""``illume`` command line.

Exit codes: 0 success / certified, 1 check failed / uncovered points remain
(or an automatic run could not get below 2^n directions),
2 input error.  All randomness comes from ``--seed`` (default
``DEFAULT_SEED``), so identical invocations write byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path

from ._rational import as_vector, format_fraction
from .audit import run_audit
from .bodies import SymBody, distance_to_cube, norm_eval, parse_body
from .certify import (
    DEFAULT_CAP,
    certify_directions,
    enumerate_vertices,
    illuminate_auto,
    min_illumination_search,
    sample_boundary_points,
)
from .directions import FIXED_LABELS, DirectionSet, gen_direction_set, read_directions, write_directions
from .exceptions import IllumeError
from .randomized import (
    DEFAULT_SEED,
    bound_chain,
    build_Rk,
    check_Ek,
    estimate_threshold_n,
    monte_carlo_hit_frequency,
)
from .subdiff import LP_TOLERANCE

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load_body(path: str) -> SymBody:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read body spec {path}: {exc}") from exc
    return parse_body(text)


def _fmt(x) -> str:
    return format_fraction(x) if isinstance(x, (int, Fraction)) else repr(float(x))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _resolve_directions(arg: str, n: int) -> DirectionSet:
    if arg in FIXED_LABELS:
        return gen_direction_set(arg, n)
    if arg == "full":
        vecs = [v for v in itertools.product((-1, 0, 1), repeat=n) if any(v)]
        return DirectionSet.from_vectors(vecs, n, label="Full")
    try:
        dset = read_directions(Path(arg))
    except OSError as exc:
        raise InputError(f"cannot read directions {arg}: {exc}") from exc
    if dset.n != n:
        raise InputError(f"directions have dimension {dset.n}, body has {n}")
    return dset


# -- commands -------------------------------------------------------------------


def cmd_illuminate(args) -> int:
    body = _load_body(args.body)
    stem = Path(args.body).stem
    budget_ok = True
    if args.directions:
        dset = _resolve_directions(args.directions, body.n)
        points = None
        if not body.polyhedral:
            points = sample_boundary_points(body, args.samples, args.seed, args.cap)
        cert = certify_directions(body, dset, points, cap=args.cap, tol=args.tol, strategy=dset.label)
        strategy = dset.label
    else:
        result = illuminate_auto(
            body, seed=args.seed, mode=args.mode, cap=args.cap, max_rounds=args.max_rounds, lp_samples=args.samples, tol=args.tol
        )
        dset, cert, strategy = result.directions, result.certificate, result.certificate.strategy
        budget_ok = result.within_budget
        for k, v in result.ek_status.items():
            print(f"{k}: {'covered' if v else 'not covered'}")
    cert_path = args.out or f"{stem}.cert.json"
    dirs_path = args.directions_out or f"{stem}.dirs.txt"
    Path(cert_path).write_text(cert.to_json(), encoding="utf-8")
    write_directions(dset, dirs_path)
    print(f"strategy: {strategy}")
    print(f"directions: {dset.distinct_count} (budget 2^n = {2 ** body.n})")
    print(f"points checked: {len(cert.records)}{'' if cert.exhaustive else ' (sampled, not exhaustive)'}")
    print(f"status: {cert.status}")
    if not budget_ok:
        print("budget: exceeded")
    for x in cert.uncovered:
        print("uncovered: " + " ".join(_fmt(v) for v in x))
    return EXIT_OK if cert.certified and budget_ok else EXIT_FAIL


def cmd_audit(args) -> int:
    body = _load_body(args.body)
    rows = run_audit(body, samples=args.samples, seed=args.seed, cap=args.cap)
    _emit(_table(["check", "samples", "violations"], [r.as_tuple() for r in rows], args.format), args.out)
    return EXIT_OK if all(r.violations == 0 for r in rows) else EXIT_FAIL


def cmd_simulate(args) -> int:
    parts = []
    ok = True
    if args.chain:
        rows = []
        for n in range(2, args.n_max + 1):
            for k in range(1, (n + 1) // 2 + 1):
                r = bound_chain(n, k)
                ok &= r.chain_holds
                rows.append([n, k, format_fraction(r.q), repr(r.stirling), repr(r.final),
                             int(r.q_ge_stirling), int(r.stirling_ge_final), int(r.chain_holds)])
        parts.append(_table(["n", "k", "q", "stirling", "final", "q_ge_stirling", "stirling_ge_final", "chain_holds"], rows, args.format))
    if args.threshold:
        scan = estimate_threshold_n(2, args.n_max)
        parts.append(scan.to_csv() if args.format == "csv" else json.dumps({"rows": scan.rows, "n0": scan.n0}, indent=1) + "\n")
        print(f"minimal n0 = {scan.n0}", file=sys.stderr)
    if args.n is not None:
        n = args.n
        ks = [args.k] if args.k is not None else list(range(1, (n + 1) // 2 + 1))
        rows = []
        for k in ks:
            r = bound_chain(n, k)
            row = [n, k, format_fraction(r.q), repr(float(r.q)), repr(r.stirling), repr(r.final), int(r.chain_holds)]
            if args.trials:
                mc = monte_carlo_hit_frequency(n, k, args.trials, args.seed)
                row += [args.trials, mc.hits, repr(mc.frequency), repr(mc.sigma), repr(mc.z), int(mc.within(3.0))]
            else:
                row += ["", "", "", "", "", ""]
            rows.append(row)
        parts.append(_table(["n", "k", "q", "q_float", "stirling", "final", "chain_holds",
                             "mc_trials", "mc_hits", "mc_frequency", "mc_sigma", "mc_z", "mc_within_3sigma"], rows, args.format))
        if args.ek_seeds:
            rows = []
            for k in ks:
                for s in range(args.seed, args.seed + args.ek_seeds):
                    real = build_Rk(n, k, args.count, s)
                    res = check_Ek(real, cap=args.cap_ek, sample=args.ek_sample, seed=s)
                    rows.append([n, k, s, real.count, int(res.covered), len(res.missing), int(res.sampled)])
            parts.append(_table(["n", "k", "seed", "trials", "covered", "missing", "sampled"], rows, args.format))
    if not parts:
        raise InputError("simulate needs --n, --chain or --threshold")
    _emit("\n".join(parts), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_vertices(args) -> int:
    body = _load_body(args.body)
    verts = enumerate_vertices(body, args.cap)
    lines = [f"# vertices of {body.family} body, n={body.n}, count={len(verts)}"]
    lines += [" ".join(_fmt(v) for v in x) for x in verts]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_norm(args) -> int:
    body = _load_body(args.body)
    x = args.x.replace(",", " ").split()
    vec = as_vector(x) if body.polyhedral else [float(Fraction(v)) for v in x]
    print(_fmt(norm_eval(body, vec)))
    return EXIT_OK


def cmd_distance(args) -> int:
    print(_fmt(distance_to_cube(_load_body(args.body))))
    return EXIT_OK


def cmd_min_ill(args) -> int:
    body = _load_body(args.body)
    pool = _resolve_directions(args.pool, body.n)
    res = min_illumination_search(body, pool, cap=args.cap)
    print(f"minimum pool cover: {res.size}")
    for v in res.directions:
        print(" ".join(_fmt(a) for a in v))
    if args.out:
        Path(args.out).write_text(res.certificate.to_json(), encoding="utf-8")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="illume", description="Illumination of 1-symmetric convex bodies")
    sub = p.add_subparsers(dest="command", required=True)

    def body_cmd(name: str, help_: str):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--body", required=True, help="body spec JSON file")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max n for vertex enumeration")
        return sp

    sp = body_cmd("illuminate", "build and certify an illuminating direction set")
    sp.add_argument("--directions", help="T, T1, T2, CubeCorners, full, or a directions file")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--mode", choices=("faithful", "adaptive"), default="adaptive")
    sp.add_argument("--max-rounds", type=int, default=12)
    sp.add_argument("--samples", type=int, default=2000, help="boundary samples for smooth bodies")
    sp.add_argument("--tol", type=float, default=LP_TOLERANCE, help="margin for smooth bodies")
    sp.add_argument("--out", help="certificate path (default <body>.cert.json)")
    sp.add_argument("--directions-out", help="directions path (default <body>.dirs.txt)")
    sp.set_defaults(func=cmd_illuminate)

    sp = body_cmd("audit", "lemma and norm-axiom audits")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_audit, cap=6)

    sp = sub.add_parser("simulate", help="probability tables for the randomized construction")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--trials", type=int, default=0, help="Monte Carlo trials per (n, k)")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--count", type=int, help="trials per R_k for E_k checks (default floor(2^n/n^2))")
    sp.add_argument("--ek-seeds", type=int, default=0, help="number of consecutive seeds for E_k checks")
    sp.add_argument("--ek-sample", type=int, help="sampled E_k check beyond --cap-ek")
    sp.add_argument("--cap-ek", type=int, default=20)
    sp.add_argument("--chain", action="store_true", help="bound chain for all 2 <= n <= n-max")
    sp.add_argument("--threshold", action="store_true", help="threshold scan for 2 <= n <= n-max")
    sp.add_argument("--n-max", type=int, default=128)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = body_cmd("vertices", "list all vertices of a polyhedral body")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_vertices)

    sp = body_cmd("norm", "evaluate the gauge")
    sp.add_argument("--x", required=True, help='vector, e.g. "1 -1/2 0"')
    sp.set_defaults(func=cmd_norm)

    sp = body_cmd("distance", "distance to the cube")
    sp.set_defaults(func=cmd_distance)

    sp = body_cmd("min-ill", "minimum illuminating subset of a direction pool")
    sp.add_argument("--pool", default="full", help="full ({-1,0,1}^n minus 0), a family label, or a file")
    sp.add_argument("--out", help="certificate path")
    sp.set_defaults(func=cmd_min_ill)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (IllumeError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
