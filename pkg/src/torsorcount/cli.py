"""Command-line entry point: ``torsorcount {count,sweep,constant,predict,verify,fit}``.

Exit codes: 0 success, 1 a verification failed, 2 bad usage.  The default
worker count comes from TORSORCOUNT_WORKERS (else 1).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import sys
import time
from dataclasses import asdict

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
NAIVE_FORCE_LIMIT = 10**4
VERIFY_GUARD = 1000
SUITES = ("oracle", "first-summation", "omega-p")


class UsageError(Exception):
    pass


def _default_workers() -> int:
    raw = os.environ.get("TORSORCOUNT_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"TORSORCOUNT_WORKERS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("TORSORCOUNT_WORKERS must be >= 1")
    return n


def _count(B: int, method: str, workers: int, force: bool) -> int:
    from . import surface, torsor

    if B < 1:
        raise UsageError("B must be >= 1")
    if method == "naive":
        if B > NAIVE_FORCE_LIMIT and not force:
            raise UsageError(f"naive counting above B={NAIVE_FORCE_LIMIT} needs --force")
        return surface.count_naive(B, workers)
    return torsor.count_torsor(B, workers)


def cmd_count(args) -> int:
    workers = args.workers or _default_workers()
    t0 = time.perf_counter()
    n = _count(args.B, args.method, workers, args.force)
    rec = {
        "command": "count",
        "B": args.B,
        "count": n,
        "method": args.method,
        "workers": workers,
        "seconds": round(time.perf_counter() - t0, 3),
    }
    if args.format == "json":
        print(json.dumps(rec))
    else:
        w = csv.writer(sys.stdout)
        w.writerow(["B", "count", "method", "seconds"])
        w.writerow([rec["B"], n, args.method, rec["seconds"]])
    return EXIT_OK


def _parse_b_list(text: str) -> list[int]:
    try:
        bs = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad B list {text!r}") from None
    if not bs:
        raise UsageError("empty B list")
    if any(b < 1 for b in bs) or bs != sorted(bs):
        raise UsageError("B list must be positive and ascending")
    return bs


def cmd_sweep(args) -> int:
    bs = _parse_b_list(args.B_list)
    workers = args.workers or _default_workers()
    try:
        fh = open(args.out, "w", newline="") if args.out != "-" else sys.stdout
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from None
    try:
        w = csv.writer(fh)
        w.writerow(["B", "count", "method", "seconds"])
        for B in bs:
            t0 = time.perf_counter()
            n = _count(B, args.method, workers, args.force)
            w.writerow([B, n, args.method, f"{time.perf_counter() - t0:.3f}"])
            fh.flush()
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _constants_report(args):
    from . import peyre

    if getattr(args, "constants", None):
        with open(args.constants) as fh:
            return peyre.ConstantReport.from_json(fh.read())
    return peyre.compute_constants(args.prime_limit, args.method, args.samples, args.seed)


def cmd_constant(args) -> int:
    from . import peyre

    out: dict = {}
    comp = args.component
    if comp in ("alpha", "all"):
        a = peyre.alpha()
        out["alpha"] = f"{a.numerator}/{a.denominator}"
    if comp in ("omega-p", "all"):
        out["omega_p"] = asdict(peyre.omega_p_product(args.prime_limit))
    if comp in ("omega-inf", "all"):
        try:
            out["omega_inf"] = asdict(peyre.omega_inf(args.method, args.samples, args.seed))
        except peyre.BudgetExhausted as exc:
            out["omega_inf"] = {"error": str(exc)}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_predict(args) -> int:
    from . import peyre

    rep = _constants_report(args)
    rows = []
    for B in _parse_b_list(args.B_list):
        if B < 3:
            raise UsageError("predict needs B >= 3")
        rows.append({"B": B, "main_term": peyre.predicted_main_term(B, rep)})
    print(json.dumps({"leading_constant": rep.leading_constant, "predictions": rows}, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suites


def _suite_oracle(max_b: int) -> list[str]:
    from . import surface, torsor

    failures = []
    for B in range(1, max_b + 1):
        a, b = torsor.count_torsor(B), surface.count_naive(B)
        if a != b:
            failures.append(f"oracle: B={B} torsor={a} naive={b}")
    if surface.count_box(1) != surface.count_naive(1):
        failures.append("oracle: box oracle disagrees at B=1")
    # compared as multisets: a weakened coprimality check shows up as repeats
    small = min(max_b, 60)
    graph = sorted(surface.normalize(torsor.psi_monomials(p.eta)) for p in torsor.iter_torsor_points_graph(small))
    if graph != sorted(surface.iter_points_naive(small)):
        failures.append(f"oracle: graph-checked torsor points differ from naive points at B={small}")
    return failures


def _suite_first_summation(max_b: int, seed: int = 12345) -> list[str]:
    from . import first_summation as fs
    from . import torsor
    from .local_factors import theta1_qa1a3

    failures = []
    Q = fs.QUARTIC
    for B in sorted({min(max_b, b) for b in (10, 50, 100)}):
        s = sum(fs.n1_direct(Q, fs.quartic_tuple(e), B) for e in torsor.iter_eta17(B))
        if s != torsor.count_torsor(B):
            failures.append(f"first-summation: sum of N1 at B={B} is {s}")
    rng = random.Random(seed)
    table = theta1_qa1a3()
    checked = 0
    while checked < 200:
        e = [rng.randint(1, 12) for _ in range(6)] + [rng.choice([-1, 1]) * rng.randint(1, 12)]
        tup = fs.quartic_tuple(e)
        if not fs.admissible(Q, tup):
            continue
        checked += 1
        B = rng.choice([100, 1000])
        if fs.n1_direct(Q, tup, B) != fs.n1_moebius(Q, tup, B):
            failures.append(f"first-summation: N1 mismatch at {e}, B={B}")
        if fs.theta1_prop(Q, tup) != table.eval(tuple(abs(x) for x in e)):
            failures.append(f"first-summation: theta1 mismatch at {e}")
    return failures


def _suite_omega_p() -> list[str]:
    from . import local_factors as lf

    s = lf.theta1_qa1a3()
    while s.r:
        s = lf.average_last(s)
    if s.table[frozenset()] != lf.OMEGA_P_POLY:
        return [f"omega-p: averaged polynomial is {s.table[frozenset()].as_expr()}"]
    return []


def cmd_verify(args) -> int:
    suites = [x for x in (args.suites if args.suites is not None else ",".join(SUITES)).split(",") if x]
    if not suites:
        raise UsageError("no verification suites selected")
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise UsageError(f"unknown suites: {sorted(unknown)}")
    if args.max_B < 1:
        raise UsageError("--max-B must be >= 1")
    if args.max_B > VERIFY_GUARD and not args.force:
        raise UsageError(f"--max-B above {VERIFY_GUARD} needs --force")
    failures: list[str] = []
    for name in suites:
        t0 = time.perf_counter()
        if name == "oracle":
            f = _suite_oracle(args.max_B)
        elif name == "first-summation":
            f = _suite_first_summation(args.max_B)
        else:
            f = _suite_omega_p()
        print(f"{'PASS' if not f else 'FAIL'} {name} ({time.perf_counter() - t0:.1f}s)")
        for line in f[:20]:
            print("  " + line)
        failures += f
    return EXIT_FAIL if failures else EXIT_OK


def cmd_fit(args) -> int:
    from . import peyre

    try:
        with open(args.input, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    if not rows:
        raise UsageError("empty results file")
    if not {"B", "count"} <= set(rows[0]):
        raise UsageError("results file needs B and count columns")
    rep = _constants_report(args)
    w = csv.writer(sys.stdout)
    w.writerow(["B", "count", "main_term", "ratio", "count_over_BlogB5"])
    for r in rows:
        B, n = int(r["B"]), int(r["count"])
        if B < 3:
            continue
        mt = peyre.predicted_main_term(B, rep)
        w.writerow([B, n, f"{mt:.6g}", f"{n / mt:.6g}", f"{n / (B * math.log(B) ** 5):.6g}"])
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="torsorcount", description="Count rational points on the A3+A1 quartic del Pezzo surface.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("count", help="N(B) by naive search or the torsor kernel")
    c.add_argument("--B", type=int, required=True)
    c.add_argument("--method", choices=("naive", "torsor"), default="torsor")
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--force", action="store_true", help="allow slow naive counts")
    c.set_defaults(func=cmd_count)

    s = sub.add_parser("sweep", help="counts for a list of B, as CSV")
    s.add_argument("--B-list", required=True, help="comma separated, ascending")
    s.add_argument("--method", choices=("naive", "torsor"), default="torsor")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--out", default="-")
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=cmd_sweep)

    def constant_flags(sp):
        sp.add_argument("--prime-limit", type=int, default=10**7)
        sp.add_argument("--samples", type=int, default=10**7)
        sp.add_argument("--seed", type=int, default=12345)
        sp.add_argument("--method", choices=("eta-adaptive", "eta-monte-carlo"), default="eta-adaptive")

    k = sub.add_parser("constant", help="alpha, omega_p, omega_inf as JSON")
    k.add_argument("--component", choices=("alpha", "omega-p", "omega-inf", "all"), default="all")
    constant_flags(k)
    k.set_defaults(func=cmd_constant)

    pr = sub.add_parser("predict", help="predicted main term for a list of B")
    pr.add_argument("--B-list", required=True)
    pr.add_argument("--constants", help="constant report JSON (else computed)")
    constant_flags(pr)
    pr.set_defaults(func=cmd_predict)

    v = sub.add_parser("verify", help="run the consistency suites")
    v.add_argument("--max-B", type=int, default=200)
    v.add_argument("--suites", default=None, help=f"comma separated subset of {','.join(SUITES)}")
    v.add_argument("--force", action="store_true")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fit", help="ratios of counts to the predicted main term")
    f.add_argument("--in", dest="input", required=True)
    f.add_argument("--constants")
    constant_flags(f)
    f.set_defaults(func=cmd_fit)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        if getattr(args, "workers", None) is not None and args.workers < 1:
            raise UsageError("--workers must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"torsorcount: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OverflowError as exc:
        print(f"torsorcount: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
