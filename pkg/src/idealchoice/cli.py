"""Command-line entry point.

Exit codes: 0 for success or a true verdict, 1 for a false verdict or a
failed audit, 2 for usage and input errors. Results go to stdout (JSON with
``--json``); a one-line JSON run manifest goes to stderr so stdout stays
byte-identical across runs of deterministic commands.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import platform
import sys
import time
from fractions import Fraction

from . import __version__
from . import counting, families, hypergraph, series, solver, tame, trees


class UsageError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _write_json(path: str, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [headers] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths))
                     for r in cells)


class Out:
    """Collects stdout so the manifest can carry its digest."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.buf = io.StringIO()

    def emit(self, data: dict, text: str) -> None:
        if self.as_json:
            self.buf.write(json.dumps(data, sort_keys=True) + "\n")
        else:
            self.buf.write(text.rstrip("\n") + "\n")


# -- hyper ------------------------------------------------------------------

def cmd_hyper(args, out: Out) -> int:
    h = hypergraph.Hypergraph.from_json(_load_json(args.input))
    if args.action == "max-partition":
        size, w = hypergraph.max_partition(h)
        out.emit(w.to_json(), f"max partition size {size}\nD = {sorted(w.D)}\n"
                              f"P = {sorted(w.P)}")
        return 0
    if args.action == "isolated":
        iso = sorted(hypergraph.isolated_vertices(h))
        out.emit({"isolated": iso}, f"isolated vertices: {iso}")
        return 0
    if args.action == "trim":
        t = hypergraph.trim_economical(h)
        out.emit(t.to_json(), t.dumps())
        return 0
    if args.action == "economical":
        ok = hypergraph.is_economical(h)
        out.emit({"economical": ok}, f"economical: {ok}")
        return 0 if ok else 1
    prof = hypergraph.degree_profile(h)
    data = {"degrees": [prof.degrees[v] for v in range(h.vertex_count)],
            "D_sizes": {str(k): v for k, v in prof.D_sizes.items()},
            "m": {str(k): v for k, v in prof.m.items()}}
    rows = [[k, c, prof.m.get(k, 0)] for k, c in prof.D_sizes.items()]
    out.emit(data, _table(["degree", "|D_k|", "m_k"], rows))
    return 0


# -- solve ------------------------------------------------------------------

def cmd_solve(args, out: Out) -> int:
    if args.action == "H":
        r = solver.exact_H(args.n, time_budget=args.budget_secs,
                           threads=args.threads)
        h = solver.expand_witness(r.witness)
        if args.witness:
            _write_json(args.witness, h.to_json())
        data = r.to_json()
        data["hypergraph"] = h.to_json()
        text = (f"H({r.n}) {'=' if r.proved_optimal else '>='} {r.value}"
                f"   (cap {r.cap}, proved_optimal={r.proved_optimal})\n"
                f"witness: {h.vertex_count} vertices, edges {h.edge_sets()}")
        out.emit(data, text)
        return 0
    if args.seed is None:
        raise UsageError("solve witness needs --seed")
    r = solver.search_witness(args.target, args.n, args.seed,
                              budget=args.budget_secs or 60.0,
                              max_attempts=args.max_attempts)
    data = {"found": r.found, "attempts": r.attempts, "method": r.method,
            "hypergraph": r.hypergraph.to_json() if r.found else None}
    if r.found and args.output:
        _write_json(args.output, r.hypergraph.to_json())
    text = (f"found a {args.target}-vertex witness for n={args.n} "
            f"({r.method}, {r.attempts} attempts)\n{r.hypergraph.dumps()}"
            if r.found else
            f"no witness after {r.attempts} attempts (not a proof of absence)")
    out.emit(data, text)
    return 0 if r.found else 1


# -- tree -------------------------------------------------------------------

def cmd_tree(args, out: Out) -> int:
    t = trees.build_T(args.n)
    if args.emit == "tree":
        data = t.to_json()
    elif args.emit == "family":
        data = trees.build_bounding_family(args.n, t=t).to_json()
    else:
        data = trees.branch_hypergraph(args.n, t=t).to_json()
    out.emit(data, json.dumps(data))
    return 0


# -- family -----------------------------------------------------------------

def cmd_family(args, out: Out) -> int:
    if args.action == "search":
        r = families.search_full_non_dagger(args.k, args.n,
                                            budget=args.budget_secs or 60.0,
                                            seed=args.seed)
        status = ("found" if r.family else
                  "none exists" if r.exhausted else "inconclusive")
        data = {"status": status, "exhausted": r.exhausted, "nodes": r.nodes,
                "family": r.family.to_json() if r.family else None}
        text = f"{status} (k={args.k}, n={args.n}, {r.nodes} nodes)"
        if r.family:
            text += "\n" + r.family.dumps()
        out.emit(data, text)
        return 0 if r.family else 1
    F = families.Family.from_json(_load_json(args.input))
    if args.full:
        ok = families.is_full(F)
        out.emit({"full": ok}, f"full: {ok}")
        return 0 if ok else 1
    if args.dagger is not None:
        ok, w = families.dagger_holds(F, args.dagger)
        data = {"dagger": ok, "n": args.dagger,
                "witness": w.to_json() if w else None}
        text = f"dagger_{args.dagger}: {ok}"
        if w:
            text += f"   G = {sorted(w.G)}, D = {sorted(w.D)}"
        out.emit(data, text)
        return 0 if ok else 1
    ok = families.is_bounding(F, args.bounding)
    out.emit({"bounding": ok, "n": args.bounding},
             f"I({args.bounding})-bounding: {ok}")
    return 0 if ok else 1


# -- bounds -----------------------------------------------------------------

def _solver_values(max_n: int, solver_max_n: int, budget: float, threads: int,
                   cache: str | None) -> dict[int, int]:
    known: dict[int, int] = {}
    if cache:
        try:
            known = {int(k): int(v) for k, v in _load_json(cache).items()}
        except UsageError:
            known = {}
    for n in range(1, min(max_n, solver_max_n, solver.MAX_N) + 1):
        if n in known:
            continue
        r = solver.exact_H(n, time_budget=budget, threads=threads)
        if r.proved_optimal:
            known[n] = r.value
    if cache:
        _write_json(cache, {str(k): v for k, v in sorted(known.items())})
    return {n: v for n, v in known.items() if n <= max_n}


def _interval(lo: int, hi: int) -> str:
    return str(lo) if lo == hi else f"[{lo},{hi}]"


def cmd_bounds(args, out: Out) -> int:
    if args.action == "audit":
        rep = counting.lower_bound_audit(args.max_n)
        harm, first = counting.harmonic_bound_check(args.harmonic_max)
        ident = all(counting.identity_ddagger(n, k)[2]
                    for n in range(1, args.identity_max + 1)
                    for k in range(1, n + 1))
        data = {"f_below_k": rep.f_below_k, "convexity": rep.convexity_ok,
                "shifted": rep.k_above_shifted, "harmonic": harm,
                "harmonic_first_failure": first, "identity": ident}
        text = "\n".join(f"{k}: {'pass' if v else 'FAIL'}"
                         for k, v in data.items() if k != "harmonic_first_failure")
        out.emit(data, text)
        return 0 if rep.passed and harm and ident else 1
    exact = {}
    if args.use_solver:
        exact = _solver_values(args.max_n, args.solver_max_n, args.solver_budget,
                               args.threads,
                               args.cache)
    rows = counting.derive_tables(args.max_n, exact)
    I = counting.I_values(rows)
    data = {"rows": [r.to_json() for r in rows],
            "I": {str(k): list(v) for k, v in I.items()}}
    table = _table(
        ["n", "k_n", "f(n)", "sum n/k", "H(n)", "source", "I(n+1)"],
        [[r.n, r.k_n, f"{r.lower_f:.3f}", f"{float(r.upper_H):.3f}",
          _interval(r.H_lo, r.H_hi), r.H_exact_source,
          _interval(r.I_next_lo, r.I_next_hi)] for r in rows])
    known = ", ".join(f"I({k})={_interval(*v)}" for k, v in I.items())
    out.emit(data, table + "\n" + known)
    return 0


# -- series -----------------------------------------------------------------

def _frac(x: Fraction) -> str:
    return str(x)


def cmd_series(args, out: Out) -> int:
    spec = series.build_spec(args.n, args.blocks)
    if args.action == "emit":
        fam = tame.TruncatedSeriesFamily.from_spec(spec, args.trunc)
        data = fam.to_json()
        out.emit(data, json.dumps(data))
        return 0
    if args.action == "demo":
        pat = series.demo_pattern(spec)
        rep = series.boundary_sums(spec, pat)
        claim = series.claim_audit(spec, pat, rep)
        verdicts = series.classify_pattern(spec, pat)
        trend = {v.series: v.trend for v in verdicts}
        rows = [dict(r, verdict=trend[r["series"]]) for r in rep.rows()]
        data = {"b": [str(x) for x in spec.b], "rows": rows,
                "verdicts": [v.to_json() for v in verdicts],
                "claim_violations": claim.violations}
        text = _table(["series", "verdict", "final sum", "positive", "negative"],
                      [[v.series, v.trend, _frac(rep.at(v.series, spec.M)),
                        _frac(v.positive_part), _frac(v.negative_part)]
                       for v in verdicts])
        out.emit(data, text)
        return 0 if claim.passed else 1
    if args.seed is None:
        raise UsageError("series audit needs --seed")
    violations = triggers = 0
    bad = []
    for idx, pat in enumerate(series.random_patterns(spec, args.patterns, args.seed)):
        claim = series.claim_audit(spec, pat)
        violations += claim.violations
        triggers += len(claim.triggers)
        for t in claim.triggers:
            if not t.ok:
                bad.append({"pattern": idx, "block": t.block, "series": t.series,
                            "sum_num": t.sum_i.numerator,
                            "sum_den": t.sum_i.denominator, "verdict": "violation"})
    data = {"patterns": args.patterns, "triggered_blocks": triggers,
            "violations": violations, "rows": bad}
    text = (f"{args.patterns} patterns, {triggers} triggered blocks, "
            f"{violations} violations")
    out.emit(data, text)
    return 0 if violations == 0 else 1


# -- tame -------------------------------------------------------------------

def cmd_tame(args, out: Out) -> int:
    fam = tame.TruncatedSeriesFamily.from_json(_load_json(args.input))
    if args.trunc is not None:
        if not 1 <= args.trunc <= fam.N:
            raise UsageError(f"--trunc must be in 1..{fam.N}")
        fam = tame.TruncatedSeriesFamily([row[:args.trunc] for row in fam.terms])
    cert = tame.build_tame_chain(fam, args.depth, args.sides)
    check = tame.verify_certificate(fam, cert)
    data = cert.to_json()
    data["A"] = tame._runs(tame.assemble_A(cert))
    data["verified"] = check.ok
    data["partial_sums"] = [str(s) for s in check.partial_sums]
    text = (f"levels achieved {cert.achieved}/{cert.depth + 1}"
            f"{' (partial)' if not cert.complete else ''}\n"
            f"thresholds {cert.thresholds}\nsides {cert.sides}\n"
            f"partial sums {[str(s) for s in check.partial_sums]}\n"
            f"verified {check.ok}")
    out.emit(data, text)
    return 0 if check.ok else 1


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit JSON instead of text")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker processes for the solver (default 1)")

    p = argparse.ArgumentParser(prog="idealchoice", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    hy = sub.add_parser("hyper", parents=[common], help="hypergraph operations")
    hy.add_argument("action", choices=["max-partition", "isolated", "trim",
                                       "degrees", "economical"])
    hy.add_argument("--input", required=True)

    so = sub.add_parser("solve", parents=[common], help="exact H(n) and witness search")
    so.add_argument("action", choices=["H", "witness"])
    so.add_argument("--n", type=int, required=True)
    so.add_argument("--budget-secs", type=float, default=None)
    so.add_argument("--witness", help="write the H(n) witness hypergraph here")
    so.add_argument("--target", type=int, help="vertex count for witness search")
    so.add_argument("--seed", type=int)
    so.add_argument("--max-attempts", type=int)
    so.add_argument("--output", help="write a found witness here")

    tr = sub.add_parser("tree", parents=[common], help="the trees T_n")
    tr.add_argument("action", choices=["build"])
    tr.add_argument("--n", type=int, required=True)
    tr.add_argument("--emit", choices=["tree", "family", "hypergraph"], default="tree")

    fa = sub.add_parser("family", parents=[common], help="sign-function families")
    fa.add_argument("action", choices=["check", "search"])
    fa.add_argument("--input")
    mode = fa.add_mutually_exclusive_group()
    mode.add_argument("--dagger", type=int, metavar="N")
    mode.add_argument("--bounding", type=int, metavar="N")
    mode.add_argument("--full", action="store_true")
    fa.add_argument("--k", type=int)
    fa.add_argument("--n", type=int)
    fa.add_argument("--budget-secs", type=float)
    fa.add_argument("--seed", type=int)

    bo = sub.add_parser("bounds", parents=[common], help="bounds table and audits")
    bo.add_argument("action", choices=["table", "audit"])
    bo.add_argument("--max-n", type=int, required=True)
    bo.add_argument("--use-solver", action="store_true")
    bo.add_argument("--solver-budget", type=float, default=300.0)
    bo.add_argument("--solver-max-n", type=int, default=6,
                    help="largest n handed to the exact solver")
    bo.add_argument("--cache", help="JSON file of proved H values to reuse")
    bo.add_argument("--harmonic-max", type=int, default=10_000)
    bo.add_argument("--identity-max", type=int, default=60)

    se = sub.add_parser("series", parents=[common], help="the 2n-series construction")
    se.add_argument("action", choices=["audit", "demo", "emit"])
    se.add_argument("--n", type=int, required=True)
    se.add_argument("--blocks", type=int, required=True)
    se.add_argument("--patterns", type=int, default=1000)
    se.add_argument("--seed", type=int)
    se.add_argument("--trunc", type=int)

    ta = sub.add_parser("tame", parents=[common], help="tame-set certificates")
    ta.add_argument("action", choices=["build"])
    ta.add_argument("--input", required=True)
    ta.add_argument("--depth", type=int, required=True)
    ta.add_argument("--trunc", type=int)
    ta.add_argument("--sides", nargs="*", choices=["ge", "lt", "none"])
    return p


def _check_args(p: argparse.ArgumentParser, args) -> None:
    if args.command == "solve" and args.action == "witness" and args.target is None:
        p.error("solve witness needs --target")
    if args.command == "family":
        if args.action == "check":
            if not args.input:
                p.error("family check needs --input")
            if args.dagger is None and args.bounding is None and not args.full:
                p.error("family check needs one of --dagger, --bounding, --full")
        elif args.k is None or args.n is None:
            p.error("family search needs --k and --n")
    if getattr(args, "threads", 1) < 1:
        p.error("--threads must be >= 1")


HANDLERS = {"hyper": cmd_hyper, "solve": cmd_solve, "tree": cmd_tree,
            "family": cmd_family, "bounds": cmd_bounds, "series": cmd_series,
            "tame": cmd_tame}


def dispatch(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    p = build_parser()
    try:
        args = p.parse_args(argv)
        args.json = getattr(args, "json", False)
        args.threads = getattr(args, "threads", 1)
        _check_args(p, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Out(args.json)
    start = time.monotonic()
    try:
        code = HANDLERS[args.command](args, out)
    except (UsageError, hypergraph.HypergraphError, families.FamilyError,
            trees.TreeError, solver.SolverError, series.SeriesError,
            tame.TameError, counting.PreconditionError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    text = out.buf.getvalue()
    stdout.write(text)
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "json", "threads")}
    manifest = {"subcommand": args.command, "parameters": params,
                "seed": params.get("seed"), "threads": args.threads,
                "versions": {"idealchoice": __version__,
                             "python": platform.python_version()},
                "elapsed": round(time.monotonic() - start, 6),
                "exit_code": code,
                "digest": hashlib.sha256(text.encode()).hexdigest()}
    print(json.dumps({"manifest": manifest}, sort_keys=True), file=stderr)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
