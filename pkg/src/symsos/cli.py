"""Command-line driver.

Exit codes: 0 feasible / pass, 1 infeasible / fail (a valid outcome), 2 usage or internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import knapsack, maxcut
from .arith import binom, format_rational, parse_rational
from .moment import LevelVector, MomentMatrix, matrix_from_levels
from .psd import PsdCertificate, certify_psd, is_psd, result_from_json, verify
from .symmetry import check_reduction

JOBS_ENV = "SYMSOS_JOBS"

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    """Bad input: reported with exit code 2."""


def _rational(s: str) -> Fraction:
    try:
        return parse_rational(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_json(path: str) -> object:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write_json(path: Path, obj: dict) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1) + "\n")
    return str(path)


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, report dict)


def run_maxcut(args: argparse.Namespace) -> tuple[int, dict]:
    rep = maxcut.certify_feasibility(args.n, args.omega, args.t, args.mode)
    out = rep.to_json()
    if args.emit_certs and rep.direct_result is not None:
        sol = maxcut.gl_solution(args.n, args.omega)
        m = matrix_from_levels(sol.levels, args.t)
        d = Path(args.emit_certs)
        out["matrix_file"] = _write_json(d / "matrix.json", m.to_json())
        out["certificate_file"] = _write_json(d / "certificate.json", rep.direct_result.to_json())
    return (EXIT_OK if rep.feasible else EXIT_FAIL), out


def run_knapsack(args: argparse.Namespace) -> tuple[int, dict]:
    if args.kc_general:
        inst = _load_json(args.kc_general)
        try:
            rows = knapsack.wolsey_inequalities(inst["costs"], inst["profits"], inst["demand"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"malformed instance file: {exc}") from exc
        report = {
            "n": len(inst["costs"]),
            "inequalities": [
                {"coeffs": [format_rational(c) for c in g.coeffs], "rhs": format_rational(-g.constant)} for g in rows
            ],
            "count": len(rows),
        }
        return EXIT_OK, report
    if args.n is None or args.t is None:
        raise UsageError("knapsack needs --n and --t (or --kc-general)")
    n = knapsack.adjust_n(args.n, args.t)
    if n < 2:
        raise UsageError(f"n = {n} is too small")
    if args.search:
        res = knapsack.epsilon_search(n, args.t, args.logbase, demand=args.demand, direct_covers=args.direct_covers)
        report = knapsack.search_report(res)
        report["n_requested"] = args.n
        return (EXIT_OK if res.feasible else EXIT_FAIL), report
    if args.epsilon is None:
        raise UsageError("give --epsilon or --search")
    start = time.perf_counter()
    try:
        if args.demand is None:
            sol = knapsack.gap_solution(n, args.t, args.epsilon, args.logbase)
        else:
            sol = knapsack.theorem3_solution(n, args.t, args.epsilon, args.demand, args.logbase)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cert = knapsack.certify_solution(sol, direct_covers=args.direct_covers)
    obj = sol.objective()
    gap = Fraction(sol.integral_optimum()) / obj
    report = {
        "n": n,
        "n_requested": args.n,
        "t": args.t,
        "logbase": args.logbase,
        "small_level": sol.logpoint,
        "demand": format_rational(sol.demand),
        "feasible": cert.feasible,
        "epsilon": format_rational(sol.epsilon),
        "epsilon_approx": float(sol.epsilon),
        "objective": format_rational(obj),
        "objective_approx": float(obj),
        "integral_opt": sol.integral_optimum(),
        "gap": format_rational(gap),
        "gap_approx": float(gap),
        "sum_ok": cert.sum_ok,
        "moment_ok": cert.moment_ok,
        "per_constraint_verdicts": dict(cert.constraint_ok),
        "methods": dict(cert.methods),
        "runtime_ms": round((time.perf_counter() - start) * 1000, 3),
    }
    return (EXIT_OK if cert.feasible else EXIT_FAIL), report


def run_reduce(args: argparse.Namespace) -> tuple[int, dict]:
    try:
        z = LevelVector.from_json(_load_json(args.levels))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed level vector: {exc}") from exc
    if not 0 <= args.t <= z.n:
        raise UsageError(f"need 0 <= t <= n = {z.n}")
    start = time.perf_counter()
    rep = check_reduction(z, args.t)
    blocks = {}
    for h, verdict in rep.verdicts.items():
        if verdict is None:
            blocks[str(h)] = {"psd": True, "skipped": True}
            continue
        entry: dict = {"psd": is_psd(verdict), "dim": rep.blocks[h].dim}
        if isinstance(verdict, PsdCertificate):
            entry["zero_pivots"] = verdict.zero_pivots
        else:
            entry["witness_value"] = format_rational(verdict.value)
            entry["witness_value_approx"] = float(verdict.value)
        blocks[str(h)] = entry
    report = {
        "n": z.n,
        "t": args.t,
        "feasible": rep.feasible,
        "blocks": blocks,
        "runtime_ms": round((time.perf_counter() - start) * 1000, 3),
    }
    return (EXIT_OK if rep.feasible else EXIT_FAIL), report


def run_verify(args: argparse.Namespace) -> tuple[int, dict]:
    mobj = _load_json(args.matrix)
    cobj = _load_json(args.cert)
    try:
        if isinstance(mobj, dict) and "q" in mobj:
            matrix = MomentMatrix.from_json(mobj).data
        else:
            rows = mobj["data"] if isinstance(mobj, dict) else mobj
            matrix = [[parse_rational(str(v)) for v in row] for row in rows]
        result = result_from_json(cobj)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed input: {exc}") from exc
    try:
        ok = verify(matrix, result)
    except ValueError as exc:
        raise UsageError(f"certificate does not fit the matrix: {exc}") from exc
    report = {"kind": cobj.get("kind"), "dim": len(matrix), "valid": ok}
    return (EXIT_OK if ok else EXIT_FAIL), report


# ---------------------------------------------------------------------------
# crosscheck


def _rand_rational(rng: random.Random, lo: int, hi: int, den: int = 12) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def sample_level_vector(rng: random.Random, n: int, t: int) -> tuple[str, LevelVector]:
    """Draw from a mixture: uniform entries, mixtures of integral points, perturbed Max-Cut solutions."""
    kind = rng.choice(("uniform", "integral", "gl"))
    if kind == "uniform":
        return kind, LevelVector(n, tuple(_rand_rational(rng, -1, 1) for _ in range(n + 1)))
    if kind == "integral":
        # the uniform distribution on the k-subsets has z_k = 1/C(n,k)
        weights = [Fraction(rng.randint(0, 5)) for _ in range(n + 1)]
        if not any(weights):
            weights[rng.randrange(n + 1)] = Fraction(1)
        total = sum(weights)
        return kind, LevelVector(n, tuple(w / total / binom(n, k) for k, w in enumerate(weights)))
    # Max-Cut solution with omega near t, nudged at one level
    base = Fraction(t) + Fraction(rng.choice((-1, 1)) * rng.randint(1, 7), 8)
    omega = min(max(base, Fraction(1, 8)), Fraction(n, 2))
    if omega.denominator == 1:
        omega -= Fraction(1, 16)
    vals = list(maxcut.gl_solution(n, omega).levels.values)
    k = rng.randrange(n + 1)
    vals[k] += Fraction(rng.randint(-4, 4), 64) / binom(n, k)
    return kind, LevelVector(n, tuple(vals))


def _crosscheck_one(task: tuple[int, int, int]) -> tuple[int, str, dict, bool, bool]:
    n, t, seed = task
    rng = random.Random(seed)
    kind, z = sample_level_vector(rng, n, t)
    red = check_reduction(z, t).feasible
    direct = is_psd(certify_psd(matrix_from_levels(z, t)))
    return seed, kind, z.to_json(), red, direct


def run_crosscheck(args: argparse.Namespace) -> tuple[int, dict]:
    if not (1 <= args.n <= 12 and 0 <= args.t <= min(3, args.n)):
        raise UsageError("crosscheck needs n <= 12 and t <= 3")
    start = time.perf_counter()
    master = random.Random(args.seed)
    tasks = [(args.n, args.t, master.getrandbits(63)) for _ in range(args.samples)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_crosscheck_one, tasks))
    else:
        results = [_crosscheck_one(task) for task in tasks]
    kinds: dict[str, int] = {}
    psd_count = 0
    mismatches = []
    for seed, kind, zjson, red, direct in results:
        kinds[kind] = kinds.get(kind, 0) + 1
        psd_count += direct
        if red != direct:
            mismatches.append({"seed": seed, "kind": kind, "z": zjson, "reduce": red, "direct": direct})
    agree = len(results) - len(mismatches)
    report = {
        "n": args.n,
        "t": args.t,
        "samples": args.samples,
        "seed": args.seed,
        "agreement": f"{agree}/{len(results)}",
        "psd_samples": psd_count,
        "kinds": dict(sorted(kinds.items())),
        "mismatches": mismatches,
        "runtime_ms": round((time.perf_counter() - start) * 1000, 3),
    }
    # a disagreement contradicts the block equivalence: an internal error, not an outcome
    return (EXIT_OK if not mismatches else EXIT_ERROR), report


# ---------------------------------------------------------------------------
# parser and output


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symsos", description="Exact certification of symmetric sum-of-squares solutions.")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=int(os.environ.get(JOBS_ENV, "1")), help=f"worker processes (default ${JOBS_ENV} or 1)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled tests")
    p.add_argument("--verbose", "-v", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    mc = sub.add_parser("maxcut", help="certify the symmetric Max-Cut solution on K_n")
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--omega", type=_rational, required=True, help='rational such as "5/2"')
    mc.add_argument("--t", type=int, required=True)
    mc.add_argument("--mode", choices=("reduce", "direct", "both"), default="both")
    mc.add_argument("--emit-certs", metavar="DIR", help="write matrix.json and certificate.json (direct path)")
    mc.set_defaults(func=run_maxcut)

    ks = sub.add_parser("knapsack", help="certify the min-knapsack gap solution")
    ks.add_argument("--n", type=int)
    ks.add_argument("--t", type=int)
    grp = ks.add_mutually_exclusive_group()
    grp.add_argument("--epsilon", type=_rational)
    grp.add_argument("--search", action="store_true", help="search for a small feasible epsilon")
    ks.add_argument("--logbase", choices=knapsack.LOGBASES, default="2")
    ks.add_argument("--demand", type=_rational, help="plain LP with this demand P in (0, 1)")
    ks.add_argument("--kc-general", metavar="FILE", help="emit knapsack-cover inequalities for {costs, profits, demand}")
    ks.add_argument("--direct-covers", type=int, default=None, help="factor only this many cover matrices directly")
    ks.set_defaults(func=run_knapsack)

    rd = sub.add_parser("reduce", help="per-block verdicts for a level vector")
    rd.add_argument("--levels", required=True, help='JSON {"n": ..., "levels": [...]}')
    rd.add_argument("--t", type=int, required=True)
    rd.set_defaults(func=run_reduce)

    cc = sub.add_parser("crosscheck", help="compare block and direct verdicts on random level vectors")
    cc.add_argument("--n", type=int, required=True)
    cc.add_argument("--t", type=int, required=True)
    cc.add_argument("--samples", type=int, default=100)
    cc.add_argument("--seed", dest="cc_seed", type=int, default=None)
    cc.set_defaults(func=run_crosscheck)

    vf = sub.add_parser("verify", help="re-check a serialized certificate or witness")
    vf.add_argument("--matrix", required=True)
    vf.add_argument("--cert", required=True)
    vf.set_defaults(func=run_verify)
    return p


def _flatten(prefix: str, obj, out: list[tuple[str, str]]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list):
        out.append((prefix, json.dumps(obj)))
    else:
        out.append((prefix, "" if obj is None else str(obj)))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=1) + "\n"
    rows: list[tuple[str, str]] = []
    _flatten("", report, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("field", "value"))
    writer.writerows(rows)
    return buf.getvalue()


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "cc_seed", None) is not None:
        args.seed = args.cc_seed
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    func: Callable[[argparse.Namespace], tuple[int, dict]] = args.func
    try:
        code, report = func(args)
    except UsageError as exc:
        code, report = EXIT_ERROR, {"error": str(exc)}
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        code, report = EXIT_ERROR, {"error": f"{type(exc).__name__}: {exc}"}
    config = {k: (format_rational(v) if isinstance(v, Fraction) else v) for k, v in vars(args).items() if k not in ("func", "cc_seed")}
    report = {"command": args.command, "config": config, **report, "exit_code": code}
    text = render(report, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code, report


def main(argv: list[str] | None = None) -> int:
    try:
        code, _ = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
