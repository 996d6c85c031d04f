"""Command-line front end.

Usage:
    prabhakar eval prabhakar --alpha 1 --beta 1 --gamma 1 --z 1
    prabhakar eval hlz --lambda 1 --nu 1 --z 0.5 --s 1
    prabhakar dist moment --alpha 1 --beta 1 --gamma 1 --t 2 --s 2
    prabhakar dist sample --alpha 0.8 --beta 1.2 --gamma 2 --t 1 --n 1000 --seed 7
    prabhakar certify laguerre o6a --default-grid --format jsonl

Exit codes: 0 success, 1 usage error, 2 domain error, 3 non-convergence,
4 certification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence

from . import certify as cert
from . import distribution as dist
from .errors import DomainError, NonConvergenceError
from .specfun import (
    DEFAULT_CONFIG,
    EvalConfig,
    HLZParams,
    MLParams,
    SeriesResult,
    classical_ml,
    hlz_phi,
    kummer_1f1,
    prabhakar_e,
    two_param_ml,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NONCONVERGENCE, EXIT_CERT_FAIL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class OutputRecord:
    command: str
    params: Dict[str, Any]
    result: Dict[str, Any]
    error: Optional[float] = None
    elapsed: float = 0.0

    def flat(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"command": self.command}
        row.update({f"param.{k}": v for k, v in self.params.items()})
        row.update(self.result)
        row["error"] = self.error
        row["elapsed"] = self.elapsed
        return row

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "params": self.params,
            "result": self.result,
            "error": self.error,
            "elapsed": self.elapsed,
        }


def format_number(value: float) -> str:
    """17 significant digits, always parseable back to the same float."""
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    text = format(value, ".17g")
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


def to_json(obj: Any) -> str:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_number(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return format_number(value)
    if value is None:
        return ""
    if isinstance(value, dict):
        return to_json(value)
    return str(value)


def render(records: Sequence[OutputRecord], fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(to_json(r.to_dict()) + "\n" for r in records)
    rows = [r.flat() for r in records]
    keys: List[str] = []
    for row in rows:
        keys.extend(k for k in row if k not in keys)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for row in rows:
            writer.writerow([_cell(row.get(k)) for k in keys])
        return buf.getvalue()
    cells = [[_cell(row.get(k)) for k in keys] for row in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(line.rstrip() for line in lines) + "\n"


# --- argument parsing ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("table", "jsonl", "csv"), default="table")
    parser.add_argument("--out", help="write output to this file instead of stdout")
    parser.add_argument("--rel-tol", type=float, default=DEFAULT_CONFIG.rel_tol)
    parser.add_argument("--max-terms", type=int, default=None, help="overrides $ML_MAX_TERMS")


def _ml_params(parser: argparse.ArgumentParser, *, gamma: bool = True, beta: bool = True) -> None:
    parser.add_argument("--alpha", type=float, required=True)
    if beta:
        parser.add_argument("--beta", type=float, required=True)
    if gamma:
        parser.add_argument("--gamma", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prabhakar", description=__doc__.split("\n\n")[0])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = commands.add_parser("eval", help="evaluate a special function")
    subjects = ev.add_subparsers(dest="subject", required=True, parser_class=_Parser)
    sp = subjects.add_parser("prabhakar", help="E^gamma_{alpha,beta}(z)")
    _ml_params(sp)
    sp = subjects.add_parser("ml2", help="E_{alpha,beta}(z)")
    _ml_params(sp, gamma=False)
    sp = subjects.add_parser("ml1", help="E_alpha(z)")
    _ml_params(sp, gamma=False, beta=False)
    sp = subjects.add_parser("kummer", help="1F1(a; b; z)")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp = subjects.add_parser("hlz", help="extended Hurwitz-Lerch zeta")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mu", type=float, default=1.0)
    sp.add_argument("--nu", type=float, default=1.0)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--sigma", type=float, default=0.0)
    sp.add_argument("--kappa", type=float, default=1.0)
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--s", type=float, required=True)
    for sp in subjects.choices.values():
        sp.add_argument("--z", type=float, required=True)
        _common(sp)

    ds = commands.add_parser("dist", help="query the ML(alpha, beta, gamma) distribution")
    actions = ds.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("pmf", "cdf"):
        sp = actions.add_parser(name)
        sp.add_argument("--k", type=int, help="single support point")
        sp.add_argument("--kmax", type=int, help="last support point (default: tail cutoff)")
    for name, kind in (("moment", int), ("factorial", int), ("fracmoment", float)):
        sp = actions.add_parser(name)
        sp.add_argument("--s", type=kind, required=True)
        methods = ("hlz", "brute") if name == "fracmoment" else ("closed", "brute")
        sp.add_argument("--method", choices=methods, default=methods[0])
    sp = actions.add_parser("sample")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--raw", action="store_true", help="emit every draw instead of a summary")
    for sp in actions.choices.values():
        _ml_params(sp)
        sp.add_argument("--t", type=float, required=True)
        _common(sp)

    ct = commands.add_parser("certify", help="certify inequalities and identities on a grid")
    ct.add_argument("claims", nargs="*", metavar="CLAIM", help=f"any of: {', '.join(cert.CLAIMS)} (default: all)")
    ct.add_argument("--default-grid", action="store_true", help="use the default grid (the default)")
    defaults = cert.DEFAULT_GRID
    for axis, rng in (
        ("alpha", defaults.alpha_range),
        ("beta", defaults.beta_range),
        ("gamma", defaults.gamma_range),
        ("t", defaults.t_range),
    ):
        ct.add_argument(f"--{axis}", type=float, help=f"single {axis} value")
        ct.add_argument(f"--{axis}-min", type=float, default=rng[0])
        ct.add_argument(f"--{axis}-max", type=float, default=rng[1])
        ct.add_argument(f"--{axis}-steps", type=int, default=rng[2])
    ct.add_argument("--tol", type=float, default=1e-9)
    ct.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    _common(ct)
    return parser


def _config(args) -> EvalConfig:
    max_terms = args.max_terms
    if max_terms is None:
        env = os.environ.get("ML_MAX_TERMS")
        max_terms = int(env) if env else DEFAULT_CONFIG.max_terms
    return EvalConfig(rel_tol=args.rel_tol, max_terms=max_terms)


@contextmanager
def _timer() -> Iterator[List[float]]:
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = time.perf_counter() - start


# --- commands -------------------------------------------------------------------------


def cmd_eval(args, cfg: EvalConfig):
    params: Dict[str, Any]
    with _timer() as clock:
        if args.subject == "prabhakar":
            params = {"alpha": args.alpha, "beta": args.beta, "gamma": args.gamma, "z": args.z}
            res = prabhakar_e(MLParams(args.alpha, args.beta, args.gamma), args.z, cfg)
        elif args.subject == "ml2":
            params = {"alpha": args.alpha, "beta": args.beta, "z": args.z}
            res = two_param_ml(args.alpha, args.beta, args.z, cfg)
        elif args.subject == "ml1":
            params = {"alpha": args.alpha, "z": args.z}
            res = classical_ml(args.alpha, args.z, cfg)
        elif args.subject == "kummer":
            params = {"a": args.a, "b": args.b, "z": args.z}
            res = kummer_1f1(args.a, args.b, args.z, cfg)
        else:
            h = HLZParams(args.lam, args.mu, args.nu, args.rho, args.sigma, args.kappa, args.a)
            params = {
                "lambda": h.lam, "mu": h.mu, "nu": h.nu, "rho": h.rho,
                "sigma": h.sigma, "kappa": h.kappa, "a": h.a, "z": args.z, "s": args.s,
            }
            res = hlz_phi(h, args.z, args.s, cfg)
    record = _series_record(f"eval {args.subject}", params, res, clock[0])
    return [record], EXIT_OK if res.converged else EXIT_NONCONVERGENCE


def _series_record(command: str, params: Dict[str, Any], res: SeriesResult, elapsed: float) -> OutputRecord:
    result = {"value": res.value, "terms_used": res.terms_used, "converged": res.converged}
    return OutputRecord(command, params, result, res.tail_bound, elapsed)


def cmd_dist(args, cfg: EvalConfig):
    params = {"alpha": args.alpha, "beta": args.beta, "gamma": args.gamma, "t": args.t}
    command = f"dist {args.action}"
    records: List[OutputRecord] = []
    with _timer() as clock:
        d = dist.MLDistribution.of(args.alpha, args.beta, args.gamma, args.t, cfg)
    setup = clock[0]

    if args.action in ("pmf", "cdf"):
        fn = dist.pmf if args.action == "pmf" else dist.cdf
        if args.k is not None:
            ks = [args.k]
        else:
            ks = range((args.kmax if args.kmax is not None else d.cutoff()) + 1)
        for k in ks:
            with _timer() as clock:
                value = fn(d, k)
            records.append(OutputRecord(command, dict(params, k=k), {"value": value}, None, clock[0] + setup))
        return records, EXIT_OK

    if args.action == "sample":
        with _timer() as clock:
            draws = dist.sample(d, args.n, args.seed)
        run = dict(params, n=args.n, seed=args.seed)
        if args.raw:
            records = [OutputRecord(command, run, {"index": i, "value": int(v)}) for i, v in enumerate(draws)]
        else:
            summary = {
                "mean": float(draws.mean()) if args.n else math.nan,
                "variance": float(draws.var()) if args.n else math.nan,
                "min": int(draws.min()) if args.n else 0,
                "max": int(draws.max()) if args.n else 0,
            }
            records = [OutputRecord(command, run, summary, None, clock[0] + setup)]
        return records, EXIT_OK

    with _timer() as clock:
        if args.action == "moment":
            m = dist.brute_raw(d, args.s) if args.method == "brute" else dist.moment_raw(d, args.s)
        elif args.action == "factorial":
            m = dist.brute_factorial(d, args.s) if args.method == "brute" else dist.moment_factorial(d, args.s)
        else:
            if not args.s > 0:
                raise DomainError(f"fractional moment order must be positive, got {args.s!r}")
            m = dist.brute_raw(d, args.s) if args.method == "brute" else dist.moment_fractional(d, args.s)
    result = {"order": float(m.order), "value": m.value, "method": m.method.value}
    return [OutputRecord(command, dict(params, s=args.s), result, m.est_error, clock[0] + setup)], EXIT_OK


def _grid_from_args(args) -> cert.GridSpec:
    ranges = []
    for axis in ("alpha", "beta", "gamma", "t"):
        single = getattr(args, axis)
        if single is not None:
            ranges.append((single, single, 1))
        else:
            ranges.append((getattr(args, f"{axis}_min"), getattr(args, f"{axis}_max"), getattr(args, f"{axis}_steps")))
    return cert.GridSpec(*ranges)


def cmd_certify(args, cfg: EvalConfig):
    unknown = [c for c in args.claims if c not in cert.CLAIMS]
    if unknown:
        raise UsageError(f"unknown claim(s): {', '.join(unknown)}; valid claims: {', '.join(cert.CLAIMS)}")
    grid = _grid_from_args(args)
    reports = cert.run_certification(grid, args.claims or None, args.tol, cfg, workers=args.threads)
    params = {"grid": {"alpha": grid.alpha_range, "beta": grid.beta_range, "gamma": grid.gamma_range, "t": grid.t_range}}
    records = []
    for report in reports:
        rec = report.to_record()
        del rec["tolerance"]
        records.append(OutputRecord(f"certify {report.name}", params, rec, report.tolerance, report.elapsed))
    failed = any(r.verdict == "FAIL" for r in reports)
    return records, EXIT_CERT_FAIL if failed else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        handler = {"eval": cmd_eval, "dist": cmd_dist, "certify": cmd_certify}[args.command]
        records, code = handler(args, cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    text = render(records, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_NONCONVERGENCE:
        print("non-convergence: series hit max_terms before reaching rel_tol", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
