"""Command line: ``milnor {invariants,nu,present,color,fuzz,bench}``.

Exit codes: 0 success, 1 bad input, 2 an invariance check found a violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from milnor.arrows import ArrowError, parse_arrows, surgery
from milnor.cut import CutDiagram, CutDiagramError, nu_table, parse_cut
from milnor.engine import (
    GuardExceeded,
    chen_series,
    guard_limit,
    longitude_series,
    longitude_words,
    mu_table,
    nilpotent_presentation,
    word_length_estimate,
)
from milnor.fuzz import CHECKS, run_check
from milnor.gauss import BasedDiagram, GaussCodeError, parse_gauss_code

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: list
    input_digest: str | None = None
    seed: int | None = None
    engine: str | None = None
    wall_time: float = 0.0
    result: object = None
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "input_digest": self.input_digest,
            "seed": self.seed,
            "engine": self.engine,
            "wall_time": round(self.wall_time, 6),
            "result": self.result,
            "violations": self.violations,
        }


def _read(path: str) -> tuple[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    return text, "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def load_input(path: str) -> tuple[BasedDiagram | CutDiagram, str]:
    """Parse by suffix; ``.arrows`` files go through surgery."""
    text, digest = _read(path)
    suffix = Path(path).suffix.lower()
    try:
        if suffix == ".gauss":
            return parse_gauss_code(text), digest
        if suffix == ".arrows":
            return surgery(parse_arrows(text)), digest
        if suffix == ".cutd":
            return parse_cut(text), digest
    except (GaussCodeError, ArrowError, CutDiagramError) as exc:
        raise InputError(f"{path}: {exc}") from None
    raise InputError(f"{path}: unknown input type {suffix or '(none)'}; expected .gauss, .arrows or .cutd")


def load_diagram(path: str) -> tuple[BasedDiagram, str]:
    d, digest = load_input(path)
    if not isinstance(d, BasedDiagram):
        raise InputError(f"{path}: this command needs a .gauss or .arrows input")
    return d, digest


def _emit(args, report: RunReport, tsv: str) -> None:
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        sys.stdout.write(tsv if tsv.endswith("\n") or not tsv else tsv + "\n")


def _max_len(args) -> int:
    if args.max_len < 2:
        raise InputError("--max-len must be at least 2")
    return args.max_len


def cmd_invariants(args) -> int:
    d, digest = load_input(args.input)
    if isinstance(d, CutDiagram):
        return _nu_report(args, d, digest)
    start = time.perf_counter()
    rows = mu_table(d, _max_len(args))
    report = RunReport(args.argv, digest, engine="series", wall_time=time.perf_counter() - start)
    report.result = [r.to_json() for r in rows]
    _emit(args, report, "\n".join(["I\tmu\tDelta\tmubar"] + [r.tsv() for r in rows]))
    return EXIT_OK


def _nu_report(args, c: CutDiagram, digest: str) -> int:
    start = time.perf_counter()
    rows = nu_table(c, _max_len(args))
    report = RunReport(args.argv, digest, engine="series", wall_time=time.perf_counter() - start)
    report.result = [r.to_json() for r in rows]
    _emit(args, report, "\n".join(["I\tm\tDelta\tnu"] + [r.tsv() for r in rows]))
    return EXIT_OK


def cmd_nu(args) -> int:
    c, digest = load_input(args.input)
    if not isinstance(c, CutDiagram):
        raise InputError(f"{args.input}: nu needs a .cutd input")
    return _nu_report(args, c, digest)


def _order(args) -> int:
    if args.q < 1:
        raise InputError("--q must be positive")
    return args.q


def cmd_present(args) -> int:
    d, digest = load_diagram(args.input)
    q = _order(args)
    start = time.perf_counter()
    try:
        text = nilpotent_presentation(d, q)
    except GuardExceeded as exc:
        raise InputError(str(exc)) from None
    report = RunReport(args.argv, digest, engine="word", wall_time=time.perf_counter() - start, result=text)
    _emit(args, report, text)
    return EXIT_OK


def cmd_color(args) -> int:
    d, digest = load_diagram(args.input)
    q = _order(args)
    start = time.perf_counter()
    table = chen_series(d, q, q - 1 if args.exact_quotient else q)
    report = RunReport(args.argv, digest, engine="series", wall_time=time.perf_counter() - start)
    report.result = {f"{a[0] + 1}/{a[1]}": table[a].to_text(sep=" + ") for a in table.arcs()}
    _emit(args, report, table.to_text())
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if args.iters < 1:
        raise InputError("--iters must be positive")
    if args.k is not None and args.k < 1:
        raise InputError("--k must be positive")
    if args.k is not None and args.check in ("moves", "homotopy"):
        raise InputError(f"--k has no meaning for --check {args.check}")
    start = time.perf_counter()
    violations = run_check(args.check, args.iters, args.seed, args.k)
    report = RunReport(args.argv, None, seed=args.seed, engine="series", wall_time=time.perf_counter() - start)
    report.violations = [v.to_json() for v in violations]
    report.result = {"check": args.check, "iterations": args.iters, "violations": len(violations)}
    lines = [f"check\t{args.check}", f"iterations\t{args.iters}", f"seed\t{args.seed}", f"violations\t{len(violations)}"]
    lines += [json.dumps(v) for v in report.violations]
    _emit(args, report, "\n".join(lines))
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_bench(args) -> int:
    d, digest = load_diagram(args.input)
    q = _order(args)
    start = time.perf_counter()
    result: dict = {"q": q, "components": d.n, "crossings": d.num_crossings()}
    if args.engine == "word":
        result["guard"] = guard_limit()
        result["estimate"] = word_length_estimate(d, q)
        try:
            _, peak = longitude_words(d, q)
            result["outcome"] = "finished"
            result["peak_word_length"] = peak
        except GuardExceeded:
            result["outcome"] = "guard exceeded"
    else:
        lams = longitude_series(d, q, q - 1)
        result["outcome"] = "finished"
        result["monomials"] = sum(s.nnz() for s in lams)
        result["monomial_bound"] = d.n * sum(d.n**s for s in range(q))
    elapsed = time.perf_counter() - start
    result["seconds"] = round(elapsed, 6)
    report = RunReport(args.argv, digest, engine=args.engine, wall_time=elapsed, result=result)
    _emit(args, report, "\n".join(f"{k}\t{v}" for k, v in result.items()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="milnor", description="Milnor invariants of welded links and cut-diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("input", help="a .gauss, .arrows or .cutd file")
        sp.add_argument("--format", choices=("tsv", "json"), default="tsv")

    sp = sub.add_parser("invariants", help="mu, Delta and mu-bar for every sequence up to --max-len")
    common(sp)
    sp.add_argument("--max-len", type=int, default=3)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("nu", help="(m, Delta, nu) of a cut-diagram")
    common(sp)
    sp.add_argument("--max-len", type=int, default=3)
    sp.set_defaults(func=cmd_nu)

    sp = sub.add_parser("present", help="presentation of the q-th nilpotent quotient")
    common(sp)
    sp.add_argument("--q", type=int, default=3)
    sp.set_defaults(func=cmd_present)

    sp = sub.add_parser("color", help="Magnus series of eta_q on every arc")
    common(sp)
    sp.add_argument("--q", type=int, default=3)
    sp.add_argument(
        "--exact-quotient", action="store_true", help="truncate at degree q-1, where the series are exact on F/Gamma_q"
    )
    sp.set_defaults(func=cmd_color)

    sp = sub.add_parser("fuzz", help="seeded invariance campaign")
    common(sp, with_input=False)
    sp.add_argument("--check", choices=sorted(CHECKS), required=True)
    sp.add_argument("--iters", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--k", type=int, default=None, help="tree degree for wk/selfwk (random when omitted)")
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("bench", help="time the word or series engine on the longitudes")
    common(sp)
    sp.add_argument("--engine", choices=("word", "series"), required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; usage errors are input errors here
        return EXIT_INPUT if exc.code else EXIT_OK
    args.argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"milnor: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"milnor: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
