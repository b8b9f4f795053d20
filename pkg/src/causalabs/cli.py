"""Command-line front end.

Exit status is 0 when a question was answered (an infinite error counts as
an answer), 1 for semantically invalid input and 2 for unreadable input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from .abstraction import Abstraction, abstraction_from_dict, save_abstraction, validate_abstraction
from .engine import SeverabilityError
from .learner import DEFAULT_MAX_CANDIDATES, default_candidate_space, learn
from .measures import DEFAULT_MAX_PAIRS, build_assessment_set, overall_error
from .queries import load_queries, repeat_query
from .scenarios import data_dir
from .scm import Scm, save_scm, scm_from_dict, validate_scm

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


class InputError(Exception):
    """A file could not be read or parsed."""


class DomainError(Exception):
    """Inputs were readable but semantically invalid."""


def fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.6f}"


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = data_dir() / path
    return bundled if bundled.exists() else p


def _read_json(path: str):
    p = _resolve(path)
    try:
        with open(p) as fh:
            return p, json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _load_scm(path: str) -> Scm:
    p, data = _read_json(path)
    try:
        return scm_from_dict(data, name=p.stem)
    except Exception as exc:  # malformed structure is a parse error
        raise InputError(f"{path}: {exc}") from exc


def _load_abs(path: str) -> Abstraction:
    _, data = _read_json(path)
    try:
        return abstraction_from_dict(data)
    except Exception as exc:
        raise InputError(f"{path}: {exc}") from exc


def _check_models(*models: Scm) -> None:
    problems = [f"{m.name}: {p}" for m in models for p in validate_scm(m)]
    if problems:
        raise DomainError("\n".join(problems))


def _assessment(args, high: Scm):
    pairs = None
    if args.assessment == "custom":
        if not args.pairs:
            raise DomainError("--assessment custom needs --pairs")
        _, data = _read_json(args.pairs)
        pairs = data["pairs"] if isinstance(data, dict) else data
    max_pairs = None if args.max_pairs <= 0 else args.max_pairs
    try:
        return build_assessment_set(args.assessment, high, pairs, max_pairs=max_pairs)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _set_label(names: Sequence[str]) -> str:
    return ";".join(names)


# -- subcommands -------------------------------------------------------------

def cmd_validate(args) -> int:
    paths = list(args.paths)
    paths += [p for p in (args.base, args.high, args.abs) if p]
    if not paths:
        raise DomainError("nothing to validate")
    problems: list[str] = []
    models: dict[str, Scm] = {}
    for path in paths:
        _, data = _read_json(path)
        if isinstance(data, dict) and "relevant" in data:
            _load_abs(path)
        else:
            scm = _load_scm(path)
            models[path] = scm
            problems += [f"{path}: {p}" for p in validate_scm(scm)]
    if args.abs and args.base and args.high:
        base, high = models[args.base], models[args.high]
        problems += [f"{args.abs}: {p}" for p in validate_abstraction(_load_abs(args.abs), base, high, require_complete=False)]
    for p in problems:
        print(p)
    return EXIT_DOMAIN if problems else EXIT_OK


def cmd_evaluate(args) -> int:
    base, high, abs_ = _load_scm(args.base), _load_scm(args.high), _load_abs(args.abs)
    _check_models(base, high)
    problems = validate_abstraction(abs_, base, high)
    if problems:
        raise DomainError("\n".join(problems))
    j = _assessment(args, high)
    report = overall_error(args.measure, base, high, abs_, j, args.agg)
    rows = [
        [args.measure, _set_label(x), _set_label(y), fmt(e), ""]
        for (x, y), e in report.breakdown
    ]
    rows.append(["overall", "", "", "", fmt(report.value)])
    _emit(_csv(["measure", "x_set", "y_set", "error", "overall"], rows), args.out)
    return EXIT_OK


def _word(matrix) -> str:
    return ".".join(str(int(i)) for i in matrix.argmax(axis=0))


def cmd_learn(args) -> int:
    base, high, partial = _load_scm(args.base), _load_scm(args.high), _load_abs(args.abs)
    _check_models(base, high)
    problems = validate_abstraction(partial, base, high, require_complete=False)
    if problems:
        raise DomainError("\n".join(problems))
    mechanisms = None
    if args.candidates:
        _, data = _read_json(args.candidates)
        mechanisms = data.get("mechanisms", {})
    space = default_candidate_space(base, high, partial, mechanisms)
    j = _assessment(args, high)
    cap = None if args.max_candidates <= 0 else args.max_candidates
    try:
        result = learn(base, high, partial, args.measure, j, args.agg, space, max_candidates=cap)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    if not result.found:
        print("variable map does not preserve causal order: no finite candidate", file=sys.stderr)
        _emit(_csv(["rank", "candidate", "error"], [["", "", "inf"]]), args.out)
        return EXIT_OK
    options = {("mechanism", v): space.mechanisms.get(v) for k, v in result.slots if k == "mechanism"}
    options.update({("alpha", v): space.alphas.get(v) for k, v in result.slots if k == "alpha"})
    header = ["rank", "candidate", "error"] + [f"{k}:{v}" for k, v in result.slots]
    rows = []
    for rank, cand in enumerate(result.ranking, start=1):
        cells = []
        for slot, c in zip(result.slots, cand.choice):
            cells.append(str(c) if slot[0] == "mechanism" else _word(options[slot][c].matrix))
        rows.append([rank, cand.index, fmt(cand.error)] + cells)
    _emit(_csv(header, rows), args.out)
    if args.best_out:
        save_abstraction(result.abstraction, args.best_out)
    if args.best_high_out:
        save_scm(result.high, args.best_high_out)
    return EXIT_OK


def cmd_sample(args) -> int:
    base = _load_scm(args.base)
    high = _load_scm(args.high) if args.high else None
    abs_ = _load_abs(args.abs) if args.abs else None
    _check_models(*(m for m in (base, high) if m is not None))
    _, data = _read_json(args.queries)
    try:
        queries = load_queries(data["queries"] if isinstance(data, dict) else data)
    except (ValueError, KeyError) as exc:
        raise InputError(f"{args.queries}: {exc}") from exc
    rows = []
    for q in queries:
        try:
            if q.kind.value != "base" and high is None:
                raise ValueError("query needs --high")
            if q.kind.value in ("pullback", "hybrid") and abs_ is None:
                raise ValueError("query needs --abs")
            mean, std, _ = repeat_query(q, base, high, abs_, args.n, args.reps, args.seed)
            rows.append([q.label, q.kind.value, fmt(mean), fmt(std), "ok"])
        except (SeverabilityError, ValueError, KeyError) as exc:
            rows.append([q.label, q.kind.value, "", "", f"error: {exc}"])
    _emit(_csv(["query", "kind", "mean", "std", "status"], rows), args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, models: bool = True) -> None:
    if models:
        p.add_argument("--base", required=True)
        p.add_argument("--high", required=True)
        p.add_argument("--abs", required=True)
    p.add_argument("--out")


def _assessment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--measure", choices=["ic", "iil", "isil", "isc"], default="ic")
    p.add_argument("--assessment", choices=["complete", "causal", "parental", "custom"], default="causal")
    p.add_argument("--pairs", help="JSON file with custom pairs")
    p.add_argument("--agg", choices=["sup", "mean"], default="sup")
    p.add_argument("--max-pairs", type=int, default=DEFAULT_MAX_PAIRS, help="0 disables the limit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causalabs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check model and abstraction files")
    p.add_argument("paths", nargs="*")
    p.add_argument("--base")
    p.add_argument("--high")
    p.add_argument("--abs")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("evaluate", help="per-pair and overall error of an abstraction")
    _common(p)
    _assessment_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("learn", help="search alphas and candidate mechanisms for least error")
    _common(p)
    _assessment_flags(p)
    p.add_argument("--candidates", help="JSON file with candidate high-level mechanisms")
    p.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES, help="0 disables the limit")
    p.add_argument("--best-out", help="write the best abstraction here")
    p.add_argument("--best-high-out", help="write the high model with the chosen mechanisms here")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("sample", help="Monte Carlo estimates for a list of queries")
    p.add_argument("--base", required=True)
    p.add_argument("--high")
    p.add_argument("--abs")
    p.add_argument("--queries", required=True)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
