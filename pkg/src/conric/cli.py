"""Batch command line front door.

Subcommands: solve | check | bounds | trace.  Inputs are matrix files in
either a JSON document ({"n": ..., "re": [[...]], "im": [[...]], optional
"q_re"/"q_im"}) or a plain text form (a line with n, then n lines of n
"re,im" pairs).  Reports go to stdout (or --out) as JSON or key/value text;
every float serializes round-trippably.  Exit codes are part of the
contract: 0 success, 1 input error, 2 no-solution-evidence, 3 max-iterations.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from .bounds import DEFAULT_DEPTH, LadderBreakdown, build_ladder, sandwich_report
from .conditions import check_existence
from .kernel import (
    ConricError,
    TOLERANCE_PROFILES,
    Tolerances,
    cmatrix,
)
from .solver import (
    MaxIterationsExceeded,
    NoSolutionEvidence,
    ProblemInstance,
    SingularCoefficient,
    solve_maximal,
    solve_minimal,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_SOLUTION = 2
EXIT_MAX_ITER = 3

TOL_PROFILE_ENV = "CONRIC_TOL_PROFILE"


class InputError(Exception):
    pass


def _parse_text_matrix(text: str) -> dict:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty matrix file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise InputError(f"first line must be the dimension, got {lines[0]!r}") from exc
    if n < 1 or len(lines) < 1 + n:
        raise InputError(f"expected {n} rows of entries after the dimension line")
    re_rows, im_rows = [], []
    for row_text in lines[1 : 1 + n]:
        pairs = row_text.split()
        if len(pairs) != n:
            raise InputError(f"expected {n} entries per row, got {len(pairs)}")
        re_row, im_row = [], []
        for pair in pairs:
            parts = pair.split(",")
            if len(parts) != 2:
                raise InputError(f"entries must be 're,im' pairs, got {pair!r}")
            re_row.append(float(parts[0]))
            im_row.append(float(parts[1]))
        re_rows.append(re_row)
        im_rows.append(im_row)
    return {"n": n, "re": re_rows, "im": im_rows}


def _load_matrix_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from exc
    else:
        doc = _parse_text_matrix(text)
    for key in ("n", "re", "im"):
        if key not in doc:
            raise InputError(f"{path}: missing field {key!r}")
    return doc


def _matrix_from_fields(doc: dict, re_key: str, im_key: str, n: int) -> np.ndarray:
    re_part = np.asarray(doc[re_key], dtype=float)
    im_part = np.asarray(doc[im_key], dtype=float)
    if re_part.shape != (n, n) or im_part.shape != (n, n):
        raise InputError(
            f"fields {re_key}/{im_key} must be {n}x{n} arrays, "
            f"got {re_part.shape} and {im_part.shape}"
        )
    try:
        return cmatrix(re_part + 1j * im_part)
    except (ValueError, ConricError) as exc:
        raise InputError(str(exc)) from exc


def _load_instance(args, tol: Tolerances) -> ProblemInstance:
    doc = _load_matrix_file(args.input)
    n = int(doc["n"])
    a = _matrix_from_fields(doc, "re", "im", n)
    q = None
    if args.q is not None:
        q_doc = _load_matrix_file(args.q)
        if int(q_doc["n"]) != n:
            raise InputError(f"q dimension {q_doc['n']} does not match a dimension {n}")
        q = _matrix_from_fields(q_doc, "re", "im", n)
    elif "q_re" in doc or "q_im" in doc:
        if "q_re" not in doc or "q_im" not in doc:
            raise InputError("q_re and q_im must both be present")
        q = _matrix_from_fields(doc, "q_re", "q_im", n)
    if q is not None:
        drift = np.linalg.norm(q - q.conj().T)
        if drift > 1e-10 * max(1.0, np.linalg.norm(q)):
            raise InputError(f"q is not Hermitian (drift {drift:.3e})")
    try:
        return ProblemInstance(a, q, tol)
    except (ValueError, ConricError) as exc:
        raise InputError(str(exc)) from exc


def _build_tolerances(args) -> Tolerances:
    profile = os.environ.get(TOL_PROFILE_ENV, "default")
    if profile not in TOLERANCE_PROFILES:
        raise InputError(
            f"unknown {TOL_PROFILE_ENV} value {profile!r}; "
            f"expected one of {sorted(TOLERANCE_PROFILES)}"
        )
    tol = TOLERANCE_PROFILES[profile]
    overrides = {}
    if getattr(args, "tol", None) is not None:
        overrides["residual_tol"] = args.tol
    if getattr(args, "max_iter", None) is not None:
        overrides["max_iter"] = args.max_iter
    if overrides:
        tol = dataclasses.replace(tol, **overrides)
    return tol


def _mat_json(m: np.ndarray) -> dict:
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _existence_json(report) -> dict:
    return {
        "necessary": [
            {"name": c.name, "holds": c.holds, "margin": c.margin} for c in report.necessary
        ],
        "sufficient_norm_half": {
            "name": report.sufficient_norm_half.name,
            "holds": report.sufficient_norm_half.holds,
            "margin": report.sufficient_norm_half.margin,
        },
        "exact_invertible": None
        if report.exact_invertible is None
        else {
            "name": report.exact_invertible.name,
            "holds": report.exact_invertible.holds,
            "margin": report.exact_invertible.margin,
        },
        "verdict": report.verdict,
    }


def _base_report(args, tol: Tolerances) -> dict:
    report = {
        "command": " ".join(args.echo),
        "tolerances": dataclasses.asdict(tol),
    }
    if not args.no_meta:
        report["meta"] = {"generated_at": datetime.now(timezone.utc).isoformat()}
    return report


def _emit(report: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    else:
        lines: list[str] = []

        def walk(prefix: str, value) -> None:
            if isinstance(value, dict):
                for key, item in value.items():
                    walk(f"{prefix}.{key}" if prefix else key, item)
            elif isinstance(value, list):
                lines.append(f"{prefix} = {json.dumps(value)}")
            else:
                lines.append(f"{prefix} = {value!r}" if isinstance(value, str) else f"{prefix} = {value}")

        walk("", report)
        text = "\n".join(lines) + "\n"
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _effective_unit_coefficient(instance: ProblemInstance) -> np.ndarray:
    if _is_identity(instance.q):
        return instance.a
    from .solver import normalize_q

    return normalize_q(instance).a_q


def cmd_solve(args) -> int:
    tol = _build_tolerances(args)
    instance = _load_instance(args, tol)
    report = _base_report(args, tol)
    existence = check_existence(_effective_unit_coefficient(instance), tol)
    report["existence"] = _existence_json(existence)
    if existence.verdict == "not_exists":
        failed = [c.name for c in existence.necessary_failures()]
        if not failed and existence.exact_invertible is not None:
            failed = [existence.exact_invertible.name]
        report["exit_classification"] = "no-solution-evidence"
        report["failed_conditions"] = failed
        _emit(report, args)
        return EXIT_NO_SOLUTION

    try:
        outcome = solve_maximal(instance)
    except NoSolutionEvidence as exc:
        report["exit_classification"] = "no-solution-evidence"
        report["error"] = str(exc)
        _emit(report, args)
        return EXIT_NO_SOLUTION
    except MaxIterationsExceeded as exc:
        report["exit_classification"] = "max-iterations"
        report["error"] = str(exc)
        _emit(report, args)
        return EXIT_MAX_ITER

    payload = {
        "x_plus": _mat_json(outcome.solution),
        "residual": outcome.residual,
        "iterations": outcome.iterations,
        "rate_certificate": outcome.rate_certificate,
        "linear_rate_guaranteed": outcome.linear_rate_guaranteed,
    }
    if args.minimal:
        try:
            minimal = solve_minimal(instance)
            payload["x_minus"] = _mat_json(minimal.solution)
            payload["x_minus_residual"] = minimal.residual
        except SingularCoefficient as exc:
            payload["x_minus"] = None
            payload["x_minus_note"] = str(exc)
    report["outcome"] = payload
    report["trace"] = [[k + 1, v] for k, v in enumerate(outcome.trace)]
    report["exit_classification"] = "success"
    _emit(report, args)
    return EXIT_OK


def _is_identity(q: np.ndarray) -> bool:
    return bool(np.array_equal(q, np.eye(q.shape[0], dtype=np.complex128)))


def cmd_check(args) -> int:
    tol = _build_tolerances(args)
    instance = _load_instance(args, tol)
    report = _base_report(args, tol)
    report["existence"] = _existence_json(check_existence(_effective_unit_coefficient(instance), tol))
    report["exit_classification"] = "success"
    _emit(report, args)
    return EXIT_OK


def cmd_bounds(args) -> int:
    tol = _build_tolerances(args)
    instance = _load_instance(args, tol)
    report = _base_report(args, tol)
    try:
        lower = build_ladder(instance.a, "lower", args.depth, tol)
    except LadderBreakdown as exc:
        report["exit_classification"] = "no-solution-evidence"
        report["error"] = str(exc)
        _emit(report, args)
        return EXIT_NO_SOLUTION
    ladders = {
        "lower": {
            "depth": lower.depth,
            "matrices": [_mat_json(m) for m in lower.matrices],
            "monotone_gaps": lower.monotone_gaps,
            "truncated_at": lower.truncated_at,
        }
    }
    try:
        upper = build_ladder(instance.a, "upper", args.depth, tol)
        ladders["upper"] = {
            "depth": upper.depth,
            "matrices": [_mat_json(m) for m in upper.matrices],
            "monotone_gaps": upper.monotone_gaps,
            "truncated_at": upper.truncated_at,
        }
    except (SingularCoefficient, LadderBreakdown) as exc:
        ladders["upper"] = None
        ladders["upper_note"] = str(exc)
    report["ladders"] = ladders
    try:
        sandwich = sandwich_report(instance.a, args.depth, tol)
        report["sandwich"] = {
            "lower_gap": sandwich.lower_gap,
            "upper_gap": sandwich.upper_gap,
            "lower_trend": sandwich.lower_trend,
            "consistent": sandwich.consistent,
        }
    except ConricError as exc:
        report["sandwich"] = None
        report["sandwich_note"] = str(exc)
    report["exit_classification"] = "success"
    _emit(report, args)
    return EXIT_OK


def cmd_trace(args) -> int:
    tol = _build_tolerances(args)
    instance = _load_instance(args, tol)
    try:
        outcome = solve_maximal(instance)
        trace = outcome.trace
        code = EXIT_OK
    except NoSolutionEvidence as exc:
        trace = exc.trace
        code = EXIT_NO_SOLUTION
        print(f"error: {exc}", file=sys.stderr)
    except MaxIterationsExceeded as exc:
        trace = exc.trace
        code = EXIT_MAX_ITER
        print(f"error: {exc}", file=sys.stderr)
    lines = "\n".join(f"{k + 1} {v!r}" for k, v in enumerate(trace))
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(lines + "\n")
    else:
        sys.stdout.write(lines + "\n")
    return code


def _make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="matrix file (JSON or plain text)")
    common.add_argument("--q", default=None, help="separate matrix file for Q")
    common.add_argument("--tol", type=float, default=None, help="residual tolerance")
    common.add_argument("--max-iter", type=int, default=None, dest="max_iter")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--no-meta", action="store_true", dest="no_meta")

    parser = argparse.ArgumentParser(
        prog="conric",
        description="Positive definite solutions of X + A* conj(X)^-1 A = Q",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_solve = sub.add_parser("solve", parents=[common], help="compute the maximal solution")
    p_solve.add_argument("--minimal", action="store_true", help="also compute the minimal solution")
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", parents=[common], help="existence certification")
    p_check.set_defaults(func=cmd_check)

    p_bounds = sub.add_parser("bounds", parents=[common], help="solution bound ladders")
    p_bounds.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p_bounds.set_defaults(func=cmd_bounds)

    p_trace = sub.add_parser("trace", parents=[common], help="convergence trace as 'k value' lines")
    p_trace.set_defaults(func=cmd_trace)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _make_parser()
    args = parser.parse_args(argv)
    args.echo = argv
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ConricError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
