"""Command-line front end.

Every subcommand writes one JSON object per result line to stdout.  Exit
codes: 0 when every gate passes, 1 when a numeric gate fails, 2 on usage
errors (bad flags, unreadable or malformed parameter files).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import battery
from .closed_form import domain_check
from .errors import ComplexSelbergError, ParameterShapeError
from .exponents import parse_exponent
from .gamma_field import Classification, gamma_field
from .identities import (
    ALIASES,
    IDENTITIES,
    IdentitySpec,
    canonical_name,
    evaluate_rhs,
    load_spec,
    params_from_dict,
)
from .mc_engine import SamplerSpec, verify

EXIT_OK = 0
EXIT_GATE = 1
EXIT_USAGE = 2

IDENTITY_CHOICES = sorted(set(IDENTITIES) | set(ALIASES))


class UsageError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, out_path: Path | None = None, append: bool = True) -> None:
    line = _dumps(obj)
    print(line, flush=True)
    if out_path is not None:
        with out_path.open("a" if append else "w", encoding="utf-8") as fh:
            fh.write(line + "\n")


def _read_json_arg(value: str) -> dict:
    """A JSON object given inline or as a path to a file."""
    path = Path(value)
    try:
        if path.exists():
            data = json.loads(path.read_text(encoding="utf-8"))
        else:
            data = json.loads(value)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{value!r} is neither a readable JSON file nor inline JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"expected a JSON object in {value!r}")
    return data


def _spec_from_args(args) -> IdentitySpec:
    if Path(args.params).exists():
        try:
            return load_spec(args.params, args.identity)
        except json.JSONDecodeError as exc:
            raise UsageError(f"cannot parse {args.params}: {exc}") from exc
    data = _read_json_arg(args.params)
    if "identity" in data and "params" in data:
        spec = IdentitySpec.from_dict(data)
        if args.identity and spec.identity != canonical_name(args.identity):
            raise UsageError(f"params describe {spec.identity!r}, not {args.identity!r}")
        return spec
    if not args.identity:
        raise UsageError("bare params need --identity")
    return IdentitySpec(args.identity, params_from_dict(args.identity, data))


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    drawn = int(np.random.SeedSequence().entropy % (2**63))
    print(_dumps({"seed": drawn, "source": "entropy"}), file=sys.stderr, flush=True)
    return drawn


# ---------------------------------------------------------------- commands


def cmd_gamma(args) -> int:
    value = gamma_field(parse_exponent(args.exponent))
    finite = value.classification is not Classification.POLE
    _emit(
        {
            "exponent": args.exponent,
            "value_re": value.value.real if finite else None,
            "value_im": value.value.imag if finite else None,
            "class": value.classification.value,
        }
    )
    return EXIT_OK


def cmd_rhs(args) -> int:
    spec = _spec_from_args(args)
    if args.emit_params:
        _emit(spec.to_dict())
        return EXIT_OK
    verdict = domain_check(spec)
    record = {"identity": spec.identity, "params": spec.to_dict()["params"], "domain_passed": verdict.passed}
    try:
        value = evaluate_rhs(spec)
        record["rhs"] = {"re": value.real, "im": value.imag}
    except ComplexSelbergError as exc:
        record["rhs"] = None
        record["error"] = f"{type(exc).__name__}: {exc}"
    record["domain"] = verdict.to_list()
    _emit(record)
    return EXIT_OK if record["rhs"] is not None else EXIT_GATE


def cmd_domain(args) -> int:
    spec = _spec_from_args(args)
    verdict = domain_check(spec)
    _emit({"identity": spec.identity, "passed": verdict.passed, "checks": verdict.to_list()})
    return EXIT_OK if verdict.passed else EXIT_GATE


def cmd_verify(args) -> int:
    spec = _spec_from_args(args)
    seed = _resolve_seed(args.seed)
    proposal = SamplerSpec.from_dict(_read_json_arg(args.sampler)) if args.sampler else None
    if args.samples % args.chunks:
        raise UsageError(f"--samples {args.samples} is not a multiple of --chunks {args.chunks}")
    report = verify(spec, args.samples, seed=seed, chunks=args.chunks, workers=args.workers, proposal=proposal)
    record = report.to_dict(include_timing=True)
    record["gate"] = args.gate
    record["passed"] = report.passed(args.gate)
    _emit(record, args.out)
    return EXIT_OK if record["passed"] else EXIT_GATE


def cmd_jacobian_check(args) -> int:
    seed = _resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    if args.which == "anderson":
        worst, count = battery.check_anderson_jacobian(rng, args.trials, sizes=(args.n,))
    else:
        worst, count = battery.check_dual_jacobian(rng, args.trials, sizes=(args.n,))
    passed = bool(np.isfinite(worst) and worst < args.threshold)
    _emit(
        {
            "which": args.which,
            "n": args.n,
            "trials": count,
            "seed": seed,
            "max_rel_error": worst,
            "threshold": args.threshold,
            "passed": passed,
        }
    )
    return EXIT_OK if passed else EXIT_GATE


def cmd_suite(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.out is not None:
        args.out.write_text("", encoding="utf-8")

    def report(result):
        _emit(result.to_dict(include_timing=False), args.out)

    results = battery.run_battery(args.level, seed, workers=args.workers, on_result=report)
    failed = [r.name for r in results if not r.passed]
    summary = {
        "summary": {
            "level": args.level,
            "seed": seed,
            "total": len(results),
            "passed": len(results) - len(failed),
            "failed": failed,
        }
    }
    _emit(summary, args.out)
    return EXIT_OK if not failed else EXIT_GATE


# ------------------------------------------------------------------ parser


def _positive_int(text: str) -> int:
    value = int(float(text))
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="complex-selberg",
        description="Complex-field Gamma calculus, Selberg-type closed forms and their Monte Carlo verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", help="evaluate the complex-field Gamma function")
    p.add_argument("--exponent", required=True, help='exponent as "a_re+a_im i|k"')
    p.set_defaults(func=cmd_gamma)

    def add_spec_args(p, identity_required=False):
        p.add_argument("--identity", choices=IDENTITY_CHOICES, required=identity_required)
        p.add_argument("--params", required=True, help="params JSON file or inline JSON")

    p = sub.add_parser("rhs", help="closed-form right-hand side and domain verdict")
    add_spec_args(p)
    p.add_argument("--emit-params", action="store_true", help="print the canonical spec JSON and exit")
    p.set_defaults(func=cmd_rhs)

    p = sub.add_parser("domain", help="convergence inequalities, one verdict each")
    add_spec_args(p)
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("verify", help="Monte Carlo check of one identity")
    add_spec_args(p)
    p.add_argument("--samples", type=_positive_int, default=1_000_000)
    p.add_argument("--chunks", type=_positive_int, default=8)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--sampler", default=None, help="product sampler spec JSON (w0, p0, w1, p1, winf, s)")
    p.add_argument("--gate", type=float, default=4.0, help="pass when |z| is below this")
    p.add_argument("--out", type=Path, default=None, help="append the report line to this file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("jacobian-check", help="closed-form vs finite-difference Jacobians")
    p.add_argument("--which", choices=["anderson", "dual"], required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--trials", type=_positive_int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.set_defaults(func=cmd_jacobian_check)

    p = sub.add_parser("suite", help="run the verification battery")
    p.add_argument("--level", choices=sorted(battery.LEVELS), default="smoke")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out", type=Path, default=None, help="write the report log here (overwritten)")
    p.set_defaults(func=cmd_suite)
    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and execute; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ParameterShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComplexSelbergError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
