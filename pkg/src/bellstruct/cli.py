"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from bellstruct import __version__
from bellstruct.coefficients import SPACES, BellCoefficients, SLKParams, build_named
from bellstruct.errors import BellStructError, InputError, InvariantViolation
from bellstruct.localrealism import lr_bound
from bellstruct.polytope import tightness
from bellstruct.quantum import (
    bell_operator,
    expectation,
    gamma_scan,
    maximally_entangled,
    noise_threshold,
    optimize_phases,
    quantum_max,
    scan_to_csv,
    standard_settings,
    verify_slk_appendix,
)

SIG_DIGITS = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def round_floats(obj: Any) -> Any:
    """Recursively round floats to 12 significant digits for stable output."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise InvariantViolation(f"non-finite value {x} in output")
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dumps(doc: Any, *, rounded: bool = True) -> str:
    return json.dumps(round_floats(doc) if rounded else doc, indent=2) + "\n"


def _write(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    try:
        Path(output).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {output}: {exc}") from exc


def _read_json(path: str) -> tuple[Any, bytes]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(raw), raw
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _add_family_args(p: argparse.ArgumentParser, *, with_input: bool = True) -> None:
    if with_input:
        p.add_argument("--input", "-i", help="coefficient-table JSON file (instead of --family)")
    p.add_argument("--family", choices=("chsh", "cglmp", "slk"))
    p.add_argument("--d", type=int)
    p.add_argument("--delta", type=float, help="SLK variant factor (default 0.25)")
    p.add_argument("--eta1", type=float, help="SLK eta1, +0.5 or -0.5 (default -0.5)")
    p.add_argument("--eta2", type=float, help="SLK eta2, +0.5 or -0.5 (default 0.5)")


def _descriptor(args: argparse.Namespace) -> dict[str, Any]:
    family = args.family
    if family == "chsh":
        return {"family": "chsh", "params": {}}
    if family == "cglmp":
        return {"family": "cglmp", "params": {"d": args.d}}
    p = SLKParams(
        **{k: getattr(args, k) for k in ("delta", "eta1", "eta2") if getattr(args, k) is not None}
    )
    return {
        "family": "slk",
        "params": {
            "d": args.d,
            "delta": p.delta,
            "delta_normalized": p.normalized_delta,
            "eta1": p.eta1,
            "eta2": p.eta2,
        },
    }


def _load(args: argparse.Namespace) -> tuple[BellCoefficients, dict[str, Any]]:
    """Coefficients and an inequality descriptor from --input or --family."""
    if getattr(args, "input", None):
        if args.family:
            raise InputError("give either --input or --family, not both")
        doc, raw = _read_json(args.input)
        c = BellCoefficients.from_json(doc)
        return c, {"family": "custom", "sha256": hashlib.sha256(raw).hexdigest()}
    if not args.family:
        raise InputError("an inequality is required: --family NAME or --input FILE")
    c = build_named(args.family, d=args.d, delta=args.delta, eta1=args.eta1, eta2=args.eta2)
    return c, _descriptor(args)


def _gamma_grid(args: argparse.Namespace) -> np.ndarray:
    if args.steps < 2:
        raise InputError("--steps must be at least 2")
    if args.gamma_min < 0 or args.gamma_max <= args.gamma_min:
        raise InputError("need 0 <= --gamma-min < --gamma-max")
    return np.linspace(args.gamma_min, args.gamma_max, args.steps)


def cmd_build(args: argparse.Namespace) -> int:
    if not args.family:
        raise InputError("--family is required")
    c = build_named(args.family, d=args.d, delta=args.delta, eta1=args.eta1, eta2=args.eta2)
    _write(dumps(c.to_json(args.space), rounded=False), args.output)
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    doc, _ = _read_json(args.input)
    c = BellCoefficients.from_json(doc)
    target = args.to or ("correlation" if doc["space"] == "probability" else "probability")
    _write(dumps(c.to_json(target), rounded=False), args.output)
    return 0


def cmd_lr_bound(args: argparse.Namespace) -> int:
    c, _ = _load(args)
    _write(dumps(lr_bound(c).to_json()), args.output)
    return 0


def _settings(c: BellCoefficients, args: argparse.Namespace):
    """Settings for the maximally entangled state, and the Bell-operator maximum."""
    if not args.optimize_phases:
        m = standard_settings(c.d)
        return m, m, quantum_max(bell_operator(c, m))[0]
    psi_opt = optimize_phases(c, maximally_entangled(c.d), seed=args.seed)
    eig_opt = optimize_phases(c, "eigen", seed=args.seed, initial=psi_opt.settings)
    return psi_opt.settings, eig_opt.settings, eig_opt.value


def cmd_qmax(args: argparse.Namespace) -> int:
    c, _ = _load(args)
    _, m, value = _settings(c, args)
    doc = {
        "d": c.d,
        "settings_mode": "optimized" if args.optimize_phases else "standard",
        "quantum_max": value,
        "settings": m.to_json(),
    }
    _write(dumps(doc), args.output)
    return 0


def cmd_scan(args: argparse.Namespace) -> int:
    c, _ = _load(args)
    m, _, _ = _settings(c, args)
    _write(scan_to_csv(gamma_scan(c, m, _gamma_grid(args))), args.output)
    return 0


def cmd_tightness(args: argparse.Namespace) -> int:
    c, _ = _load(args)
    _write(dumps(tightness(c).to_json()), args.output)
    return 0


def build_report(c: BellCoefficients, descriptor: dict[str, Any], args: argparse.Namespace) -> dict[str, Any]:
    bound = lr_bound(c).bound
    m_psi, _, qmax = _settings(c, args)
    gamma_star = None
    if args.scan:
        rows = gamma_scan(c, m_psi, _gamma_grid(args))
        gamma_star = max(rows, key=lambda r: r[1])[0]
        if args.csv:
            _write(scan_to_csv(rows), args.csv)
    p_min = noise_threshold(c, m_psi, tol=args.tol) if qmax > bound + args.tol else None
    report: dict[str, Any] = {
        "inequality": descriptor,
        "d": c.d,
        "lr_bound": bound,
        "quantum_max": qmax,
        "settings_mode": "optimized" if args.optimize_phases else "standard",
        "expectation_max_entangled": expectation(bell_operator(c, m_psi), maximally_entangled(c.d)),
    }
    if gamma_star is not None:
        report["gamma_star"] = gamma_star
    if p_min is not None:
        report["p_min"] = p_min
    report["tightness"] = tightness(c).to_json()
    report["version"] = __version__
    report["seed"] = args.seed
    return report


def cmd_report(args: argparse.Namespace) -> int:
    c, descriptor = _load(args)
    _write(dumps(build_report(c, descriptor, args)), args.output)
    return 0


def cmd_verify_slk(args: argparse.Namespace) -> int:
    if args.d is None:
        raise InputError("--d is required")
    params = SLKParams(
        **{k: getattr(args, k) for k in ("delta", "eta1", "eta2") if getattr(args, k) is not None}
    )
    try:
        report = verify_slk_appendix(args.d, params, args.trials, args.seed)
    except InvariantViolation as exc:
        failed = getattr(exc, "report", None)
        if failed is not None:
            _write(dumps(failed.to_json()), args.output)
        raise
    _write(dumps(report.to_json()), args.output)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellstruct", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="write a named family's coefficient table")
    _add_family_args(p, with_input=False)
    p.add_argument("--space", choices=SPACES, default="probability")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("transform", help="convert a coefficient table to the other space")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--to", choices=SPACES, help="target space (default: the other one)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("lr-bound", help="local-realistic bound by strategy enumeration")
    _add_family_args(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_lr_bound)

    for name, func, text in (
        ("qmax", cmd_qmax, "largest Bell-operator eigenvalue"),
        ("scan", cmd_scan, "expectation along the gamma state family (CSV)"),
        ("report", cmd_report, "full analysis report (JSON)"),
    ):
        p = sub.add_parser(name, help=text)
        _add_family_args(p)
        p.add_argument("--optimize-phases", action="store_true")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", "-o")
        if name in ("scan", "report"):
            p.add_argument("--gamma-min", type=float, default=0.0)
            p.add_argument("--gamma-max", type=float, default=1.5)
            p.add_argument("--steps", type=int, default=1501)
        if name == "report":
            p.add_argument("--scan", action="store_true", help="run the gamma scan and report its argmax")
            p.add_argument("--csv", help="also write the scan CSV here")
            p.add_argument("--tol", type=float, default=1e-9)
        p.set_defaults(func=func)

    p = sub.add_parser("tightness", help="rank test on bound-attaining generators")
    _add_family_args(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_tightness)

    p = sub.add_parser("verify-slk", help="sample random settings against the SLK bound d - 1")
    p.add_argument("--d", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--eta1", type=float)
    p.add_argument("--eta2", type=float)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_verify_slk)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"bellstruct: invariant failure: {exc}", file=sys.stderr)
        return 2
    except (BellStructError, ValueError) as exc:
        print(f"bellstruct: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
