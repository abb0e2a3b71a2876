"""Command-line front end.

Every command builds a run report ``{command, inputs, outputs, diagnostics,
exit_code}`` and writes it as JSON (``table1`` defaults to CSV). Exit codes:

    0  success
    1  other library error
    2  unreadable input or shape mismatch
    3  index too large for the core inverse
    4  factorization failure
    5  stability or confinement premise not met (semistable)
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import errors
from .continuity import rank_criterion, sequence_from_config
from .geninv import core_ep_inverse, core_inverse, drazin_inverse, moore_penrose
from .linalg import spectral_norm
from .matio import dumps, format_float, load_matrix, matrix_to_obj
from .perturbation import perturbation_report
from .semistable import QuadratureConfig, classify_stability, integral_core_ep_perturbed
from .table import comparison_table

__all__ = ["RunReport", "build_parser", "run", "main"]

INVERSES: dict[str, Callable] = {
    "pinv": moore_penrose,
    "drazin": drazin_inverse,
    "core": core_inverse,
    "coreep": core_ep_inverse,
}

# Checked in order; the first matching class decides the exit code.
EXIT_CODES: list[tuple[type, int]] = [
    (errors.ParseError, 2),
    (errors.ShapeMismatch, 2),
    (errors.IndexTooLarge, 3),
    (errors.FactorizationFailure, 4),
    (errors.NotSemistable, 5),
    (errors.NotStable, 5),
    (errors.Case1Violated, 5),
    (errors.PerturbedCoreUnstable, 5),
    (errors.CoreEPError, 1),
    (ValueError, 2),
]


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: Any = None
    diagnostics: list[str] = field(default_factory=list)
    exit_code: int = 0

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "diagnostics": list(self.diagnostics),
            "exit_code": self.exit_code,
        }


def _tol(args) -> Optional[float]:
    return args.cmd_tol if args.cmd_tol is not None else args.tol


def _tol_note(args, report: RunReport) -> None:
    if args.cmd_tol is not None and args.tol is not None:
        report.diagnostics.append(f"command --tol {args.cmd_tol!r} overrides global --tol {args.tol!r}")
    t = _tol(args)
    report.inputs["tol"] = "auto" if t is None else t


def _load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise errors.ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise errors.ParseError(f"{path}: invalid JSON: {exc}") from exc


def cmd_inverse(args, report: RunReport) -> None:
    a = load_matrix(args.input)
    report.inputs.update(kind=args.kind, input=args.input, A=matrix_to_obj(a))
    res = INVERSES[args.kind](a, _tol(args))
    report.outputs = res.to_dict()
    report.diagnostics.extend(res.notes)


def _pair(args, report: RunReport) -> tuple[np.ndarray, np.ndarray]:
    a, e = load_matrix(args.a_file), load_matrix(args.e_file)
    report.inputs.update(a_file=args.a_file, e_file=args.e_file,
                         A=matrix_to_obj(a), E=matrix_to_obj(e))
    if a.shape != e.shape or a.shape[0] != a.shape[1]:
        raise errors.ShapeMismatch(f"A is {a.shape}, E is {e.shape}; need equal square shapes")
    return a, e


def cmd_perturb(args, report: RunReport) -> None:
    a, e = _pair(args, report)
    out = perturbation_report(a, e, _tol(args))
    report.outputs = out
    for b in out["bounds"]:
        if b["applicable"]:
            report.diagnostics.extend(f"{b['name']}: {n}" for n in b["notes"])


def cmd_table1(args, report: RunReport) -> None:
    t = comparison_table()
    report.outputs = t.to_dict()
    report.diagnostics.append(
        "display values use four-decimal working precision; raw values are full precision"
    )
    report.diagnostics.append(
        "the comparison pair does not satisfy the projector condition; "
        "the (3.5) row evaluates the formula without that premise"
    )
    args._table = t


def cmd_continuity(args, report: RunReport) -> None:
    cfg = _load_json(args.config)
    seq = sequence_from_config(cfg)
    report.inputs.update(config=args.config, name=seq.name, j_values=list(seq.j_values))
    v = rank_criterion(seq, _tol(args))
    out = v.to_dict()
    out["consistent"] = v.consistent
    report.outputs = out
    if not v.consistent:
        report.diagnostics.append("rank prediction disagrees with the observed distances")


def cmd_semistable(args, report: RunReport) -> None:
    a, e = _pair(args, report)
    qcfg = QuadratureConfig.from_obj(_load_json(args.quad)) if args.quad else QuadratureConfig()
    report.inputs["quadrature"] = qcfg.to_dict()
    tol = _tol(args)
    verdict = classify_stability(a, tol)
    report.outputs = {"stability": verdict.to_dict()}
    q = integral_core_ep_perturbed(a, e, qcfg, tol)
    ref = core_ep_inverse(a + e, tol).X
    report.outputs.update(
        integral=q.to_dict(),
        core_ep_inverse=matrix_to_obj(ref),
        distance=spectral_norm(q.value - ref),
    )


COMMANDS = {
    "inverse": cmd_inverse,
    "perturb": cmd_perturb,
    "table1": cmd_table1,
    "continuity": cmd_continuity,
    "semistable": cmd_semistable,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coreep", description="Core-EP and related generalized inverses.")
    p.add_argument("--tol", type=float, default=None, help="tolerance override (default: auto)")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--tol", dest="cmd_tol", type=float, default=None,
                        help="tolerance for this command; wins over the global flag")
        return sp

    sp = add("inverse", "compute a generalized inverse")
    sp.add_argument("kind", choices=tuple(INVERSES))
    sp.add_argument("input")
    sp = add("perturb", "condition flags, bounds and exact error for A + E")
    sp.add_argument("a_file")
    sp.add_argument("e_file")
    add("table1", "bound comparison table")
    sp = add("continuity", "rank criterion on a matrix sequence")
    sp.add_argument("config")
    sp = add("semistable", "integral representation of (A+E)^c")
    sp.add_argument("a_file")
    sp.add_argument("e_file")
    sp.add_argument("--quad", default=None, help="quadrature config JSON")
    return p


def _exit_code(exc: BaseException) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    raise exc


def _render(args, report: RunReport) -> str:
    fmt = args.format or ("csv" if args.command == "table1" else "json")
    if fmt == "json":
        return dumps(report.to_dict()) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.command == "table1" and report.exit_code == 0:
        w.writerows(args._table.csv_rows())
    elif args.command == "inverse" and report.exit_code == 0:
        x = report.outputs["X"]
        vals = [complex(re, im) for re, im in x["data"]]
        w.writerow([f"c{j}" for j in range(x["cols"])])
        for i in range(x["rows"]):
            row = vals[i * x["cols"]:(i + 1) * x["cols"]]
            w.writerow([f"{format_float(z.real)}{'+' if z.imag >= 0 else '-'}{format_float(abs(z.imag))}j"
                        for z in row])
    else:
        w.writerow(["key", "value"])
        w.writerow(["command", report.command])
        w.writerow(["exit_code", report.exit_code])
        for d in report.diagnostics:
            w.writerow(["diagnostic", d])
    return buf.getvalue()


def run(argv: Optional[list[str]] = None) -> tuple[RunReport, str]:
    """Parse ``argv``, execute, and return the report with its rendering."""
    args = build_parser().parse_args(argv)
    report = RunReport(args.command)
    _tol_note(args, report)
    try:
        COMMANDS[args.command](args, report)
    except (errors.CoreEPError, ValueError) as exc:
        report.exit_code = _exit_code(exc)
        report.diagnostics.append(f"{type(exc).__name__}: {exc}")
    return report, _render(args, report)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    report, text = run(argv)
    if report.exit_code:
        print(report.diagnostics[-1], file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
