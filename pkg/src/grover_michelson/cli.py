"""
Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numeric failure (resonance or
non-convergence). Data goes to stdout or ``--output``; diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from .checks import run_checks
from .errors import DimensionMismatchError, InvalidDataError, InvalidParameterError, ResonanceError
from .imperfections import calibrate, format_calibration, read_matrix_csv
from .metrics import (
    DeviceParams,
    InterferogramCurve,
    Model,
    SweepSpec,
    enhancement_report,
    evaluate,
    format_report,
    max_slope,
    read_curve_csv,
    sweep,
    visibility,
    write_curve_csv,
)
from .scatterers import BeamSplitterParams, CoinPhases, compose_network, generalized_coin

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.11e}{z.imag:+.11e}j"


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gmi", description="Grover coin and Grover-Michelson interferometer simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("--output", "-o", help="write data here instead of stdout")
        return p

    p = add("coin", "print a four-port coin matrix as complex CSV")
    p.add_argument("--theta1", type=float, default=0.0)
    p.add_argument("--theta2", type=float, default=0.0)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--compose", action="store_true", help="trace the two-splitter network instead")
    p.add_argument("--bs1-r", type=float, default=0.5, help="splitter 1 power reflectance")
    p.add_argument("--bs2-r", type=float, default=0.5, help="splitter 2 power reflectance")
    p.add_argument("--loss1", type=float, default=0.0)
    p.add_argument("--loss2", type=float, default=0.0)

    p = add("sweep", "interferogram R, T versus phi1 as CSV")
    p.add_argument("--phi1", type=float, help="evaluate a single phi1 instead of a range")
    p.add_argument("--from", dest="start", type=float, default=-math.pi)
    p.add_argument("--to", dest="end", type=float, default=math.pi)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--phi2", type=float, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--model", choices=[m.value for m in Model], default=Model.IDEAL_CLOSED_FORM.value)
    p.add_argument("--arm-loss1", type=float, default=0.0)
    p.add_argument("--arm-loss2", type=float, default=0.0)

    p = add("metrics", "visibility and max slope of a curve CSV")
    p.add_argument("--input", required=True)

    p = add("compare", "Grover-Michelson versus Michelson enhancement report")
    p.add_argument("--phi2", type=float, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--delta-phi", type=float, default=1e-3)
    p.add_argument("--points", type=int, default=2001)

    p = add("calibrate", "fit splitter reflectances and losses to a measured matrix")
    p.add_argument("--measured", required=True)

    p = add("verify", "run the built-in property checks")
    p.add_argument("--grid", type=int, default=10)
    return parser


def _cmd_coin(args) -> str:
    ph = CoinPhases(args.theta1, args.theta2, args.theta)
    if args.compose:
        m = compose_network(
            BeamSplitterParams.from_split(args.bs1_r, args.loss1),
            BeamSplitterParams.from_split(args.bs2_r, args.loss2),
            ph,
        )
    else:
        m = generalized_coin(ph)
    return "".join(",".join(_fmt_complex(z) for z in row) + "\n" for row in m)


def _sweep_spec(args, start: float, end: float, points: int) -> SweepSpec:
    model = Model(args.model)
    device = None
    if args.arm_loss1 or args.arm_loss2:
        device = DeviceParams(arm_loss=(args.arm_loss1, args.arm_loss2))
    return SweepSpec(args.phi2, args.theta, start, end, points, model, device)


def _cmd_sweep(args) -> tuple[str, int]:
    if args.phi1 is not None:
        spec = _sweep_spec(args, args.phi1, args.phi1 + 1.0, 3)
        amp = evaluate(spec, args.phi1)
        curve = InterferogramCurve(np.array([args.phi1]), np.array([amp.R]), np.array([amp.T]), spec)
        return write_curve_csv(curve), EXIT_OK
    curve = sweep(_sweep_spec(args, args.start, args.end, args.points))
    for gap in curve.gaps:
        print(f"skipped phi1={gap.phi1:.12g}: {gap.reason}", file=sys.stderr)
    return write_curve_csv(curve), EXIT_NUMERIC if curve.gaps else EXIT_OK


def _cmd_metrics(args) -> str:
    curve = read_curve_csv(args.input)
    slope, at = max_slope(curve)
    return (
        f"samples={curve.phi1.size}\n"
        f"visibility={_fmt(visibility(curve))}\n"
        f"max_slope={_fmt(slope)}\n"
        f"max_slope_phi1={_fmt(at)}\n"
    )


def _cmd_compare(args) -> str:
    model = Model.IDEAL_CLOSED_FORM if args.theta == 0.0 else Model.STEADY_STATE
    report = enhancement_report(args.phi2, args.theta, args.delta_phi, args.points, model=model)
    return format_report(report)


def _cmd_verify(args) -> tuple[str, int]:
    if args.grid < 2:
        raise InvalidParameterError(f"--grid must be at least 2, got {args.grid}")
    results = run_checks(args.grid)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}\n" for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed\n")
    return "".join(lines), EXIT_OK if failed == 0 else EXIT_NUMERIC


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, dispatch, and return the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID

    try:
        if args.command == "coin":
            text, code = _cmd_coin(args), EXIT_OK
        elif args.command == "sweep":
            text, code = _cmd_sweep(args)
        elif args.command == "metrics":
            text, code = _cmd_metrics(args), EXIT_OK
        elif args.command == "compare":
            text, code = _cmd_compare(args), EXIT_OK
        elif args.command == "calibrate":
            text, code = format_calibration(calibrate(read_matrix_csv(args.measured))), EXIT_OK
        else:
            text, code = _cmd_verify(args)
    except ResonanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidParameterError, InvalidDataError, DimensionMismatchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.output:
        try:
            with open(args.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_INVALID
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
