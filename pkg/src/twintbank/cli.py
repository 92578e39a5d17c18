"""Command-line front end.

Five subcommands turn the library into reproducible text artifacts:

- ``tf``        transfer function of a netlist (coefficients, poles, zeros)
- ``sweep``     frequency-response CSV for a netlist, band, or bank channel
- ``calibrate`` trimmer solve report for one band or all eight
- ``table1``    factory r2 seeds compared against the embedded sheet values
- ``sum``       summed-bank CSV plus its pass-band ripple

All numeric output uses fixed significant digits (8 for frequencies,
6 for magnitudes and complex parts, 4 for phases), so identical
invocations produce byte-identical files.  Exit status is 0 on
success, 1 for computation errors, 2 for flag errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import calibrate as cal
from . import filterbank, kernels, mna, twint
from .errors import ToolkitError

_CSV_HEADER = "f_hz,mag_db,phase_deg,re,im"
_TWO_PI = 2.0 * np.pi


class _UsageError(Exception):
    """Flag combinations argparse cannot check on its own (exit status 2)."""


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return value


def _points(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 2:
        raise argparse.ArgumentTypeError("need at least 2 points")
    return value


def _band(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a frequency: {text!r}")
    if value not in cal.KNOWN_BANDS:
        raise argparse.ArgumentTypeError(
            f"no channel at {text} Hz; bands: "
            + ", ".join(f"{b:g}" for b in cal.KNOWN_BANDS))
    return value


def _band_or_all(text: str):
    if text == "all":
        return "all"
    return _band(text)


def _inversions(text: str) -> frozenset[int]:
    if text == "default":
        return filterbank.DEFAULT_INVERSION_PATTERN
    if text == "none":
        return frozenset()
    try:
        indices = frozenset(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected 'default', 'none', or comma-separated indices, "
            f"got {text!r}")
    if any(i not in range(10) for i in indices):
        raise argparse.ArgumentTypeError("channel indices live in 0..9")
    return indices


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twintbank",
        description="Analog comb-filterbank analysis and calibration.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tf = sub.add_parser(
        "tf", help="print a netlist's transfer function")
    p_tf.add_argument("--netlist", required=True, metavar="FILE")
    p_tf.set_defaults(func=_cmd_tf)

    p_sweep = sub.add_parser(
        "sweep", help="write a frequency-response CSV")
    src = p_sweep.add_mutually_exclusive_group(required=True)
    src.add_argument("--netlist", metavar="FILE",
                     help="sweep this netlist's transfer function")
    src.add_argument("--band", type=_band, metavar="HZ",
                     help="sweep one calibrated full-chain band")
    src.add_argument("--channel", type=int, choices=range(10),
                     metavar="N",
                     help="sweep bank channel N (0..9; includes the "
                          "default inversion sign and unity slider)")
    _add_grid_flags(p_sweep, fmin=20.0, fmax=20e3, points=200)
    p_sweep.add_argument("--out", default="-", metavar="FILE",
                         help="output file ('-' = standard output)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cal = sub.add_parser(
        "calibrate", help="solve trimmers and print the report")
    p_cal.add_argument("--band", type=_band_or_all, default="all",
                       metavar="HZ|all")
    p_cal.add_argument("--tol-freq", type=_positive_float, default=0.05,
                       metavar="HZ", help="peak-frequency tolerance")
    p_cal.add_argument("--tol-gain", type=_positive_float, default=0.001,
                       metavar="DB", help="peak-gain tolerance")
    p_cal.set_defaults(func=_cmd_calibrate)

    p_t1 = sub.add_parser(
        "table1", help="compare computed r2 seeds with the factory sheet")
    p_t1.set_defaults(func=_cmd_table1)

    p_sum = sub.add_parser(
        "sum", help="write the summed-bank CSV and print its ripple")
    p_sum.add_argument("--inversions", type=_inversions,
                       default=filterbank.DEFAULT_INVERSION_PATTERN,
                       metavar="default|none|LIST",
                       help="channels to invert before mixing")
    _add_grid_flags(p_sum, fmin=100.0, fmax=5000.0, points=501)
    p_sum.add_argument("--out", default="-", metavar="FILE",
                       help="output file ('-' = standard output)")
    p_sum.set_defaults(func=_cmd_sum)

    return parser


def _add_grid_flags(p: argparse.ArgumentParser, *, fmin: float,
                    fmax: float, points: int) -> None:
    p.add_argument("--fmin", type=_positive_float, default=fmin, metavar="HZ")
    p.add_argument("--fmax", type=_positive_float, default=fmax, metavar="HZ")
    p.add_argument("--points", type=_points, default=points, metavar="N")
    p.add_argument("--linear", action="store_true",
                   help="linear grid instead of logarithmic")


def _grid(args) -> np.ndarray:
    if not args.fmin < args.fmax:
        raise _UsageError(
            f"--fmin must be below --fmax ({args.fmin:g} vs {args.fmax:g})")
    if args.linear:
        return np.linspace(args.fmin, args.fmax, args.points)
    return np.geomspace(args.fmin, args.fmax, args.points)


def _load_netlist(path: str) -> mna.Netlist:
    return mna.parse_netlist(Path(path).read_text(encoding="utf-8"))


def _cmd_tf(args) -> int:
    h = mna.transfer_function(_load_netlist(args.netlist))
    print(f"sign: {h.sign:+d}")
    print("numerator (ascending powers of s): "
          + " ".join(f"{c:.12g}" for c in h.num.coeffs))
    print("denominator (ascending powers of s): "
          + " ".join(f"{c:.12g}" for c in h.den.coeffs))
    print("zeros: " + _roots_text(h.num.coeffs))
    print("poles: " + _roots_text(h.den.coeffs))
    return 0


def _roots_text(ascending) -> str:
    if len(ascending) < 2:
        return "(none)"
    roots = sorted(np.roots(ascending[::-1]),
                   key=lambda z: (z.real, z.imag))
    return ", ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in roots)


def _cmd_sweep(args) -> int:
    grid = _grid(args)
    if args.netlist is not None:
        sweep = _ratfunc_sweep(mna.transfer_function(
            _load_netlist(args.netlist)), grid)
    elif args.band is not None:
        spec = cal.default_spec(args.band)
        result = cal.calibrate_channel(spec)
        sweep = _ratfunc_sweep(
            cal.channel_response(spec, result.r2, result.r3), grid)
    else:
        bank = filterbank.default_bank()
        sweep = filterbank.channel_sweep(bank, args.channel, grid)
    _write_csv(sweep, args.out)
    return 0


def _ratfunc_sweep(h, grid: np.ndarray) -> filterbank.SweepResult:
    vals = h.sign * kernels.eval_rational(
        h.num.coeffs, h.den.coeffs, _TWO_PI * grid)
    return filterbank.SweepResult(grid, vals.real.copy(), vals.imag.copy())


def _write_csv(sweep: filterbank.SweepResult, out: str) -> None:
    lines = [_CSV_HEADER]
    for f, mag_db, phase, re_, im_ in sweep.rows():
        lines.append(f"{f:.8g},{mag_db:.6g},{phase:.4g},{re_:.6g},{im_:.6g}")
    text = "\n".join(lines) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


_REPORT_HEADER = (f"{'band_hz':>8} {'r2_kohm':>10} {'r3_kohm':>10}"
                  f" {'q':>8} {'f_peak_hz':>11} {'gain_db':>9} {'iters':>6}")


def _cmd_calibrate(args) -> int:
    if args.band == "all":
        specs = cal.DEFAULT_CHANNEL_SPECS
    else:
        specs = (cal.default_spec(args.band),)
    entries = cal.calibrate_all(specs, tol_freq=args.tol_freq,
                                tol_gain_db=args.tol_gain)
    print(_REPORT_HEADER)
    failed = False
    for entry in entries:
        if isinstance(entry, cal.CalibrationFailure):
            failed = True
            print(f"{entry.band_hz:8.1f}  FAILED: {entry.reason}")
            continue
        print(f"{entry.band_hz:8.1f} {entry.r2 / 1e3:10.3f}"
              f" {entry.r3 / 1e3:10.3f} {entry.q:8.3f}"
              f" {entry.f_peak:11.3f} {entry.gain_db:9.4f}"
              f" {entry.iterations:6d}")
    return 1 if failed else 0


def _cmd_table1(args) -> int:
    print(f"{'band_hz':>8} {'computed_kohm':>14} {'factory_kohm':>13}"
          f" {'deviation_pct':>14}")
    flagged = False
    for spec in cal.DEFAULT_CHANNEL_SPECS:
        eval_hz = cal.FACTORY_R2_INIT_EVAL_HZ[spec.band_hz]
        computed = twint.initial_r2(eval_hz, cal.R1_OHMS,
                                    spec.c1_c3, spec.c2)
        factory = cal.FACTORY_R2_INIT[spec.band_hz]
        deviation = 100.0 * (computed - factory) / factory
        mark = " *" if eval_hz != spec.band_hz else ""
        flagged = flagged or bool(mark)
        print(f"{spec.band_hz:8.1f} {computed / 1e3:14.3f}"
              f" {factory / 1e3:13.1f} {deviation:14.3f}{mark}")
    if flagged:
        print("* factory value fitted at 3500.0 Hz, not the trimmed band")
    return 0


def _cmd_sum(args) -> int:
    grid = _grid(args)
    bank = filterbank.default_bank(inversion_pattern=args.inversions)
    sweep = filterbank.summed_sweep(bank, grid)
    _write_csv(sweep, args.out)
    ripple = filterbank.ripple_db(sweep, 200.0, 3200.0)
    prefix = "# " if args.out == "-" else ""
    print(f"{prefix}ripple_db[200..3200 Hz] = {ripple:.4f}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0 if code is None else 2
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ToolkitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
