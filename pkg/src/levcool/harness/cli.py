"""Command-line entry point: ``levcool run | sweep | force-scan | check``.

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
failures (including sweeps in which any point recorded an error).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import ConfigError, NumericalError
from .config import parse_entries, require_mode
from .output import emit_svg, format_csv
from .sweep import (COOLING_COLUMNS, Axis, SweepSpec, convert_entries_lenient, parse_sweep,
                    run_single, run_sweep)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
SCAN_KEYS = {"scan.start": 0.3, "scan.stop": 3.0, "scan.points": 271}


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError("io_error", f"cannot read {path}: {exc.strerror}") from None


def force_scan_spec(text: str) -> SweepSpec:
    """Sweep over the separation in wavelengths, driven by ``scan.*`` keys."""
    entries = parse_entries(text)
    scan = {k: entries.pop(k) for k in list(entries) if k.startswith("scan.")}
    for key, entry in scan.items():
        if key not in SCAN_KEYS:
            raise ConfigError("unknown_key", f"unknown scan key {key!r}", entry.line, key)
    settings = dict(SCAN_KEYS)
    for key, entry in scan.items():
        try:
            settings[key] = int(entry.text) if key == "scan.points" else float(entry.text)
        except ValueError:
            raise ConfigError("invalid_value", f"cannot parse {entry.text!r}", entry.line,
                              key) from None
    if require_mode(entries) != "physical":
        raise ConfigError("invalid_value", "force-scan requires mode = physical",
                          entries["mode"].line, "mode")
    entries.pop("separation", None)
    mode, fixed = convert_entries_lenient(entries)
    axis = Axis("separation", settings["scan.start"], settings["scan.stop"],
                settings["scan.points"], "lambda")
    return SweepSpec("force_scan", (axis,), mode, fixed)


def _finish(records, columns, args, title: str) -> int:
    text = format_csv(records, columns)
    if args.out:
        Path(args.out).write_text(text)
        if args.svg:
            for path in emit_svg(records, Path(args.out).with_suffix(".svg"), title):
                print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)
        if args.svg:
            print("--svg needs --out to name the plot file", file=sys.stderr)
    failed = [r for r in records if r.outputs.get("error")]
    for record in failed[:5]:
        print(f"point {dict(record.axes)}: {record.outputs['error']}", file=sys.stderr)
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_run(args) -> int:
    record = run_single(_read(args.config))
    return _finish([record], COOLING_COLUMNS, args, Path(args.config).stem)


def cmd_sweep(args) -> int:
    spec = parse_sweep(_read(args.spec))
    if spec.output and not args.out:
        args.out = str(Path(args.spec).parent / spec.output)
    records = run_sweep(spec, workers=args.workers)
    return _finish(records, spec.columns, args, Path(args.spec).stem)


def cmd_force_scan(args) -> int:
    spec = force_scan_spec(_read(args.config))
    records = run_sweep(spec, workers=args.workers)
    return _finish(records, spec.columns, args, Path(args.config).stem)


def cmd_check(args) -> int:
    from .selfcheck import run_checks
    results = run_checks()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levcool",
                                     description="Cavity cooling of optically bound particles")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="CSV output path (default: stdout)")
        p.add_argument("--svg", action="store_true", help="also write an SVG next to --out")
        p.add_argument("--workers", type=int, default=1, help="parallel worker threads")

    p = sub.add_parser("run", help="single steady-state evaluation")
    p.add_argument("config")
    common(p)
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("sweep", help="1- or 2-axis parameter grid")
    p.add_argument("spec")
    common(p)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("force-scan", help="binding forces versus separation")
    p.add_argument("config")
    common(p)
    p.set_defaults(func=cmd_force_scan)
    p = sub.add_parser("check", help="run the built-in invariant checks")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
