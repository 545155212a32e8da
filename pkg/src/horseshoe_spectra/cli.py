"""Command-line entry point: ``horseshoe-spectra <command> --config PATH [--out DIR]``.

Exit codes: 0 success, 1 selftest failure, 2 configuration error,
3 computation error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .commands import COMMANDS, run
from .config import load_config
from .errors import ConfigError, HorseshoeError

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3
DEFAULT_OUT = "out"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="horseshoe-spectra",
        description="Markov/Lagrange spectra and dimension curves for symbolic horseshoes.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, metavar="PATH", help="YAML or JSON run configuration")
    p.add_argument("--out", metavar="DIR", default=None,
                   help=f"output directory (default: run.output from the config, else ./{DEFAULT_OUT})")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or cfg.run.output or DEFAULT_OUT)
    try:
        report = run(args.command, cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HorseshoeError, ValueError) as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    print(f"{report.command}: wrote {len(report.files)} files to {out} in {report.elapsed:.2f}s")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.command == "selftest":
        failed = [c["name"] for c in report.summary["checks"] if not c["passed"]]
        for c in report.summary["checks"]:
            print(f"  {'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['detail']}")
        if failed:
            return EXIT_SELFTEST
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
