"""``cjt`` command-line entry point.

    cjt meanfield|dispersion|gaps|fig1|ed-check|sweep --config PATH [--units g|absolute] [--out PATH]

Exit codes: 0 ok, 2 config, 3 non-convergence, 4 out-of-domain, 5 memory
budget, 6 every sweep point failed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import commands
from .config import apply_overrides, load_config
from .errors import CJTError
from .output import render_record, render_table, write_text

EXIT_SWEEP_FAILED = 6


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cjt", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=["meanfield", "dispersion", "gaps", "fig1", "ed-check", "sweep"])
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--units", choices=["g", "absolute"], help="energy units of the report")
    p.add_argument("--out", help="output file (overrides output.path)")
    p.add_argument("--format", choices=["csv", "json"], help="overrides output.format")
    p.add_argument("--precision", type=int, help="overrides output.precision")
    p.add_argument("--N", type=int, help="overrides model.N")
    p.add_argument("--workers", type=int, default=1, help="worker processes for sweep")
    p.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override any config entry, e.g. --set model.g=1.5 (repeatable)",
    )
    return p


def _resolve_config(args):
    config = load_config(args.config)
    overrides = list(args.set)
    if args.units:
        overrides.append(f"units={args.units}")
    if args.format:
        overrides.append(f"output.format={args.format}")
    if args.precision is not None:
        overrides.append(f"output.precision={args.precision}")
    if args.N is not None:
        overrides.append(f"model.N={args.N}")
    if args.out:
        overrides.append(f"output.path={args.out}")
    return apply_overrides(config, overrides) if overrides else config


def _sidecar_path(path: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".scalars.json")


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        out = config.output
        if args.command == "fig1":
            if out.path is None:
                config = replace(config, output=replace(out, path=f"fig1_dispersion.{out.format}"))
                out = config.output
            table, scalars = commands.cmd_fig1(config)
            write_text(render_table(table, out.format, out.precision), out.path)
            sidecar = render_record(scalars, "json", out.precision)
            write_text(sidecar, _sidecar_path(out.path))
            sys.stdout.write(sidecar)
            return 0
        if args.command == "dispersion":
            text = render_table(commands.cmd_dispersion(config), out.format, out.precision)
        elif args.command == "sweep":
            table, n_ok = commands.run_sweep(config, workers=args.workers)
            text = render_table(table, out.format, out.precision)
            write_text(text, out.path)
            if out.path is None:
                sys.stdout.write(text)
            return 0 if n_ok else EXIT_SWEEP_FAILED
        else:
            handler = {
                "meanfield": commands.cmd_meanfield,
                "gaps": commands.cmd_gaps,
                "ed-check": commands.cmd_ed_check,
            }[args.command]
            text = render_record(handler(config), out.format, out.precision)
        write_text(text, out.path)
        if out.path is None or args.command != "dispersion":
            sys.stdout.write(text)
        return 0
    except CJTError as exc:
        print(f"cjt: error: {exc}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
