"""Command-line entry point ``battery``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from .errors import BatteryError, ConfigError, UnstableDynamics
from .sweep import (
    SweepConfig,
    fmt,
    load_config,
    optimize_theta,
    parse_config,
    preset_names,
    preset_text,
    rows_to_csv,
    run_scenario,
    validate_config,
)

EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_NUMERIC = 0, 2, 3, 4

COMMANDS = ("steady", "evolve", "thermo", "power", "sweep", "optimize", "closed", "presets")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="battery",
        description="Charge a Gaussian quantum battery with a squeezing drive and a squeezed bath.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--preset", help="use a shipped preset instead of --config")
    p.add_argument("--out", help="output CSV path (default: config 'output' or stdout)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _load(args) -> SweepConfig:
    if args.preset and args.config:
        raise ConfigError("give either --config or --preset, not both")
    if args.preset:
        return parse_config(preset_text(args.preset))
    if args.config:
        try:
            return load_config(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    return SweepConfig()


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "presets":
            if args.preset:
                _emit(preset_text(args.preset), args.out)
            else:
                _emit("".join(name + "\n" for name in preset_names()), args.out)
            return EXIT_OK
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = _load(args)
        out = args.out or cfg.output
        if args.command == "optimize":
            theta, value = optimize_theta(cfg)
            _emit(f"target,theta_star,value\n{cfg.target},{fmt(theta)},{fmt(value)}\n", out)
            return EXIT_OK
        if args.command != "sweep":
            cfg = replace(cfg, scenario=args.command)
            validate_config(cfg)
        rows = run_scenario(cfg, threads=args.threads)
        single = not cfg.axes and cfg.scenario in ("steady", "thermo", "power")
        _emit(rows_to_csv(rows), out)
        if single and rows and rows[0].get("stable") is False:
            print("battery: parameters are outside the stability region", file=sys.stderr)
            return EXIT_UNSTABLE
        return EXIT_OK
    except ConfigError as exc:
        print(f"battery: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnstableDynamics as exc:
        print(f"battery: unstable dynamics: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (BatteryError, ArithmeticError, ValueError) as exc:
        print(f"battery: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); not an error for a data dump
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except OSError as exc:
        print(f"battery: I/O error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
