"""Command-line interface: ``biofet-mc <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .config import load_config
from .errors import ModelError
from .oracles import run_validation
from .sweep import FORMATS, METRICS, SweepSpec, emit, run_sweep, tabulate

# default sweep per subcommand, in config units
DEFAULT_SWEEPS = {
    "respond": ("transmitter.N_m:log:1e4:1e7:31", ["mu_I"]),
    "snr": ("transmitter.N_m:log:1e4:1e7:31", ["snr_db"]),
    "sep": ("constellation.K:linear:1e6:1e7:10", ["sep", "log10_sep"]),
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML file merged over the built-in defaults")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--workers", type=int, default=1, help="parallel workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biofet-mc",
        description="Link-level model of a microfluidic molecular communication channel with a SiNW bioFET receiver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("respond", "mean output current versus released molecules"),
        ("snr", "output SNR over a parameter sweep"),
        ("sep", "symbol error probability over a parameter sweep"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        sweep, metrics = DEFAULT_SWEEPS[name]
        p.add_argument("--sweep", default=sweep, help=f"key:scale:lo:hi:n (default {sweep})")
        p.add_argument("--metrics", default=",".join(metrics),
                       help=f"comma-separated subset of {','.join(METRICS)}")

    p = sub.add_parser("psd", help="sampled output noise PSD at the transmitter release")
    _add_common(p)
    p.add_argument("--freq", default="1e-3:1e5:41", help="log-spaced frequencies lo:hi:n in Hz")

    p = sub.add_parser("validate", help="run the oracle suite against the analytic model")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200_000, help="Monte Carlo trials per sampler")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write JSON records here as well")

    p = sub.add_parser("show-config", help="print the resolved configuration as YAML")
    p.add_argument("--config")
    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    sweep = SweepSpec.parse(args.sweep)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    table = run_sweep(cfg, sweep, metrics, workers=args.workers)
    _write(emit(table, args.format, args.out), args.out)
    return 0


def _cmd_psd(args) -> int:
    cfg = load_config(args.config)
    try:
        lo, hi, n = (float(x) for x in args.freq.split(":"))
    except ValueError:
        raise ModelError(f"--freq must look like lo:hi:n, got {args.freq!r}") from None
    if not 0 < lo < hi or n < 2 or not n.is_integer():
        raise ModelError(f"--freq needs 0 < lo < hi and an integer n >= 2, got {args.freq!r}")
    link = cfg.link
    freqs = np.logspace(math.log10(lo), math.log10(hi), int(n))
    table = tabulate("f", freqs, {
        "S_I": lambda f: link.output_noise_psd(cfg.N_m, f),
        "S_IB": lambda f: link.binding_psd(cfg.N_m, f),
        "S_IF": lambda f: link.flicker_psd(f),
    })
    _write(emit(table, args.format, args.out), args.out)
    return 0


def _finite_or_none(x):
    return x if not isinstance(x, float) or math.isfinite(x) else None


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    reports = run_validation(cfg.link, cfg.N_m, cfg.constellation, seed=args.seed,
                             mc_trials=args.trials, workers=args.workers)
    print(f"{'oracle':<28} {'analytic':>14} {'numeric':>14} {'rel_err':>10} {'tol':>10}  result")
    for r in reports:
        print(f"{r.name:<28} {r.analytic:>14.6e} {r.numeric:>14.6e} {r.rel_err:>10.2e} {r.tolerance:>10.2e}  "
              f"{'PASS' if r.passed else 'FAIL'}{'  ' + r.note if r.note else ''}")
    records = [{k: _finite_or_none(v) for k, v in r.to_dict().items()} for r in reports]
    lines = "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in records)
    sys.stdout.write(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(lines)
    return 0 if all(r.passed for r in reports) else 1


def _cmd_show_config(args) -> int:
    sys.stdout.write(load_config(args.config).dump())
    return 0


COMMANDS = {
    "respond": _cmd_sweep,
    "snr": _cmd_sweep,
    "sep": _cmd_sweep,
    "psd": _cmd_psd,
    "validate": _cmd_validate,
    "show-config": _cmd_show_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ModelError, ValueError) as exc:
        print(f"biofet-mc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
