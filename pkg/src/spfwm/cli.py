"""Command-line entry point: ``spfwm <subcommand> [options]``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .experiments import ExperimentConfig, RealizationError, run

COMMANDS = {
    "sweep": "design-sweep",
    "stable-radius": "stable-radius",
    "jsa": "jsa-realizations",
    "mc-radius": "purity-vs-radius",
    "mc-duration": "purity-vs-duration",
    "mc-corrlen": "correlation-length",
}

HELP = {
    "sweep": "phase-matched wavelengths and unperturbed purity over doping and radius",
    "stable-radius": "core radius where the phase-matched wavelength is stationary",
    "jsa": "seeded realizations per fluctuation level with profile and JSA export",
    "mc-radius": "Monte-Carlo purity against mean core radius",
    "mc-duration": "Monte-Carlo purity against pump duration",
    "mc-corrlen": "Monte-Carlo purity and visibility against correlation length",
}


def _parser():
    p = argparse.ArgumentParser(prog="spfwm", description="Photon-pair purity in fluctuating few-mode fibers.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, help=HELP[name])
        s.add_argument("--config", help="flat key = value config file")
        s.add_argument("--seed", type=int)
        s.add_argument("--samples", type=int)
        s.add_argument("--grid-n", type=int)
        s.add_argument("--workers", type=int)
        s.add_argument("--out", help="run directory (default spfwm-<command>)")
        s.add_argument("--doping", help="GeO2 fraction; a comma list for sweep")
        s.add_argument("--a0", help="mean core radius in um; a comma list for mc-duration and mc-corrlen")
        s.add_argument("--radius", help="radius range start:stop:step in um")
        s.add_argument("--sigma", help="comma list of relative deviations sigma_a/a0")
        s.add_argument("--pulse", type=float, help="pump duration in ps")
        s.add_argument("--lcorr", type=float, help="correlation length in m")
        s.add_argument("--duration", help="pump-duration range start:stop:step in ps")
        s.add_argument("--ratio", help="log10(l_coll/l_corr) range start:stop:step")
        s.add_argument("--coefficients", help="Sellmeier set name or file")
    return p


def build_config(args) -> ExperimentConfig:
    kind = COMMANDS[args.command]
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig(kind=kind)
    over = {
        "kind": kind,
        "seed": args.seed,
        "samples": args.samples,
        "grid_n": args.grid_n,
        "workers": args.workers,
        "radius_range_um": args.radius,
        "sigma_rel": args.sigma,
        "pulse_ps": args.pulse,
        "l_corr_m": args.lcorr,
        "duration_range_ps": args.duration,
        "corr_ratio_log10": args.ratio,
        "coefficients": args.coefficients,
    }
    if args.doping is not None:
        key = "doping_list" if args.command == "sweep" else "doping"
        over[key] = args.doping
    if args.a0 is not None:
        key = "radii_um" if args.command in ("mc-duration", "mc-corrlen") else "radius_um"
        over[key] = args.a0
    return cfg.updated(**over)


def _report(command, result, out):
    if command == "stable-radius":
        st = result.summary["stable"]
        print(f"a* = {st.radius_um:.4f} um, lambda_s = {st.signal_um * 1e3:.2f} nm")
    elif command == "jsa":
        for frac, vals in result.summary["purities"].items():
            print(f"sigma/a0 = {frac:g}: median purity {np.median(vals):.4f} over {len(vals)}")
    elif command == "mc-corrlen":
        for a0, s in result.summary.items():
            print(f"a0 = {a0:g} um: worst l_coll/l_corr = {s['worst_ratio']:.3g}")
    for f in result.files:
        print(f)
    print(f"results in {out}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except (OSError, ValueError) as exc:
        print(f"spfwm: invalid configuration: {exc}", file=sys.stderr)
        return 2
    out = args.out or f"spfwm-{args.command}"
    try:
        result = run(cfg, out)
    except RealizationError as exc:
        print(f"spfwm: {exc}", file=sys.stderr)
        return 3
    except (ValueError, RuntimeError) as exc:
        print(f"spfwm: {exc}", file=sys.stderr)
        return 1
    _report(args.command, result, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
