"""Command-line sweep driver.

Example::

    crsense --config base.cfg --sweep-ls 10:290:10 --case both --mc off --out results/
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import ConfigError, load_config
from .montecarlo import SimConfig
from .sweep import SweepConfig, find_optimum, run_sweep, summarize, write_csv, write_summary


def parse_grid(text: str) -> list[int]:
    """``start:stop:step`` with an inclusive stop."""
    try:
        start, stop, step = (int(tok) for tok in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step integers, got {text!r}") from None
    if step < 1 or start < 1 or stop < start:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}")
    return list(range(start, stop + 1, step))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crsense",
        description="Sensing-throughput tradeoff sweep for an energy-detecting secondary user.",
    )
    parser.add_argument("--config", required=True, help="key = value parameter file")
    parser.add_argument("--sweep-ls", type=parse_grid, default=None, metavar="START:STOP:STEP",
                        help="sensing-sample grid, stop inclusive (default 10:S-1:10)")
    parser.add_argument("--case", choices=("1", "2", "both"), default="both")
    parser.add_argument("--mc", choices=("on", "off"), default="off")
    parser.add_argument("--mc-mode", choices=("statistic", "sample"), default="statistic")
    parser.add_argument("--frames", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1, help="worker processes across grid points")
    parser.add_argument("--out", default=".", help="output directory")
    return parser


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load_config(args.config)
    except OSError as exc:
        print(f"crsense: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"crsense: {exc}", file=sys.stderr)
        return 2
    if args.frames < 1:
        print("crsense: --frames must be >= 1", file=sys.stderr)
        return 2
    if args.seed < 0 or args.seed >= 2**64:
        print("crsense: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2

    cases = {"1": (1,), "2": (2,), "both": (1, 2)}[args.case]
    sim = SimConfig(n_frames=args.frames, seed=args.seed, mode=args.mc_mode) if args.mc == "on" else None
    cfgs = []
    try:
        for n_pu in raw["n_pu"]:
            cfg = SweepConfig(
                theta_alpha=raw["theta_alpha_s"],
                theta_beta=raw["theta_beta_s"],
                n_pu=n_pu,
                t_s=raw["t_s_s"],
                t_f=raw["t_f_s"],
                gamma_p_db=raw["gamma_p_db"],
                gamma_s_db=raw["gamma_s_db"],
                target_pd=raw["target_pd"],
                solver_tol=raw["solver_tol"],
                cases=cases,
                sim=sim,
                multiplicity=raw["multiplicity"],
            )
            grid = args.sweep_ls or list(range(10, cfg.n_frame, 10))
            cfgs.append(replace(cfg, grid=tuple(grid)))
    except ValueError as exc:
        print(f"crsense: {args.config}: {exc}", file=sys.stderr)
        return 2

    results = [run_sweep(cfg, jobs=args.jobs) for cfg in cfgs]
    os.makedirs(args.out, exist_ok=True)
    write_csv(os.path.join(args.out, "tradeoff.csv"), [p for pts in results for p in pts])
    write_summary(os.path.join(args.out, "summary.json"), summarize(cfgs, results, seed=args.seed))

    for cfg, points in zip(cfgs, results):
        for p in points:
            if p.error:
                print(f"warning: N={cfg.n_pu} L={p.sensing_samples}: {p.error}", file=sys.stderr)
        for case in cases:
            try:
                l_star, r_star = find_optimum(points, case)
            except ValueError:
                print(f"N={cfg.n_pu} case {case}: no valid points")
                continue
            print(f"N={cfg.n_pu} case {case}: L*={l_star} (T_s*={l_star * cfg.t_s * 1e3:.3g} ms) R*={r_star:.6f}")
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
