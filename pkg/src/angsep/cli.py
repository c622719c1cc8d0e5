"""Command line front end.

Subcommands mirror the experiment operations:

    angsep simulate   --config cfg.toml --out dir [--seed N --scenarios N --threads N]
    angsep correlate  ...
    angsep analytic   ...
    angsep hull-split ...
    angsep expected-bs --phi 3.14159 [--validate]

Without --config the built-in reference parameters are used.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import kernels
from .analytic import expected_bs_for_target, expected_bs_stopping_oracle
from .config import load_config
from .experiment import (
    _fmt,
    run_analytic,
    run_correlation,
    run_hull_split,
    run_simulation,
    write_summary_csv,
)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--seed", type=int, help="override the RNG seed")
    p.add_argument("--scenarios", type=int, help="override the scenario count")
    p.add_argument("--threads", help="worker count or 'auto'")
    p.add_argument("--out", help="output directory")


def _config(args):
    return load_config(
        path=args.config,
        seed=args.seed,
        n_scenarios=args.scenarios,
        threads=args.threads,
        output_dir=args.out,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="angsep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("simulate", "correlate", "analytic", "hull-split"):
        sp = sub.add_parser(name)
        _add_common(sp)

    sp = sub.add_parser("expected-bs")
    _add_common(sp)
    sp.add_argument("--phi", type=float, action="append",
                    help="target gap in radians (repeatable; default: config grid)")
    sp.add_argument("--validate", action="store_true",
                    help="cross-check each value against the stopping-time oracle")

    args = parser.parse_args(argv)
    cfg = _config(args)

    if args.command == "simulate":
        result = run_simulation(cfg)
        n_rows = len(result.rows)
        print(f"backend={kernels.active_backend()} scenarios={cfg.n_scenarios} "
              f"rows(L>={cfg.l_min})={n_rows}")
        p = result.summary.get(("p_n_ge", str(cfg.l_min)))
        if p is not None:
            print(f"P(N>={cfg.l_min}) = {p[0]:.4f} (+-{p[1]:.4f})")
        for key in ("results", "summary", "curves"):
            print(f"wrote {result.paths[key]}")
    elif args.command == "correlate":
        report = run_correlation(cfg)
        print(f"{'bin':>8} {'n':>9} {'n_inf':>6} {'spearman':>9} {'pearson':>9} {'pearson_log':>12}")
        for b in report:
            if b.spearman is None:
                print(f"{b.label:>8} {b.n:>9} {b.n_excluded:>6} {'unavailable':>33}")
            else:
                print(f"{b.label:>8} {b.n:>9} {b.n_excluded:>6} "
                      f"{b.spearman:>9.4f} {b.pearson_gdop:>9.4f} {b.pearson_log_gdop:>12.4f}")
        print(f"wrote {cfg.output_dir / 'correlations.csv'}")
    elif args.command == "analytic":
        curves, expected = run_analytic(cfg)
        print(f"wrote {cfg.output_dir / 'curves.csv'} ({len(curves)} curves)")
        print(f"wrote {cfg.output_dir / 'expected_bs.csv'} ({len(expected)} points)")
    elif args.command == "hull-split":
        reports, _ = run_hull_split(cfg)
        for r in reports:
            p95 = "n/a" if r.inside_p95 is None else f"{r.inside_p95:.3f}"
            print(f"{r.label}: inside={r.n_inside} outside={r.n_outside} inside_p95_gdop={p95}")
        print(f"wrote {cfg.output_dir / 'hull_split.csv'}")
        print(f"wrote {cfg.output_dir / 'hull_curves.csv'}")
    elif args.command == "expected-bs":
        phis = args.phi if args.phi else [p for p in cfg.phi_grid if p < 2.0 * math.pi]
        stats = []
        for phi in phis:
            val = expected_bs_for_target(phi)
            line = f"phi={phi:.6f} expected_bs={val:.4f}"
            if args.validate:
                oracle, se = expected_bs_stopping_oracle(phi, n_runs=100_000, seed=cfg.network.seed)
                line += f" oracle={oracle:.4f}(+-{se:.4f})"
            print(line)
            stats.append(("expected_bs", _fmt(phi), val, None))
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        write_summary_csv(cfg.output_dir / "expected_bs.csv", stats)
        print(f"wrote {cfg.output_dir / 'expected_bs.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
