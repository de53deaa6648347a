"""
Command-line front end.

    qw2d simulate        --config run.json [--out DIR] [--nmax N] [--threads K]
    qw2d entropy-series  --config run.json [--out DIR] [--nmax N] [--threads K]
    qw2d limits          --config run.json [--out DIR] [--nmax N] [--threads K]
    qw2d baseline        [--nmax N] [--out DIR]
    qw2d oracle-check    [--nmax N]

Exit codes: 0 ok, 1 check failed, 2 config error, 3 resource cap, 4 degenerate coin.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .asymptotics import DegenerateCoin
from .baseline import TooShort, rw_limit_report
from .entropy import entropy_series
from .evolution import (
    ResourceLimit,
    distribution,
    evolve,
    path_sum_oracle,
    walk,
)
from .report import build_limit_report
from .sampling import sample_cases

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE, EXIT_DEGENERATE = 0, 1, 2, 3, 4

PLOT_SCRIPT = '''"""Plot the two-column files written by `qw2d limits` (run from this directory)."""
import numpy as np
import matplotlib.pyplot as plt

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
n, sc = np.loadtxt("sc_vs_n.dat", unpack=True)
ax1.plot(n, sc, lw=0.8)
ax1.set_xlabel("n")
ax1.set_ylabel("S_n^c (bits)")
n, ratio = np.loadtxt("shannon_ratio_vs_n.dat", unpack=True)
ax2.plot(n, ratio, lw=0.8)
ax2.axhline(1.0, color="k", ls=":")
ax2.set_xlabel("n")
ax2.set_ylabel("S_n / log2(n/4)")
fig.tight_layout()
fig.savefig("limits.png", dpi=150)
'''


def _config(args) -> io.RunConfig:
    if not args.config:
        raise io.ConfigError("--config: required for this subcommand")
    cfg = io.load_config(args.config)
    if args.nmax is not None:
        if args.nmax < 1:
            raise io.ConfigError(f"--nmax: must be >= 1, got {args.nmax}")
        cfg = io.parse_config({**cfg.raw, "n_max": args.nmax, "snapshots": cfg.raw.get("snapshots", [args.nmax])})
    return cfg


def _outdir(args, cfg: io.RunConfig | None = None) -> Path:
    out = Path(args.out) if args.out else (cfg.out if cfg and cfg.out else Path("results"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    cfg = _config(args)
    if any(s > cfg.n_max for s in cfg.snapshots):
        raise io.ConfigError(f"snapshots: entries must not exceed n_max={cfg.n_max}")
    out = _outdir(args, cfg)
    norms = []
    for fld in walk(cfg.coin, cfg.phi, cfg.n_max, threads=args.threads, memory_cap=cfg.memory_cap):
        norms.append((fld.n, fld.norm()))
        if fld.n in cfg.snapshots:
            io.write_snapshot(out / f"snapshot_n{fld.n}.csv", fld, cfg.coin, cfg.phi)
            io.write_distribution(out / f"distribution_n{fld.n}.csv", distribution(fld))
    io.write_csv(out / "norms.csv", ["n", "norm"], norms)
    worst = max(abs(v - 1.0) for _, v in norms)
    print(f"simulated n={cfg.n_max}; max |norm - 1| = {worst:.3e}; wrote {out}")
    return EXIT_OK


def cmd_entropy_series(args) -> int:
    cfg = _config(args)
    out = _outdir(args, cfg)
    series = entropy_series(cfg.coin, cfg.phi, cfg.n_max, threads=args.threads, memory_cap=cfg.memory_cap)
    io.write_entropy_csv(out / "entropy.csv", series)
    print(f"wrote {len(series.n)} entropy rows to {out / 'entropy.csv'}")
    return EXIT_OK


def cmd_limits(args) -> int:
    cfg = _config(args)
    out = _outdir(args, cfg)
    report, series = build_limit_report(
        cfg.coin, cfg.phi, n_max=cfg.n_max, quadrature_n=cfg.quadrature_n,
        window=cfg.window, threads=args.threads, memory_cap=cfg.memory_cap,
    )
    io.write_json(out / "limits.json", report.to_dict())
    io.write_dat(out / "sc_vs_n.dat", ["n", "s_c"], zip(series.n, series.s_c))
    keep = series.n > 4
    ratio = series.s_shannon[keep] / np.log2(series.n[keep] / 4.0)
    io.write_dat(out / "shannon_ratio_vs_n.dat", ["n", "ratio"], zip(series.n[keep], ratio))
    (out / "plot_limits.py").write_text(PLOT_SCRIPT)
    q, e = report.overlaps_quadrature, report.overlaps_empirical
    print(f"transcription {report.transcription_id}; overlap sum {sum(q):.12f}; "
          f"max |quadrature - empirical| = {max(abs(a - b) for a, b in zip(q, e)):.3e}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    n_max = args.nmax if args.nmax is not None else 2**16
    try:
        rep = rw_limit_report(n_max)
    except TooShort as exc:
        raise io.ConfigError(f"--nmax: {exc}") from None
    out = _outdir(args)
    io.write_csv(out / "baseline.csv", ["n", "s_rw", "ratio1", "bracket2"],
                 zip(rep.n, rep.entropy, rep.ratio, rep.bracket))
    io.write_json(out / "baseline_summary.json", rep.summary())
    print(f"ratio at n={rep.n[-1]}: {rep.ratio[-1]:.6f}; bracket {rep.bracket_estimate:.6f} "
          f"vs claimed {rep.claimed_constant:.6f}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    n_top = args.nmax if args.nmax is not None else 6
    if not 0 <= n_top <= 8:
        raise io.ConfigError(f"--nmax: oracle check supports n <= 8, got {n_top}")
    worst = 0.0
    for coin, phi in sample_cases(10, seed=7):
        for n in range(n_top + 1):
            p_walk = distribution(evolve(coin, phi, n)).p
            p_path = path_sum_oracle(coin, n).distribution(phi).p
            worst = max(worst, float(np.abs(p_walk - p_path).max()))
    print(f"max per-site probability deviation (n <= {n_top}, 10 cases): {worst:.3e}")
    return EXIT_OK if worst < 1e-12 else EXIT_FAIL


COMMANDS = {
    "simulate": cmd_simulate,
    "entropy-series": cmd_entropy_series,
    "limits": cmd_limits,
    "baseline": cmd_baseline,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qw2d", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="JSON run configuration")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads for the lattice step")
        p.add_argument("--nmax", type=int, default=None, help="override n_max")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except io.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DegenerateCoin as exc:
        print(f"degenerate coin: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
