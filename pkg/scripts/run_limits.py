"""
Run ``qw2d limits`` on every config in scripts/configs and print a one-line
summary per run.

    python3 scripts/run_limits.py [--threads K] [--nmax N]
"""

import argparse
import json
from pathlib import Path

from qw2d import cli

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--nmax", type=int, default=None)
    ap.add_argument("--out", type=str, default="results")
    args = ap.parse_args()

    for cfg in sorted((HERE / "configs").glob("*.json")):
        out = Path(args.out) / cfg.stem
        argv = ["limits", "--config", str(cfg), "--out", str(out), "--threads", str(args.threads)]
        if args.nmax is not None:
            argv += ["--nmax", str(args.nmax)]
        code = cli.main(argv)
        if code:
            print(f"{cfg.stem}: exit {code}")
            continue
        rep = json.loads((out / "limits.json").read_text())
        fit = rep["shannon_fit"]
        print(
            f"{cfg.stem}: S_c limit {rep['s_limit_empirical']:.4f} "
            f"(oscillation {rep['s_c_oscillation']:.3f}); "
            f"Shannon slope {fit['slope']:.3f} R^2 {fit['r2']:.5f}"
        )


if __name__ == "__main__":
    main()
