"""
Score every weight transcription against n=512 simulations on the 3x3
validation suite and print the errata table.

    python3 scripts/calibrate.py [--nmax 512] [--quadrature-n 128] [--json out.json]
"""

import argparse
import json
import math

import numpy as np

from qw2d.coin import build_coin, coin_from_angle
from qw2d.evolution import InitialState
from qw2d.report import AGREEMENT_TOL, calibrate

SQ2 = math.sqrt(0.5)
COINS = {
    "hadamard": coin_from_angle(math.pi / 4),
    "theta_pi_3": coin_from_angle(math.pi / 3),
    "complex": build_coin(0.6 * np.exp(0.2j), 0.8, np.exp(0.5j)),
}
STATES = {
    "L": InitialState(1, 0, 0, 0),
    "uniform": InitialState(0.5, 0.5, 0.5, 0.5),
    "L+iU": InitialState(SQ2, 0, 0, 1j * SQ2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--nmax", type=int, default=512)
    ap.add_argument("--quadrature-n", type=int, default=128)
    ap.add_argument("--json", type=str, default=None)
    args = ap.parse_args()

    cases = [(c, s) for c in COINS.values() for s in STATES.values()]
    res = calibrate(cases, n_max=args.nmax, quadrature_n=args.quadrature_n)
    width = max(len(t) for t in res.errors)
    print(f"{'transcription':<{width}}  max |quadrature - empirical|")
    for tid, err in sorted(res.errors.items(), key=lambda kv: kv[1]):
        mark = "pass" if err < AGREEMENT_TOL else "fail"
        print(f"{tid:<{width}}  {err:.3e}  {mark}")
    print(f"selected: {res.selected}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"errors": res.errors, "selected": res.selected, "cases": res.cases}, fh, indent=2)


if __name__ == "__main__":
    main()
