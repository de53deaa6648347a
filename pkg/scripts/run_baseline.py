"""Print the classical random-walk entropy table up to 2^20."""

from qw2d.baseline import rw_limit_report


def main():
    rep = rw_limit_report(2**20)
    print(f"{'n':>8}  {'S_rw':>10}  {'S/log2 sqrt n':>14}  {'bracket':>10}")
    for n, s, r, b in zip(rep.n, rep.entropy, rep.ratio, rep.bracket):
        print(f"{n:>8}  {s:10.6f}  {r:14.6f}  {b:10.6f}")
    print(f"bracket limit {rep.bracket_estimate:.7f}; log2(sqrt(2 pi e)) = {rep.claimed_constant:.7f}; "
          f"log2(sqrt(2 pi e)) - 1 = {rep.claimed_constant - 1:.7f}")


if __name__ == "__main__":
    main()
