"""CHSH value of both labeled forms for bosons and fermions at canonical settings."""

import argparse
import math

from dualism import BellSettings, build_epr_state, sign_difference_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=complex, default=1 / math.sqrt(2))
    ap.add_argument("--beta", type=complex, default=1 / math.sqrt(2))
    args = ap.parse_args()
    print(f"{'statistics':<10} {'S (A-form)':>12} {'S (B-form)':>12}  ratio sign")
    for stats in ("boson", "fermion"):
        s = build_epr_state(args.alpha, args.beta, stats)
        s_a, s_b, sign = sign_difference_report(s, BellSettings.canonical())
        print(f"{stats:<10} {s_a:>12.6f} {s_b:>12.6f}  {sign:+d}")


if __name__ == "__main__":
    main()
