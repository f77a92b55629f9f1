"""Sweep the trap-environment overlap and print S for both labeled forms."""

import argparse
import math

import numpy as np

from dualism import build_epr_state, sweep_to_csv, sweep_transition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--stats", choices=["boson", "fermion"], default="fermion")
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--settings", choices=["optimal", "fixed-canonical"], default="optimal")
    ap.add_argument("--phi-env", type=float, default=0.0, help="overlap phase, degrees")
    args = ap.parse_args()
    s = build_epr_state(1 / math.sqrt(2), 1 / math.sqrt(2), args.stats)
    rows = sweep_transition(s, np.linspace(0, 1, args.points), args.settings, math.radians(args.phi_env))
    print(sweep_to_csv(rows), end="")
    if args.settings == "optimal":
        worst = max(abs(r.s_momentum - 2 * math.sqrt(1 + r.gamma**4)) for r in rows)
        print(f"# max deviation from 2*sqrt(1+gamma^4): {worst:.2e}")


if __name__ == "__main__":
    main()
