"""P(InjRad <= R) against R for the chi-covers and homology covers of the octagon group.

Writes one long-format CSV (scheme, n, R/systole, estimate, ci) for plotting.

usage: python3 scripts/bs_curves.py --out out/bs_curves.csv [--samples 10000] [--seed 42]
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from bslab import hyperbolic as hyp


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="out/bs_curves.csv")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--r-max", type=float, default=0.7, help="largest R in systoles")
    args = p.parse_args()

    group = hyp.build_octagon_group()
    fracs = np.round(np.linspace(0.45, args.r_max, 11), 4)
    radii = [float(f) * hyp.SYSTOLE for f in fracs]
    ball = hyp.group_ball(group, hyp.required_cutoff(max(radii)))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scheme", "n", "R_over_systole", "estimate", "ci", "decided"])
        for kind, ns in (("chi", [1, 2, 4, 8, None]), ("homology", [1, 2, 3])):
            for n in ns:
                ests = hyp.mc_bs_probability(group, ball, hyp.HypScheme(n, kind), radii, args.samples, args.seed,
                                             args.threads)
                for f, e in zip(fracs, ests):
                    w.writerow([kind, "inf" if n is None else n, f, repr(e.estimate), repr(e.ci), e.decided])
                print(kind, n, " ".join(f"{e.estimate:.3f}" for e in ests), flush=True)
    print(f"wrote {out} (ball cutoff {ball.cutoff:.3f}, {len(ball)} elements)")


if __name__ == "__main__":
    main()
