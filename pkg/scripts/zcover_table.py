"""Tabulate the trace defect Delta_n and the twisted traces for a Z-cover of a 2D lattice.

usage: python3 scripts/zcover_table.py [--k 2] [--scale 3] [--basis 1,0,0,1] [--chi 0,1]
"""

import argparse
from fractions import Fraction

from bslab.euclid import LatticeBasis
from bslab.testfn import TestFunction
from bslab.zcover import ZCoverScheme, check_prop43, l2_trace, laurent_trace


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--scale", type=Fraction, default=Fraction(3))
    p.add_argument("--basis", default="1,0,0,1", help="row-major 2x2 entries")
    p.add_argument("--chi", default="0,1")
    p.add_argument("--n-max", type=int, default=8)
    args = p.parse_args()

    e = [Fraction(x) for x in args.basis.split(",")]
    scheme = ZCoverScheme(LatticeBasis([e[:2], e[2:]]), tuple(int(x) for x in args.chi.split(",")))
    f = TestFunction.bspline(args.k, (args.scale, args.scale))
    lt = laurent_trace(scheme, f)
    print(f"kernel trace {l2_trace(scheme, f)}, Laurent degree {lt.degree}")
    print("coefficients:", {p: str(c) for p, c in sorted(lt.coeffs.items())})
    rep = check_prop43(scheme, f, range(1, args.n_max + 1))
    print(f"{'n':>3} {'Delta_n':>12}")
    for row in rep.rows:
        print(f"{row['n']:>3} {str(row['delta']):>12}")
    print(f"Delta_n vanishes from n = {rep.info['threshold']} on")
    for j in range(8):
        th = Fraction(j, 8)
        print(f"theta={str(th):>4}  trace={lt(th).real: .12f}")


if __name__ == "__main__":
    main()
