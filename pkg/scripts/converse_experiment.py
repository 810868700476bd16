#!/usr/bin/env python3
"""Converse stress test: random linear cooperation schemes against the K/2 wall.

Samples full-cooperation schemes on the cyclic (K, L=2) network at several
densities, evaluates sum DoF by generic rank, and runs the reconstruction
diagnostic on a chosen receiver set.  On the even half (the default) the
observations always cover the outside symbol load, so deficiency stays at
zero and the reconstruction step of the converse goes through; narrower
sets (--receivers 2,4) exhibit the positive-deficiency regime.  No trial
may exceed K/2.
"""

import argparse
import csv
import sys
from fractions import Fraction

from timdof import linear_sim, serialize, topology


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--K", type=int, default=8)
    parser.add_argument("--L", type=int, default=2)
    parser.add_argument("--schemes", type=int, default=200)
    parser.add_argument("--realizations", type=int, default=3)
    parser.add_argument("--seed", type=int, default=20260814)
    parser.add_argument("--densities", type=float, nargs="+", default=[1.0, 0.5, 0.25])
    parser.add_argument("--receivers", default="evens",
                        help="comma-separated receiver set for the diagnostic, or 'evens'")
    parser.add_argument("--out", default="-", help="CSV path, - for stdout")
    args = parser.parse_args(argv)

    t = topology.make_locally_connected(args.K, args.L, topology.CYCLIC)
    a = linear_sim.full_cooperation_assignment(args.K)
    if args.receivers == "evens":
        receivers = tuple(range(2, args.K + 1, 2))
    else:
        receivers = tuple(int(x) for x in args.receivers.split(","))
    bound = Fraction(args.K, 2)

    rows = []
    worst = Fraction(0)
    violations = 0
    deficient = 0
    idx = 0
    for density in args.densities:
        for _ in range(args.schemes):
            n = 1 + idx % 3
            scheme = linear_sim.random_scheme(t, a, n, density, seed=args.seed + idx)
            base = args.seed + 10 ** 6 + idx * args.realizations
            for rep in range(args.realizations):
                c = linear_sim.sample_channel(t, n, seed=base + rep)
                total = sum(linear_sim.decodable_symbols(scheme, c, i)
                            for i in range(1, args.K + 1))
                sum_dof = Fraction(total, n)
                check = linear_sim.lemma1_check(scheme, c, receivers)
                worst = max(worst, sum_dof)
                violations += sum_dof > bound
                deficient += check.deficiency > 0
                rows.append([args.K, args.L, n, idx, density,
                             serialize.fraction_str(sum_dof),
                             check.s, check.r, check.deficiency, check.reconstructable])
            idx += 1

    fh = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8", newline="")
    fh.write(f"# timdof converse experiment seed={args.seed}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["K", "L", "n", "trial", "density", "sum_dof",
                     "s", "r", "deficiency", "reconstructable"])
    writer.writerows(rows)
    if fh is not sys.stdout:
        fh.close()

    print(f"{idx} schemes x {args.realizations} realizations on receivers {receivers}: "
          f"max sum DoF {worst} against bound {bound}; "
          f"violations {violations}; positive-deficiency trials {deficient}",
          file=sys.stderr)
    return 1 if violations else 0


if __name__ == "__main__":
    sys.exit(main())
