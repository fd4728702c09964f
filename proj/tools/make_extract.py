#!/usr/bin/env python3
"""Build the bundled curve extracts under data/.

Reads Cremona's tables through PARI's elldata package and writes one curve per
isogeny class (the class member numbered 1) of rank 0 or 1 for each requested
conductor window. Cremona models are global minimal models; the rank is the
number of Mordell-Weil generators listed in the table.

Requires cypari2 and the elldata files, e.g. from the passagemath-pari-elldata
wheel:

    pip download --no-deps passagemath-pari-elldata
    python3 -m zipfile -e passagemath_pari_elldata-*.whl elldata
    tools/make_extract.py --datadir elldata/sage_wheels/share/pari \\
        --window 7500:10000 --out data/curves_7500_10000.csv \\
        --window 40000:45000 --out data/curves_40000_45000.csv
"""
import argparse
import sys

import cypari2


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--datadir", required=True,
                    help="PARI datadir containing elldata/")
    ap.add_argument("--window", action="append", required=True,
                    help="LO:HI conductor window (repeatable)")
    ap.add_argument("--out", action="append", required=True,
                    help="output CSV, one per --window")
    args = ap.parse_args()
    if len(args.out) != len(args.window):
        sys.exit("need one --out per --window")

    pari = cypari2.Pari()
    pari.allocatemem(2 * 10 ** 9)
    pari.default("datadir", args.datadir)

    for window, out in zip(args.window, args.out):
        lo, hi = (int(v) for v in window.split(":"))
        counts = [0, 0]
        with open(out, "w") as fh:
            fh.write(f"# Cremona curves with conductor in [{lo}, {hi}],"
                     " one per isogeny class, rank 0 or 1\n")
            fh.write("# generated by tools/make_extract.py from PARI elldata\n")
            fh.write("label,a1,a2,a3,a4,a6,conductor,rank\n")
            for n in range(lo, hi + 1):
                for entry in pari.ellsearch(n):
                    if int(pari.ellconvertname(entry[0])[2]) != 1:
                        continue
                    rank = len(entry[2])
                    if rank > 1:
                        continue
                    coeffs = ",".join(str(int(c)) for c in entry[1])
                    fh.write(f"{entry[0]},{coeffs},{n},{rank}\n")
                    counts[rank] += 1
        print(f"[{lo},{hi}]: rank0={counts[0]} rank1={counts[1]}", file=sys.stderr)


if __name__ == "__main__":
    main()
