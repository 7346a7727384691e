"""FBDF2 weights varpi_k for the orders shown in the weight plots (0.3 and 0.7)."""

import argparse
from pathlib import Path

from rfaded.io import write_csv, write_sidecar
from rfaded.weights import fbdf2_weights


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, action="append", dest="alphas")
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--out", type=Path, default=Path("results/fbdf2_weights.csv"))
    args = ap.parse_args(argv)
    alphas = args.alphas or [0.3, 0.7]

    cols = [fbdf2_weights(a, args.count).coeffs for a in alphas]
    write_csv(args.out, ["k"] + [f"alpha{a:g}" for a in alphas], ([k] + [c[k] for c in cols] for k in range(args.count)))
    write_sidecar(args.out, {"alphas": alphas, "count": args.count})
    print(f"wrote {args.count} weights for alpha in {alphas} to {args.out}")


if __name__ == "__main__":
    main()
