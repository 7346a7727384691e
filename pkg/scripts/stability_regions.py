"""Boundary loci and region areas of FBDF2 for a list of alpha values.

Writes ``locus_alpha{a}.csv`` (theta, re, im) per alpha and ``areas.csv``
with the enclosed area, the stability-region area inside the plotting
window and the truncation sensitivity.
"""

import argparse
from pathlib import Path

from rfaded.io import write_csv, write_sidecar
from rfaded.stability import boundary_locus, enclosed_area, locus_sensitivity, stability_region_area

WINDOW = (-2.0, 6.0, -4.0, 4.0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, action="append", dest="alphas")
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--n-theta", type=int, default=4096)
    ap.add_argument("--out-dir", type=Path, default=Path("results/stability"))
    args = ap.parse_args(argv)
    alphas = args.alphas or [0.4, 0.6, 0.8, 1.0]

    rows = []
    for a in alphas:
        loc = boundary_locus(a, args.n, args.n_theta)
        path = args.out_dir / f"locus_alpha{a:g}.csv"
        write_csv(path, ["theta", "re", "im"], loc.points)
        write_sidecar(path, {"alpha": a, "n": args.n, "n_theta": args.n_theta})
        sens = locus_sensitivity(a, args.n, args.n_theta)
        rows.append((a, enclosed_area(loc), stability_region_area(loc, WINDOW), sens))
        print(f"alpha={a:g}: enclosed {rows[-1][1]:.4f}, region in window {rows[-1][2]:.4f}, sensitivity {sens:.3g}")
    path = args.out_dir / "areas.csv"
    write_csv(path, ["alpha", "enclosed_area", "region_area", "sensitivity"], rows)
    write_sidecar(path, {"alphas": alphas, "n": args.n, "n_theta": args.n_theta, "window": list(WINDOW)})


if __name__ == "__main__":
    main()
