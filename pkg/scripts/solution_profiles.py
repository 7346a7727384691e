"""Plot data for the solution profiles at T = 1 of the two bundled examples.

Each profile set is one CSV with columns (param, value, x, numeric, exact);
``param`` names the order that is swept and ``value`` its setting.
"""

import argparse
from pathlib import Path

from rfaded.experiments import example_problem
from rfaded.io import write_csv, write_sidecar
from rfaded.solver import solve

# name -> (example, swept parameter, values, fixed gamma/alpha/beta)
PROFILE_SETS = {
    "example1_alpha0.1": (1, "alpha", [0.1], dict(gamma=0.7, beta=1.9)),
    "example2_alpha0.8": (2, "alpha", [0.8], dict(gamma=0.7, beta=1.2)),
    "example2_alpha_sweep": (2, "alpha", [0.1, 0.7, 0.9, 0.95, 0.99], dict(gamma=0.3, beta=1.2)),
    "example2_beta_sweep": (2, "beta", [1.1, 1.6, 1.9, 2.0], dict(gamma=0.7, alpha=0.9)),
    "example2_gamma_sweep": (2, "gamma", [0.1, 0.3, 0.5, 0.7, 0.9], dict(alpha=0.8, beta=1.2)),
}


def profile(example, orders, M):
    prob = example_problem(example)
    spec = prob.spec(orders["gamma"], orders["alpha"], orders["beta"])
    mesh = spec.mesh(M, M)
    field = solve(spec, mesh)
    x = mesh.x
    return x, field.values[-1], prob.exact(x, spec.T, orders["gamma"])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--M", type=int, default=64)
    ap.add_argument("--out-dir", type=Path, default=Path("results/profiles"))
    ap.add_argument("--set", action="append", dest="sets", choices=sorted(PROFILE_SETS))
    args = ap.parse_args(argv)

    for name in args.sets or sorted(PROFILE_SETS):
        example, param, values, fixed = PROFILE_SETS[name]
        rows, worst = [], 0.0
        for v in values:
            orders = dict(fixed, **{param: v})
            x, num, ex = profile(example, orders, args.M)
            worst = max(worst, float(abs(num - ex).max()))
            rows.extend((param, v, xi, ni, ei) for xi, ni, ei in zip(x, num, ex))
        path = args.out_dir / f"{name}.csv"
        write_csv(path, ["param", "value", "x", "numeric", "exact"], rows)
        write_sidecar(path, {"example": example, "param": param, "values": values, "fixed": fixed, "M": args.M})
        print(f"{name}: example {example}, {param} in {values}, max |numeric - exact| at T=1 {worst:.3e}")


if __name__ == "__main__":
    main()
