"""Regenerate the bundled test fixture path.

The fixture is one simulated level series (white-noise case H = 0.5,
sigma = 1, no drift, n = 4096) with the seed recorded in the file name,
written in the same one-column CSV format the CLI consumes.
"""

import argparse
import pathlib

import numpy as np

from qwle.simulate import ModelSpec, path_levels

DEFAULT_DIR = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--hurst", type=float, default=0.5)
    parser.add_argument("--sigma", type=float, default=1.0)
    parser.add_argument("--n", type=int, default=4096)
    parser.add_argument("--seed", type=int, default=20240501)
    parser.add_argument("--out-dir", type=pathlib.Path, default=DEFAULT_DIR)
    args = parser.parse_args()

    spec = ModelSpec(hurst=args.hurst, sigma=args.sigma, n=args.n, seed=args.seed)
    levels = path_levels(spec)
    tag = f"h{args.hurst:0.2f}".replace(".", "") + f"_n{args.n}_seed{args.seed}"
    target = args.out_dir / f"levels_{tag}.csv"
    target.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(target, levels, fmt="%.17g", delimiter=",", header="level", comments="")
    print(f"wrote {target} ({levels.size} rows)")


if __name__ == "__main__":
    main()
