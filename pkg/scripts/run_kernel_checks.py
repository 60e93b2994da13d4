"""Growth-rate table for the ones-vector quadratic forms and the
Frobenius deficit.

Fits log-log slopes across doubling dimensions and marks each row
against its claimed bound (2(1-H) + 0.15 slack for the quadratic forms,
0.3 for the deficit).  The j = 1 derivative-kernel rows are the
interesting ones: their forms carry extra log n factors that the plain
power-law fit picks up as excess slope.
"""

import argparse

import numpy as np

from qwle.spectral import SpectralModel
from qwle.toeplitz import frobenius_deficit, ones_quadratic_rates


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--hurst", type=float, action="append", help="repeatable; default 0.2 0.5 0.8")
    parser.add_argument("--j", type=int, action="append", choices=(0, 1), help="repeatable; default both")
    parser.add_argument("--ns", type=int, action="append", help="repeatable; default 64 128 256 512")
    args = parser.parse_args()

    hursts = args.hurst or [0.2, 0.5, 0.8]
    js = sorted(set(args.j)) if args.j else [0, 1]
    ns = sorted(set(args.ns)) if args.ns else [64, 128, 256, 512]

    print(f"{'H':>5} {'j':>2} {'form':>9} {'slope':>8} {'bound':>7}  ok")
    for hurst in hursts:
        model = SpectralModel(hurst=hurst)
        for j in js:
            fits = ones_quadratic_rates(model, j, ns)
            for form, fit in fits.items():
                mark = "yes" if fit.passed else "NO"
                print(
                    f"{hurst:>5.2f} {j:>2d} {form:>9} {fit.fitted_slope:>8.4f} "
                    f"{fit.claimed_bound + 0.15:>7.4f}  {mark}"
                )

    print()
    print(f"{'H':>5} {'deficit(n)':>42} {'slope':>8}  ok")
    for hurst in hursts:
        model = SpectralModel(hurst=hurst)
        deficits = np.array([frobenius_deficit(model, n) for n in ns])
        if deficits.max() <= 1e-8:
            print(f"{hurst:>5.2f} {str([0.0] * len(ns)):>42} {'flat':>8}  yes")
            continue
        slope = float(np.polyfit(np.log(ns), np.log(deficits), 1)[0])
        shown = "[" + ", ".join(f"{d:.3f}" for d in deficits) + "]"
        mark = "yes" if slope <= 0.3 else "NO"
        print(f"{hurst:>5.2f} {shown:>42} {slope:>8.4f}  {mark}")


if __name__ == "__main__":
    main()
