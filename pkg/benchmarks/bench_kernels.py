"""Time the block kernels under the compiled and numpy backends.

    python benchmarks/bench_kernels.py [--repeat R]

Prints one line per kernel with the best-of-R wall time for each backend
and the speedup.  Results are also checked for agreement.
"""
import argparse
import sys
import timeit

import numpy as np

from msk import kernels

# the series engine mostly sums heads of about 1e3 terms; large blocks show
# the asymptotic per-term cost
BETA_SMALL = np.arange(1, 1025, dtype=float) ** -0.55
BETA_LARGE = np.arange(1, 1 << 18, dtype=float) ** -0.55
CASES = {
    "poisson 1e3": lambda k: k.poisson_block(1.5, 0.0, 1.0 - 2.0 ** -20, 1, 1025),
    "poisson 1e6": lambda k: k.poisson_block(1.5, 0.0, 1.0 - 2.0 ** -20, 1, 1 << 20),
    "chord_phi 1e3": lambda k: k.chord_phi_block(1.5, 0.0, 1.4, 0.0, 1.0, 1, 1025),
    "chord_phi 1e6": lambda k: k.chord_phi_block(1.5, 0.0, 1.4, 0.0, 1.0, 1, 1 << 20),
    "cv_partial 256": lambda k: k.cv_partial_sums(1.5, 1, 257, 64),
    "fbeta 1e3": lambda k: k.fbeta_block(1.5, 1000, 1, BETA_SMALL),
    "fbeta 2.6e5": lambda k: k.fbeta_block(1.5, 1000, 1, BETA_LARGE),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'kernel':<18}{'cython [ms]':>12}{'numpy [ms]':>12}{'speedup':>9}  agree")
    for name, call in CASES.items():
        times, values = {}, {}
        for label, mod in (("cython", kernels.compiled), ("numpy", kernels.python)):
            values[label] = np.asarray(call(mod))
            times[label] = min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat))
        agree = np.allclose(values["cython"], values["numpy"], rtol=1e-10, atol=0.0)
        print(f"{name:<18}{1e3 * times['cython']:>12.3f}{1e3 * times['numpy']:>12.3f}"
              f"{times['numpy'] / times['cython']:>9.1f}  {agree}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
