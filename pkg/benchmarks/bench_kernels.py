"""Compare the compiled set-basis kernels with the numpy fallback.

Run ``python3 benchmarks/bench_kernels.py [--levels 10] [--rows 32] [--repeat 5]``.
Each kernel is timed on a dyadic basis with a batch of random rows, and the
two backends are checked to agree before timing.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from weightlab import kernels
from weightlab.maximal import maximal
from weightlab.space import make_dyadic_space


def _cases(basis, rows: int, rng):
    csr, mass = basis.csr, basis.mass
    vals = rng.exponential(size=(rows, basis.n))
    setvals = rng.exponential(size=(rows, len(basis)))
    return {
        "set_sums": lambda b: kernels.set_sums(vals, mass, csr, backend=b),
        "set_lp_norms (p=3)": lambda b: kernels.set_lp_norms(vals, mass, csr, 1 / 3, backend=b),
        "scatter_max": lambda b: kernels.scatter_max(setvals, csr, backend=b)[0],
        "scatter_add": lambda b: kernels.scatter_add(setvals, csr, backend=b),
    }


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--levels", type=int, default=10)
    parser.add_argument("--rows", type=int, default=32)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if kernels.BACKEND != "compiled":
        raise SystemExit("compiled kernels are not available; build with `pip install -e . --no-build-isolation`")
    _, basis = make_dyadic_space(args.levels)
    rng = np.random.default_rng(0)
    print(f"dyadic({args.levels}): {basis.n} points, {len(basis)} sets, batch of {args.rows} rows")
    print(f"{'kernel':<22}{'compiled ms':>14}{'python ms':>14}{'speedup':>10}")
    for name, fn in _cases(basis, args.rows, rng).items():
        np.testing.assert_allclose(fn("compiled"), fn("python"), rtol=1e-12)
        fast = min(timeit.repeat(lambda: fn("compiled"), number=1, repeat=args.repeat)) * 1e3
        slow = min(timeit.repeat(lambda: fn("python"), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22}{fast:>14.3f}{slow:>14.3f}{slow / fast:>9.1f}x")
    f = rng.exponential(size=(args.rows, basis.n))
    t = min(timeit.repeat(lambda: maximal(f, basis), number=1, repeat=args.repeat)) * 1e3
    print(f"maximal operator end to end (active backend): {t:.3f} ms")


if __name__ == "__main__":
    main()
