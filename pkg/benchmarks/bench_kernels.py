"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each case is timed with both backends and the results are checked for
agreement before timings are reported.
"""

import argparse
import time

import numpy as np

from cliffpart import _pykernels
from cliffpart.kernels import backend_module
from cliffpart.potts import LatticeModel, _column_blocks, gamma_structure


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def multisum_args(n, p, q):
    gs = gamma_structure(n, p)
    sig = gs.sig
    blocks = _column_blocks(gs, LatticeModel(n, p, q, 0.3, 0.2), 0)
    pw = n ** np.arange(sig.ngen)
    coefs = np.array([c for c, _, _ in blocks])
    codes = np.array([int(np.dot(m.exponents, pw)) for _, m, _ in blocks])
    phases = np.array([m.phase.omega_exponent() or 0 for _, m, _ in blocks])
    return coefs, codes, phases, q, n, sig.ngen, np.array(sig.table)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        compiled = backend_module("compiled")
    except ImportError:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return

    print(f"{'kernel':<10} {'case':<18} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n, p, q in [(2, 3, 4), (2, 4, 4), (3, 3, 3), (4, 2, 4), (2, 4, 5)]:
        a, b = 0.3, -0.2
        tp, zp = best_of(lambda: _pykernels.brute_force_sum(n, p, q, a, b), args.repeat)
        tc, zc = best_of(lambda: compiled.brute_force_sum(n, p, q, a, b), args.repeat)
        assert abs(zp[0] - zc[0]) <= 1e-12 * abs(zp[0])
        print(f"{'brute':<10} {f'n={n} p={p} q={q}':<18} {tp:10.4f} {tc:11.4f} {tp / tc:8.1f}")
    for n, p, q in [(2, 2, 2), (2, 1, 4), (3, 1, 3), (2, 2, 3)]:
        ms = multisum_args(n, p, q)
        tp, rp = best_of(lambda: _pykernels.multisum_accumulate(*ms), args.repeat)
        tc, rc = best_of(lambda: compiled.multisum_accumulate(*ms), args.repeat)
        assert np.array_equal(rp[1], rc[1])
        assert np.allclose(rp[0], rc[0], rtol=1e-12, atol=1e-12 * np.abs(rp[0]).max())
        print(f"{'multisum':<10} {f'n={n} p={p} q={q}':<18} {tp:10.4f} {tc:11.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
