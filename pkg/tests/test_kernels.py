import os
import subprocess
import sys

import numpy as np
import pytest

from cliffpart import _pykernels
from cliffpart.kernels import backend_module


def active_backend(env_extra):
    env = dict(os.environ, **env_extra)
    proc = subprocess.run([sys.executable, "-c", "import cliffpart; print(cliffpart.BACKEND)"],
                          capture_output=True, text=True, env=env, check=True)
    return proc.stdout.strip()


def test_pure_switch_forces_fallback():
    assert active_backend({"CLIFFPART_PURE": "1"}) == "python"
    try:
        backend_module("compiled")
    except ImportError:
        pytest.skip("compiled extension not built")
    assert active_backend({"CLIFFPART_PURE": "0"}) == "compiled"


def test_backend_module_names():
    assert backend_module("python") is _pykernels
    with pytest.raises(ValueError):
        backend_module("fortran")


def test_brute_loop_oracle():
    """Plain nested loop over configurations, no vectorisation."""
    import itertools
    import math

    n, p, q, a, b = 3, 2, 2, 0.17, -0.23
    z = 0.0
    for cfg in itertools.product(range(n), repeat=p * q):
        s = np.array(cfg).reshape(p, q)
        e = 0.0
        for r in range(p):
            for c in range(q):
                e += 2 * a * math.cos(2 * math.pi * (s[r, (c + 1) % q] - s[r, c]) / n)
                e += 2 * b * math.cos(2 * math.pi * (s[(r + 1) % p, c] - s[r, c]) / n)
        z += math.exp(e)
    for mod in {_pykernels, backend_module()}:
        got, count = mod.brute_force_sum(n, p, q, a, b)
        assert count == n ** (p * q) and got == pytest.approx(z, rel=1e-13)


def test_multisum_accumulate_single_factor():
    # q = 1: the accumulator is just the scattered coefficients
    tab = np.array([[0, 1], [1, 0]])
    coefs = np.array([1.0, 2.0, 3.0j])
    codes = np.array([0, 3, 3])
    phases = np.array([0, 1, 0])
    for mod in {_pykernels, backend_module()}:
        acc, counts = mod.multisum_accumulate(coefs, codes, phases, 1, 2, 2, tab)
        assert acc.shape == (4, 2) and acc[0, 0] == 1 and acc[3, 1] == 2 and acc[3, 0] == 3j
        assert counts[3].sum() == 2


def test_multisum_accumulate_pair_phase():
    # g1 * g2 followed by g2 * g1 style reordering: one swap of anticommuting letters
    tab = np.array([[0, 1], [1, 0]])
    coefs = np.array([1.0, 1.0])
    codes = np.array([1, 2])  # g1 and g2 in base-2 exponent coding
    phases = np.array([0, 0])
    for mod in {_pykernels, backend_module()}:
        acc, _ = mod.multisum_accumulate(coefs, codes, phases, 2, 2, 2, tab)
        # g1 g1 = 1, g2 g2 = 1, g1 g2 normal, g2 g1 = -g1 g2
        assert acc[0, 0] == 2
        assert acc[3, 0] == 1 and acc[3, 1] == 1
