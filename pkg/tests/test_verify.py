from functools import reduce

import numpy as np
import pytest

from cliffpart.identities import expected_phases, printed_phases, representation_identities
from cliffpart.verify import DEFAULT_SEED, SUITES, random_words, run_suites


def paulis(n):
    """Independent construction: shift, clock, and their scaled product."""
    w = np.exp(2j * np.pi / n)
    xi = np.exp(1j * np.pi / n)
    s1 = np.zeros((n, n))
    for i in range(n):
        s1[i, (i + 1) % n] = 1
    s3 = np.diag([w**i for i in range(n)])
    s2 = s1 @ s3 if n % 2 else s1 @ s3 / xi
    return s1, s2, s3


def find_phase(n, lhs, rhs):
    """Return e with lhs == xi**e rhs, or None."""
    for e in range(2 * n):
        if np.allclose(lhs, np.exp(1j * np.pi * e / n) * rhs, atol=1e-10):
            return e
    return None


@pytest.mark.parametrize("n", range(2, 8))
def test_pauli_phases_against_direct_search(n):
    s1, s2, s3 = paulis(n)
    mp = np.linalg.matrix_power
    exp = expected_phases(n, 1)
    assert find_phase(n, s3, mp(s1, n - 1) @ s2) == exp["s3 = s1^(n-1) s2"]
    assert find_phase(n, mp(s3, n - 1) @ s2, s1) == exp["s3^(n-1) s2 = . s1"]
    assert find_phase(n, mp(s2, n - 1) @ s1, np.linalg.inv(s3)) == exp["s2^(n-1) s1 = . s3^-1"]


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("p", [1, 2, 3])
def test_gamma_phases_against_direct_search(n, p):
    s1, s2, s3 = paulis(n)
    eye = np.eye(n)
    kron = lambda ms: reduce(np.kron, ms)
    mp = np.linalg.matrix_power
    g = [kron([s1] * k + [s3] + [eye] * (p - k - 1)) for k in range(p)]
    gb = [kron([s1] * k + [s2] + [eye] * (p - k - 1)) for k in range(p)]
    X0 = kron([s1] + [eye] * (p - 1))
    Z = [kron([eye] * k + [s3] + [eye] * (p - k - 1)) for k in range(p)]
    U = kron([s1] * p) * np.exp(-2j * np.pi / n)
    exp = {k: v % (2 * n) for k, v in expected_phases(n, p).items()}
    assert find_phase(n, X0, mp(g[0], n - 1) @ gb[0]) == exp["X_k = . g_k^(n-1) gb_k"]
    if p > 1:
        assert find_phase(n, np.linalg.inv(Z[0]) @ Z[1], mp(gb[0], n - 1) @ g[1]) == \
            exp["Z_k^-1 Z_k+1 = . gb_k^(n-1) g_k+1"]
    assert find_phase(n, np.linalg.inv(Z[-1]) @ Z[0], U @ mp(gb[-1], n - 1) @ g[0]) == \
        exp["Z_p^-1 Z_1 = . U gb_p^(n-1) g_1"]
    core = reduce(np.matmul, [mp(g[k], n - 1) @ gb[k] for k in range(p)])
    assert find_phase(n, U, core) == exp["U = . prod g_k^(n-1) gb_k"]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_representation_identities_hold(n, p):
    checks = representation_identities(n, p)
    assert checks and all(c.deviation < 1e-10 for c in checks)


def test_quoted_phases_that_fail():
    def failing(n, p):
        return sorted({c.name for c in representation_identities(n, p) if not c.matches_printed})

    # odd n: the wrap-around bond, plus the global U phase unless n divides p + 1
    assert failing(3, 1) == ["U = . prod g_k^(n-1) gb_k", "Z_p^-1 Z_1 = . U gb_p^(n-1) g_1"]
    assert failing(3, 2) == ["Z_p^-1 Z_1 = . U gb_p^(n-1) g_1"]
    # even n additionally has the interior bond and the s2/s3 relation off
    assert failing(4, 2) == [
        "U = . prod g_k^(n-1) gb_k",
        "Z_k^-1 Z_k+1 = . gb_k^(n-1) g_k+1",
        "Z_p^-1 Z_1 = . U gb_p^(n-1) g_1",
        "s2^(n-1) s1 = . s3^-1",
    ]
    assert set(printed_phases(3, 2)) == set(expected_phases(3, 2))


def test_random_words_are_seeded_and_bounded():
    w1, w2 = random_words(7, 50), random_words(7, 50)
    assert w1 == w2 and len(w1) == 50
    for n, p, word in w1:
        assert 2 <= n <= 4 and 1 <= p <= 3 and len(word) <= 9 * n
        assert all(0 <= g < 2 * p for g in word)


def test_all_suites_pass_with_default_seed():
    results = run_suites(DEFAULT_SEED)
    assert [r.name for r in results] == list(SUITES)
    for r in results:
        assert r.passed, (r.name, r.failures)
        assert r.max_deviation <= r.tolerance and r.cases > 0


def test_suites_are_deterministic():
    a = [r.to_dict() for r in run_suites(11, ["trace", "closed_form", "multisum"])]
    b = [r.to_dict() for r in run_suites(11, ["trace", "closed_form", "multisum"])]
    assert a == b


def test_closed_form_suite_covers_both_phases():
    (r,) = run_suites(DEFAULT_SEED, ["closed_form"])
    assert r.cases == 30
    assert "high-temperature side cases: 15, low-temperature side cases: 15" in r.notes[0]


@pytest.mark.parametrize("fault", [(0, 1), (1, 3)])
def test_injected_fault_is_detected(fault):
    results = {r.name: r for r in run_suites(DEFAULT_SEED, ["trace", "representation", "multisum"], fault)}
    assert not results["representation"].passed
    assert not results["trace"].passed
    assert any("pair (" in f for f in results["representation"].failures)


def test_tolerance_override_can_fail_a_suite():
    (r,) = run_suites(DEFAULT_SEED, ["decomposition"], tolerances={"decomposition": 1e-30})
    assert not r.passed and r.tolerance == 1e-30
