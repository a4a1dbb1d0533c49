import itertools
from functools import reduce

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.linalg import expm

from cliffpart.errors import (
    CapacityError,
    InvalidInputError,
    InvalidOrderError,
    PreconditionError,
)
from cliffpart.gca import (
    AlgebraElement,
    AlgebraSignature,
    commutation_table,
    exp_unit_monomial,
    gamma_rep,
    k_signum,
    matrix_trace,
    monomial_mul,
    parse_label,
    pauli,
    theorem_term_count,
    theta_order,
    to_matrix,
    trace_normal_form,
    trace_theorem,
)
from cliffpart.phase import PhaseExponent, omega


@st.composite
def sig_and_word(draw, max_n=4, max_p=3, max_len=12):
    n = draw(st.integers(2, max_n))
    p = draw(st.integers(1, max_p))
    word = draw(st.lists(st.integers(0, 2 * p - 1), max_size=max_len))
    return n, p, word


@st.composite
def tuple_words(draw):
    """Words made of shuffled n-tuples, so the trace can be nonzero."""
    n = draw(st.integers(2, 4))
    p = draw(st.integers(1, 3))
    gens = draw(st.lists(st.integers(0, 2 * p - 1), max_size=4))
    word = [g for g in gens for _ in range(n)]
    word = draw(st.permutations(word)) if word else []
    return n, p, list(word)


def dense_product(sig, word):
    mats = gamma_rep(sig)
    return reduce(np.matmul, [mats[i] for i in word], np.eye(sig.dim, dtype=complex))


def sign_by_bubble_sort(n, perm):
    """Oracle for K: sort the formal symbols, one omega**-1 per adjacent swap."""
    seq = list(perm)
    swaps = 0
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                swaps += 1
    return omega(n) ** (-swaps)


@pytest.mark.parametrize("n", range(2, 8))
def test_pauli_orders_and_clock_shift_relation(n):
    s1, s2, s3 = (pauli(n, w) for w in ("s1", "s2", "s3"))
    eye = np.eye(n)
    for s in (s1, s2, s3):
        assert np.allclose(np.linalg.matrix_power(s, n), eye)
    # s1 s3 = omega s3 s1
    assert np.allclose(s1 @ s3, omega(n) * s3 @ s1)
    assert s1[0, 1] == 1 and s1[n - 1, 0] == 1


def test_pauli_rejects_bad_input():
    with pytest.raises(InvalidOrderError):
        pauli(1, "s1")
    with pytest.raises(InvalidInputError):
        pauli(3, "s4")


@pytest.mark.parametrize("n,p", [(2, 1), (2, 3), (3, 2), (4, 2), (5, 2), (3, 3)])
def test_table_matches_dense_commutators(n, p):
    sig = AlgebraSignature(n, p)
    mats = gamma_rep(sig)
    tab = commutation_table(sig)
    w = omega(n)
    for i, j in itertools.product(range(2 * p), repeat=2):
        assert np.allclose(mats[i] @ mats[j], w ** tab[i, j] * mats[j] @ mats[i], atol=1e-12)
        assert (tab[i, j] + tab[j, i]) % n == 0


def test_table_known_values():
    # first row: gamma_1 against everything else is omega**(n-1)
    sig = AlgebraSignature(3, 2)
    assert sig.table == ((0, 2, 2, 2), (1, 0, 1, 2), (1, 2, 0, 2), (1, 1, 1, 0))


@pytest.mark.parametrize("n", range(2, 8))
@pytest.mark.parametrize("p", range(1, 5))
def test_theta_order_is_uniform(n, p):
    sig = AlgebraSignature(n, p)
    order = theta_order(sig)
    assert sorted(order) == list(range(2 * p))
    if n > 2:
        for a, b in itertools.combinations(order, 2):
            assert sig.table[a][b] == 1


@given(sig_and_word())
def test_normal_form_matches_matrix_product(data):
    n, p, word = data
    sig = AlgebraSignature(n, p)
    assert np.allclose(to_matrix(sig, sig.word(word)), dense_product(sig, word), atol=1e-10)


@given(sig_and_word(max_len=6), st.lists(st.integers(0, 5), max_size=6), st.lists(st.integers(0, 5), max_size=6))
def test_monomial_mul_associative(data, w2, w3):
    n, p, w1 = data
    sig = AlgebraSignature(n, p)
    a, b, c = (sig.word([x % (2 * p) for x in w]) for w in (w1, w2, w3))
    assert monomial_mul(sig, monomial_mul(sig, a, b), c) == monomial_mul(sig, a, monomial_mul(sig, b, c))


@given(sig_and_word(max_len=8))
def test_inverse_and_power(data):
    n, p, word = data
    sig = AlgebraSignature(n, p)
    m = sig.word(word)
    assert sig.mul(m, sig.inverse(m)) == sig.identity()
    assert sig.mul(sig.inverse(m), m) == sig.identity()
    assert np.allclose(to_matrix(sig, sig.power(m, 3)), np.linalg.matrix_power(to_matrix(sig, m), 3))


@given(st.one_of(sig_and_word(), tuple_words()))
def test_three_trace_evaluators_agree(data):
    n, p, word = data
    assume(theorem_term_count(n, word) <= 20000)
    sig = AlgebraSignature(n, p)
    tn = trace_normal_form(sig, sig.word(word)).to_complex()
    tt = trace_theorem(sig, word).to_complex()
    tm = matrix_trace(sig, word)
    assert abs(tn - tm) < 1e-12 and abs(tt - tm) < 1e-12


@pytest.mark.parametrize("n,p,word,expected", [
    (2, 1, [0, 0], 1),
    (3, 2, [0, 1, 0], 0),
    (3, 1, [0, 0, 0], 1),
    (2, 2, [0, 1, 0, 1], -1),
    (2, 2, [0, 1, 2, 3, 0, 1, 2, 3], 1),
])
def test_trace_examples(n, p, word, expected):
    sig = AlgebraSignature(n, p)
    assert abs(trace_theorem(sig, word).to_complex() - expected) < 1e-12
    assert abs(matrix_trace(sig, word) - expected) < 1e-12


def test_trace_is_zero_unless_counts_divisible():
    sig = AlgebraSignature(3, 2)
    assert trace_theorem(sig, [0, 1, 2]).is_zero
    assert trace_theorem(sig, [0, 0, 0, 1]).is_zero
    assert trace_theorem(sig, []) == PhaseExponent.one(3)


def test_theorem_guard():
    sig = AlgebraSignature(2, 1)
    word = [0] * 20
    assert theorem_term_count(2, word) == 654729075
    with pytest.raises(CapacityError):
        trace_theorem(sig, word)
    assert trace_theorem(sig, [0] * 10, guard=10**6) == PhaseExponent.one(2)


def test_dense_guard():
    sig = AlgebraSignature(4, 7)
    with pytest.raises(CapacityError):
        gamma_rep(sig)
    with pytest.raises(CapacityError):
        to_matrix(sig, sig.generator(0))


@pytest.mark.parametrize("perm", list(itertools.permutations(range(5))))
def test_k_is_sign_for_n2(perm):
    inv = sum(1 for i, j in itertools.combinations(range(5), 2) if perm[i] > perm[j])
    assert k_signum(2, perm).to_complex().real == (-1) ** inv


@given(st.integers(2, 7), st.permutations(list(range(6))))
def test_k_matches_bubble_sort(n, perm):
    assert abs(k_signum(n, perm).to_complex() - sign_by_bubble_sort(n, perm)) < 1e-12


def test_k_accepts_one_based_and_rejects_junk():
    assert k_signum(3, [2, 1]) == k_signum(3, [1, 0])
    with pytest.raises(InvalidInputError):
        k_signum(3, [0, 0, 1])


@pytest.mark.parametrize("n,p", [(2, 2), (3, 2), (4, 1), (5, 1)])
def test_exp_unit_monomial_matches_expm(n, p):
    sig = AlgebraSignature(n, p)
    rng = np.random.default_rng(n * 10 + p)
    checked = 0
    for _ in range(40):
        u = sig.word(list(rng.integers(0, 2 * p, size=int(rng.integers(1, 4)))))
        if sig.power(u, n) != sig.identity():
            continue
        c = complex(*rng.normal(size=2))
        got = to_matrix(sig, exp_unit_monomial(sig, c, u))
        assert np.allclose(got, expm(c * to_matrix(sig, u)), atol=1e-10)
        checked += 1
    assert checked >= 5


def test_exp_unit_monomial_precondition():
    sig4 = AlgebraSignature(4, 1)
    # (xi * g)**4 = xi**4 = -1
    with pytest.raises(PreconditionError):
        exp_unit_monomial(sig4, 1.0, sig4.generator(0).scaled(PhaseExponent.xi_pow(4, 1)))
    sig2 = AlgebraSignature(2, 1)
    # (g1 gb1)**2 = -1
    with pytest.raises(PreconditionError):
        exp_unit_monomial(sig2, 1.0, sig2.word([0, 1]))


@given(sig_and_word(max_n=3, max_p=2, max_len=5), sig_and_word(max_n=3, max_p=2, max_len=5))
def test_element_arithmetic_matches_matrices(d1, d2):
    n, p, w1 = d1
    w2 = [x % (2 * p) for x in d2[2]]
    sig = AlgebraSignature(n, p)
    x = AlgebraElement.from_monomial(sig, sig.word(w1), 0.5 - 1j) + AlgebraElement.scalar(sig, 2.0)
    y = AlgebraElement.from_monomial(sig, sig.word(w2), 1.5) - AlgebraElement.scalar(sig, 0.25j)
    X, Y = to_matrix(sig, x), to_matrix(sig, y)
    assert np.allclose(to_matrix(sig, x * y), X @ Y)
    assert np.allclose(to_matrix(sig, 3 * x), 3 * X)
    assert abs((x * y).normalized_trace() - np.trace(X @ Y) / sig.dim) < 1e-10


def test_labels():
    sig = AlgebraSignature(3, 2)
    assert [parse_label(sig, s) for s in ("g1", "g2", "g3", "g4", "gb1", "gb2", "GB2")] == [0, 1, 2, 3, 2, 3, 3]
    for bad in ("g0", "g5", "gb3", "x1", "g"):
        with pytest.raises(InvalidInputError):
            parse_label(sig, bad)


def test_fault_hook_breaks_table_consistency():
    sig = AlgebraSignature(3, 2, fault=(0, 1))
    good = AlgebraSignature(3, 2)
    assert sig.table[0][1] == (good.table[0][1] + 1) % 3
    assert sig.table[1][0] == (good.table[1][0] - 1) % 3
    assert sig != good and hash(good) == hash(AlgebraSignature(3, 2))
