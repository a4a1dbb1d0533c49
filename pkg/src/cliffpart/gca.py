"""The generalized Clifford algebra on ``2p`` generators of order ``n``.

Generators are indexed ``0 .. 2p-1`` in the fixed order
``gamma_1 .. gamma_p, gammabar_1 .. gammabar_p``.  The faithful
representation is the tensor product of generalized Pauli matrices::

    gamma_k    = s1 x ... x s1 x s3 x I x ... x I     (s3 on site k)
    gammabar_k = s1 x ... x s1 x s2 x I x ... x I     (s2 on site k)

Commutation phases ``G_i G_j = omega**c[i][j] G_j G_i`` are read off the
matrices (site by site, since a tensor product commutes factorwise), never
typed in by hand.  Symbolic work happens on normal-ordered monomials
``phase * g_0**e_0 ... g_{2p-1}**e_{2p-1}``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapacityError,
    IncompatibleOrderError,
    InvalidInputError,
    InvalidOrderError,
    PreconditionError,
    RepresentationError,
)
from .phase import PhaseExponent, gen_hyperbolic, omega, phase_modulus, xi

__all__ = [
    "DEFAULT_DENSE_GUARD",
    "DEFAULT_THEOREM_GUARD",
    "pauli",
    "AlgebraSignature",
    "GammaMonomial",
    "AlgebraElement",
    "gamma_rep",
    "commutation_table",
    "monomial_mul",
    "trace_normal_form",
    "matrix_trace",
    "k_signum",
    "trace_theorem",
    "theorem_term_count",
    "theta_order",
    "exp_unit_monomial",
    "to_matrix",
    "parse_label",
]

DEFAULT_DENSE_GUARD = 4096
DEFAULT_THEOREM_GUARD = 200_000


def pauli(n: int, which: str) -> np.ndarray:
    """Generalized Pauli matrix ``s1``, ``s2`` or ``s3`` of size ``n``.

    ``s1`` is the cyclic shift ``(delta_{i+1,j})`` and ``s3`` the clock
    ``diag(omega**i)``.  ``s2`` is the shift-clock product ``s1 @ s3`` for odd
    ``n`` and ``xi**-1 * s1 @ s3`` for even ``n``; the ``xi`` factor is what
    makes ``s2**n == I`` when ``n`` is even.
    """
    if n < 2:
        raise InvalidOrderError(f"order n must be >= 2, got {n}")
    s1 = np.roll(np.eye(n, dtype=complex), 1, axis=1)
    w = np.exp(2j * np.pi * np.arange(n) / n)
    s3 = np.diag(w)
    if which in ("s1", "1", 1):
        return s1
    if which in ("s3", "3", 3):
        return s3
    if which in ("s2", "2", 2):
        s2 = s1 @ s3
        return s2 if n % 2 else s2 / xi(n)
    raise InvalidInputError(f"unknown Pauli matrix {which!r}")


@dataclass(frozen=True)
class GammaMonomial:
    """``phase * g_0**e_0 * ... * g_{2p-1}**e_{2p-1}`` in normal order."""

    exponents: tuple[int, ...]
    phase: PhaseExponent

    @property
    def n(self) -> int:
        return self.phase.n

    def is_scalar(self) -> bool:
        return not any(self.exponents)

    def scaled(self, ph: PhaseExponent) -> GammaMonomial:
        return GammaMonomial(self.exponents, self.phase * ph)


class AlgebraSignature:
    """Order ``n``, column count ``p`` and the derived commutation data.

    ``fault`` is a test hook: a generator pair whose commutation phase is
    deliberately corrupted after derivation, so that verification suites can
    be shown to catch it.
    """

    def __init__(self, n: int, p: int, fault: tuple[int, int] | None = None):
        if n < 2:
            raise InvalidOrderError(f"order n must be >= 2, got {n}")
        if p < 1:
            raise InvalidInputError(f"p must be >= 1, got {p}")
        self.n = int(n)
        self.p = int(p)
        self.odd = bool(n % 2)
        self.L = phase_modulus(n)
        self.step = self.L // self.n
        self.fault = fault
        # factor codes per generator and site: 0=I, 1=s1, 2=s2, 3=s3
        codes = np.zeros((2 * p, p), dtype=np.int8)
        for k in range(p):
            codes[k, :k] = 1
            codes[k, k] = 3
            codes[p + k, :k] = 1
            codes[p + k, k] = 2
        self.site_codes = codes
        eye = np.eye(n, dtype=complex)
        self._site_mats = (eye, pauli(n, "s1"), pauli(n, "s2"), pauli(n, "s3"))
        self.table = _derive_table(self)
        if fault is not None:
            i, j = fault
            t = [list(r) for r in self.table]
            t[i][j] = (t[i][j] + 1) % n
            t[j][i] = (t[j][i] - 1) % n
            self.table = tuple(tuple(r) for r in t)
        self.labels = tuple(f"g{k + 1}" for k in range(p)) + tuple(
            f"gb{k + 1}" for k in range(p)
        )

    @property
    def ngen(self) -> int:
        return 2 * self.p

    @property
    def dim(self) -> int:
        return self.n**self.p

    def __repr__(self) -> str:
        return f"AlgebraSignature(n={self.n}, p={self.p})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraSignature)
            and (self.n, self.p, self.fault) == (other.n, other.p, other.fault)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.p, self.fault))

    # phase helpers
    def w(self, k: int) -> PhaseExponent:
        return PhaseExponent.omega_pow(self.n, k)

    def one(self) -> PhaseExponent:
        return PhaseExponent.one(self.n)

    # monomial constructors
    def identity(self) -> GammaMonomial:
        return GammaMonomial((0,) * self.ngen, self.one())

    def generator(self, i: int) -> GammaMonomial:
        if not 0 <= i < self.ngen:
            raise InvalidInputError(f"generator index {i} out of range for p={self.p}")
        e = [0] * self.ngen
        e[i] = 1
        return GammaMonomial(tuple(e), self.one())

    def word(self, indices: Iterable[int]) -> GammaMonomial:
        """Normal form of the product ``g_{i1} g_{i2} ...``."""
        m = self.identity()
        for i in indices:
            m = monomial_mul(self, m, self.generator(i))
        return m

    def mul(self, *ms: GammaMonomial) -> GammaMonomial:
        return reduce(lambda x, y: monomial_mul(self, x, y), ms, self.identity())

    def power(self, m: GammaMonomial, k: int) -> GammaMonomial:
        if k < 0:
            return self.power(self.inverse(m), -k)
        out = self.identity()
        for _ in range(k):
            out = monomial_mul(self, out, m)
        return out

    def inverse(self, m: GammaMonomial) -> GammaMonomial:
        bare = GammaMonomial(tuple((-e) % self.n for e in m.exponents), self.one())
        prod = monomial_mul(self, m, bare)  # = phase' * identity
        return bare.scaled(prod.phase.inverse())

    def matrices(self, guard: int = DEFAULT_DENSE_GUARD) -> list[np.ndarray]:
        return gamma_rep(self, guard)

    def site_matrix(self, code: int) -> np.ndarray:
        return self._site_mats[code]


def _phase_between(x: np.ndarray, y: np.ndarray) -> complex:
    """Scalar ``c`` with ``x == c * y``; raises if none exists."""
    idx = np.unravel_index(np.argmax(np.abs(y)), y.shape)
    if abs(y[idx]) < 1e-12:
        raise RepresentationError("reference matrix vanishes")
    c = x[idx] / y[idx]
    if not np.allclose(x, c * y, atol=1e-10, rtol=0):
        raise RepresentationError("matrices are not proportional")
    return complex(c)


def _derive_table(sig: AlgebraSignature) -> tuple[tuple[int, ...], ...]:
    n = sig.n
    w = omega(n)
    mats = sig._site_mats
    m = sig.ngen
    tab = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            c = 1 + 0j
            for s in range(sig.p):
                a = mats[sig.site_codes[i, s]]
                b = mats[sig.site_codes[j, s]]
                c *= _phase_between(a @ b, b @ a)
            k = round(np.angle(c) / (2 * np.pi / n)) % n
            if abs(w**k - c) > 1e-10:
                raise RepresentationError(
                    f"generators {sig.labels[i] if hasattr(sig, 'labels') else i}, "
                    f"{j}: commutation phase {c!r} is not an n-th root of unity"
                )
            tab[i][j] = k
    return tuple(tuple(r) for r in tab)


def commutation_table(sig: AlgebraSignature) -> np.ndarray:
    """Integer table ``c`` with ``G_i G_j = omega**c[i, j] G_j G_i``."""
    return np.array(sig.table, dtype=np.int64)


def gamma_rep(sig: AlgebraSignature, guard: int = DEFAULT_DENSE_GUARD) -> list[np.ndarray]:
    """Dense matrices ``[gamma_1..gamma_p, gammabar_1..gammabar_p]``."""
    if sig.dim > guard:
        raise CapacityError("dense representation dimension", sig.dim, guard)
    out = []
    for g in range(sig.ngen):
        out.append(reduce(np.kron, [sig.site_matrix(c) for c in sig.site_codes[g]]))
    return out


def monomial_mul(sig: AlgebraSignature, m1: GammaMonomial, m2: GammaMonomial) -> GammaMonomial:
    """Normal form of ``m1 * m2``.

    Moving ``g_j**b`` (from ``m2``) left past ``g_i**a`` (from ``m1``) for
    every ``i > j`` picks up ``omega**(c[i][j] * a * b)``.
    """
    if m1.phase.n != m2.phase.n or m1.phase.n != sig.n:
        raise IncompatibleOrderError("monomials belong to different algebras")
    e1, e2 = m1.exponents, m2.exponents
    tab = sig.table
    acc = 0
    for i in range(1, len(e1)):
        a = e1[i]
        if a:
            row = tab[i]
            for j in range(i):
                b = e2[j]
                if b:
                    acc += row[j] * a * b
    n = sig.n
    exps = tuple((x + y) % n for x, y in zip(e1, e2))
    ph = m1.phase * m2.phase * PhaseExponent(n, acc * sig.step)
    return GammaMonomial(exps, ph)


class AlgebraElement:
    """Finite sparse sum of normal-form monomials with complex coefficients.

    Monomial phases are folded into the coefficients, so ``terms`` maps an
    exponent vector straight to a complex number.
    """

    PRUNE = 1e-14

    def __init__(self, sig: AlgebraSignature, terms: dict | None = None):
        self.sig = sig
        self.terms: dict[tuple[int, ...], complex] = dict(terms or {})
        self._prune()

    @classmethod
    def from_monomial(cls, sig, m: GammaMonomial, coeff: complex = 1.0) -> AlgebraElement:
        return cls(sig, {m.exponents: coeff * m.phase.to_complex()})

    @classmethod
    def scalar(cls, sig, c: complex) -> AlgebraElement:
        return cls(sig, {(0,) * sig.ngen: complex(c)})

    def _prune(self) -> None:
        if not self.terms:
            return
        top = max(abs(v) for v in self.terms.values())
        cut = self.PRUNE * top
        self.terms = {k: v for k, v in self.terms.items() if abs(v) > cut}

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return AlgebraElement(self.sig, out)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return self + other * -1.0

    def __mul__(self, other) -> AlgebraElement:
        if not isinstance(other, AlgebraElement):
            return AlgebraElement(self.sig, {k: v * other for k, v in self.terms.items()})
        sig = self.sig
        one = sig.one()
        out: dict[tuple[int, ...], complex] = {}
        for k1, v1 in self.terms.items():
            m1 = GammaMonomial(k1, one)
            for k2, v2 in other.terms.items():
                m = monomial_mul(sig, m1, GammaMonomial(k2, one))
                out[m.exponents] = out.get(m.exponents, 0) + v1 * v2 * m.phase.to_complex()
        return AlgebraElement(sig, out)

    __rmul__ = __mul__

    def normalized_trace(self) -> complex:
        """Normalized trace: the coefficient of the identity monomial."""
        return self.terms.get((0,) * self.sig.ngen, 0j)

    def to_matrix(self, guard: int = DEFAULT_DENSE_GUARD) -> np.ndarray:
        return to_matrix(self.sig, self, guard)


def _monomial_matrix(sig: AlgebraSignature, exps: Sequence[int], guard: int) -> np.ndarray:
    if sig.dim > guard:
        raise CapacityError("dense representation dimension", sig.dim, guard)
    sites = []
    for s in range(sig.p):
        acc = np.eye(sig.n, dtype=complex)
        for g, e in enumerate(exps):
            if e:
                code = sig.site_codes[g, s]
                if code:
                    acc = acc @ np.linalg.matrix_power(sig.site_matrix(code), e)
        sites.append(acc)
    return reduce(np.kron, sites)


def to_matrix(sig: AlgebraSignature, x, guard: int = DEFAULT_DENSE_GUARD) -> np.ndarray:
    """Evaluate a monomial or element in the tensor-product representation."""
    if isinstance(x, GammaMonomial):
        return x.phase.to_complex() * _monomial_matrix(sig, x.exponents, guard)
    if isinstance(x, AlgebraElement):
        out = np.zeros((sig.dim, sig.dim), dtype=complex)
        if sig.dim > guard:
            raise CapacityError("dense representation dimension", sig.dim, guard)
        for k, v in x.terms.items():
            out += v * _monomial_matrix(sig, k, guard)
        return out
    raise InvalidInputError(f"cannot convert {type(x).__name__} to a matrix")


def trace_normal_form(sig: AlgebraSignature, m: GammaMonomial) -> PhaseExponent:
    """Normalized trace of a normal-form monomial: its phase or exact zero."""
    if m.is_scalar():
        return m.phase
    return PhaseExponent.zero(sig.n)


def matrix_trace(sig: AlgebraSignature, indices: Sequence[int], guard: int = DEFAULT_DENSE_GUARD) -> complex:
    """Normalized trace of ``g_{i1} g_{i2} ...`` computed on dense matrices."""
    mats = gamma_rep(sig, guard)
    prod = np.eye(sig.dim, dtype=complex)
    for i in indices:
        prod = prod @ mats[i]
    return complex(np.trace(prod) / sig.dim)


def _inversions(seq: Sequence[int]) -> int:
    return sum(1 for a, b in itertools.combinations(seq, 2) if a > b)


def _as_permutation(perm: Sequence[int]) -> list[int]:
    perm = [int(x) for x in perm]
    m = len(perm)
    if sorted(perm) == list(range(m)):
        return perm
    if sorted(perm) == list(range(1, m + 1)):
        return [x - 1 for x in perm]
    raise InvalidInputError(f"{perm!r} is not a permutation")


def k_signum(n: int, perm: Sequence[int]) -> PhaseExponent:
    """Reordering phase ``K(sigma) = omega**(-inv(sigma))``.

    Defined by ``T_{s(1)} ... T_{s(m)} = K(s) T_1 ... T_m`` for formal symbols
    with ``T_i T_j = omega T_j T_i`` when ``i < j``.  Reduces to the
    permutation sign when ``n = 2``.
    """
    p = _as_permutation(perm)
    return PhaseExponent.omega_pow(n, -_inversions(p))


def theta_order(sig: AlgebraSignature) -> list[int]:
    """Generator order in which every earlier ``T`` satisfies ``T_a T_b = omega T_b T_a``.

    The tensor representation realizes the defining relations with
    ``omega -> omega**-1`` in an interleaved order, so such an order exists;
    it is found from the commutation table rather than assumed.
    """
    rem = list(range(sig.ngen))
    order = []
    while rem:
        for x in rem:
            if all(sig.table[x][y] % sig.n == 1 for y in rem if y != x):
                order.append(x)
                rem.remove(x)
                break
        else:
            if sig.n == 2:
                # every pair anticommutes, any order works
                order.extend(rem)
                break
            raise RepresentationError(
                "commutation table admits no uniform ordering; "
                f"remaining generators {[sig.labels[r] for r in rem]}"
            )
    return order


@lru_cache(maxsize=None)
def _block_partition_histogram(n: int, count: int, guard: int) -> tuple[tuple[int, ...], int]:
    """Histogram over ``Z_n`` of ``inv`` for all ways to cut ``count`` ordered
    copies of one generator into blocks of ``n`` (blocks ordered by their
    first element, increasing inside each block).  Returns (hist, #terms)."""
    t = count // n
    total = math.factorial(count) // (math.factorial(n) ** t * math.factorial(t))
    if total > guard:
        raise CapacityError("trace theorem partitions", total, guard)
    hist = [0] * n

    def rec(remaining: tuple[int, ...], placed: list[int], inv: int) -> None:
        if not remaining:
            hist[inv % n] += 1
            return
        first = remaining[0]
        for comb in itertools.combinations(remaining[1:], n - 1):
            blk = (first,) + comb
            add = sum(1 for x in blk for y in placed if y > x)
            rest = tuple(x for x in remaining if x not in blk)
            rec(rest, placed + list(blk), inv + add)

    rec(tuple(range(count)), [], 0)
    return tuple(hist), total


def theorem_term_count(n: int, indices: Sequence[int]) -> int:
    """Number of grouping permutations the trace theorem sums over."""
    counts = Counter(indices)
    total = 1
    for c in counts.values():
        if c % n:
            return 0
        t = c // n
        total *= math.factorial(c) // (math.factorial(n) ** t * math.factorial(t))
    return total


def trace_theorem(
    sig: AlgebraSignature,
    indices: Sequence[int],
    guard: int = DEFAULT_THEOREM_GUARD,
) -> PhaseExponent:
    """Normalized trace of a generator word via the combinatorial trace formula.

    The word is relabelled by formal symbols ``T_1 .. T_N`` in the order of a
    stable sort by :func:`theta_order` rank.  The sum runs over every
    grouping permutation ``sigma`` that cuts the positions into ``n``-blocks
    of equal generator (increasing inside a block, blocks ordered by first
    position); the blocks are then brought into rank order by a block
    permutation ``Sigma``.  Each term contributes
    ``K(labels) / K(Sigma o sigma)``.  For ``n = 2`` this is the Pfaffian
    (Wick) expansion.  Repeated ``n``-tuples of one generator are summed over
    all their cuttings; the surplus cancels because Gaussian binomials at a
    primitive root collapse to ordinary binomials.

    Whole-block moves contribute ``omega**(n*n) = 1``, so the sum factorizes
    over generators and is accumulated as exact integer histograms.
    """
    n = sig.n
    indices = [int(i) for i in indices]
    for i in indices:
        if not 0 <= i < sig.ngen:
            raise InvalidInputError(f"generator index {i} out of range for p={sig.p}")
    if not indices:
        return PhaseExponent.one(n)
    counts = Counter(indices)
    if len(indices) % n or any(c % n for c in counts.values()):
        return PhaseExponent.zero(n)
    if theorem_term_count(n, indices) > guard:
        raise CapacityError("trace theorem partitions", theorem_term_count(n, indices), guard)

    rank = {g: r for r, g in enumerate(theta_order(sig))}
    ordered = sorted(range(len(indices)), key=lambda a: (rank[indices[a]], a))
    labels = [0] * len(indices)
    for t, a in enumerate(ordered):
        labels[a] = t
    base = -_inversions(labels)

    # convolve per-generator histograms of inv(arranged) over Z_n
    hist = [0] * n
    hist[0] = 1
    for g in sorted(counts, key=rank.get):
        h, _ = _block_partition_histogram(n, counts[g], guard)
        new = [0] * n
        for a, ca in enumerate(hist):
            if ca:
                for b, cb in enumerate(h):
                    if cb:
                        new[(a + b) % n] += ca * cb
        hist = new
    w = omega(n)
    total = sum(c * w ** ((k + base) % n) for k, c in enumerate(hist))
    return PhaseExponent.from_complex(n, total, tol=1e-9 * max(1, sum(hist)))


def exp_unit_monomial(sig: AlgebraSignature, coeff: complex, u: GammaMonomial) -> AlgebraElement:
    """``exp(coeff * u)`` as ``sum_i f_i(coeff) u**i`` for a unit-power ``u``."""
    un = sig.power(u, sig.n)
    if not un.is_scalar() or un.phase.exponent != 0:
        raise PreconditionError(
            f"u**n must be the identity with phase 1, got exponents {un.exponents} "
            f"and phase {un.phase}"
        )
    f = gen_hyperbolic(sig.n, coeff)
    out: dict[tuple[int, ...], complex] = {}
    ui = sig.identity()
    for i in range(sig.n):
        out[ui.exponents] = out.get(ui.exponents, 0) + f[i] * ui.phase.to_complex()
        ui = monomial_mul(sig, ui, u)
    return AlgebraElement(sig, out)


def parse_label(sig: AlgebraSignature, label: str) -> int:
    """Map ``g<k>`` (1..2p) or ``gb<k>`` (1..p) to a generator index."""
    s = label.strip().lower()
    try:
        if s.startswith("gb"):
            k = int(s[2:])
            if 1 <= k <= sig.p:
                return sig.p + k - 1
        elif s.startswith("g"):
            k = int(s[1:])
            if 1 <= k <= sig.ngen:
                return k - 1
    except ValueError:
        pass
    raise InvalidInputError(f"bad generator label {label!r} for p={sig.p}")
