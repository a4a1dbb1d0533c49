"""The Z_n vector Potts model on a ``p x q`` torus.

Spins ``s[i, k] = omega**e[i, k]`` sit on ``p`` rows and ``q`` columns.
Bonds along a row (between neighbouring columns) carry coupling ``a``,
bonds along a column carry ``b``, and each bond contributes
``2*cos(2*pi*(e - e')/n)``.  A one-row or one-column torus bonds a site to
itself.

Four routes to the partition function are provided and cross-checked:

* brute force over all ``n**(p*q)`` configurations;
* ``Tr M**q`` with the dense column transfer matrix ``M = B @ A``;
* the sector decomposition of ``M**q`` over the eigenvalues of the global
  shift ``U``;
* the multisum expansion of ``M**q`` into gamma-monomials, whose traces are
  exact phases.

For ``n = 2`` the exact closed form on a finite torus is available too.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np
from scipy.linalg import expm

from . import kernels
from .errors import (
    CapacityError,
    DomainWarning,
    InvalidInputError,
    NumericDomainError,
    PreconditionError,
)
from .gca import (
    AlgebraElement,
    AlgebraSignature,
    GammaMonomial,
    exp_unit_monomial,
    monomial_mul,
    pauli,
    to_matrix,
)
from .phase import PhaseExponent, gen_hyperbolic, omega, rho, xi

__all__ = [
    "BRUTE_GUARD",
    "DENSE_GUARD",
    "MULTISUM_GUARD",
    "LatticeModel",
    "SpinConfiguration",
    "PartitionResult",
    "TransferOperators",
    "GammaStructure",
    "MultisumResult",
    "energy",
    "brute_force_partition",
    "build_transfer",
    "transfer_partition",
    "projector_suite",
    "residue_r",
    "decomposed_power",
    "decomposed_partition",
    "gamma_structure",
    "gamma_forms",
    "multisum_power",
    "ising_closed_form",
    "closed_form_partition",
]

BRUTE_GUARD = 1 << 20
DENSE_GUARD = 4096
MULTISUM_GUARD = 1 << 24


@dataclass(frozen=True)
class LatticeModel:
    n: int
    p: int
    q: int
    a: float
    b: float

    def __post_init__(self):
        for name in ("n", "p", "q"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise InvalidInputError(f"{name} must be an integer, got {v!r}")
        if self.n < 2:
            raise InvalidInputError(f"n must be >= 2, got {self.n}")
        if self.p < 1 or self.q < 1:
            raise InvalidInputError(f"p and q must be >= 1, got p={self.p}, q={self.q}")
        for name in ("a", "b"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidInputError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def sites(self) -> int:
        return self.p * self.q


@dataclass(frozen=True)
class SpinConfiguration:
    """A ``p x q`` array of spin exponents in ``[0, n)``."""

    n: int
    spins: np.ndarray

    def __post_init__(self):
        s = np.array(self.spins, dtype=np.int64)
        if s.ndim != 2:
            raise InvalidInputError(f"spins must be a 2-d array, got shape {s.shape}")
        if s.size and (s.min() < 0 or s.max() >= self.n):
            raise InvalidInputError(f"spin exponents must lie in [0, {self.n})")
        s.setflags(write=False)
        object.__setattr__(self, "spins", s)

    @property
    def shape(self) -> tuple[int, int]:
        return self.spins.shape


def energy(model: LatticeModel, config: SpinConfiguration) -> float:
    """``-E/kT`` of one configuration, torus wraparound included."""
    if config.shape != (model.p, model.q):
        raise InvalidInputError(
            f"configuration shape {config.shape} does not match lattice ({model.p}, {model.q})"
        )
    if config.n != model.n:
        raise InvalidInputError(f"configuration has n={config.n}, model has n={model.n}")
    s = config.spins
    n = model.n
    cosv = 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)
    horiz = cosv[(np.roll(s, -1, axis=1) - s) % n].sum()
    vert = cosv[(np.roll(s, -1, axis=0) - s) % n].sum()
    return float(model.a * horiz + model.b * vert)


@dataclass
class PartitionResult:
    Z: complex
    method: str
    terms: int
    wall_time: float
    extra: dict = field(default_factory=dict)

    @property
    def imag_ratio(self) -> float:
        return abs(self.Z.imag) / max(abs(self.Z), 1e-300)


def _check_guard(what: str, needed: int, guard: int) -> None:
    if needed > guard:
        raise CapacityError(what, needed, guard)


def brute_force_partition(model: LatticeModel, guard: int = BRUTE_GUARD) -> PartitionResult:
    """Direct sum of Boltzmann weights over every configuration."""
    _check_guard("brute-force configurations", model.n**model.sites, guard)
    t0 = time.perf_counter()
    z, count = kernels.brute_force_sum(model.n, model.p, model.q, model.a, model.b)
    return PartitionResult(complex(z), "brute", int(count), time.perf_counter() - t0)


# dense transfer matrix ------------------------------------------------------


def _kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def _site_op(n: int, p: int, k: int, m: np.ndarray) -> np.ndarray:
    return _kron_all([m if i == k else np.eye(n) for i in range(p)])


def circulant_w(n: int, a: float) -> np.ndarray:
    """``W = sum_l lambda_l s1**l`` with ``lambda_l = exp(2a cos(2 pi l/n))``."""
    lam = np.exp(2.0 * a * np.cos(2.0 * np.pi * np.arange(n) / n))
    s1 = pauli(n, "s1")
    return sum(lam[l] * np.linalg.matrix_power(s1, l) for l in range(n))


class TransferOperators:
    """Dense transfer-matrix data for one model.

    ``Vp[k]`` projects onto the ``U = omega**k`` eigenspace and ``Vm[k]`` onto
    ``U = omega**-k``.  ``Bp[k]``/``Bm[k]`` are the sector factors in which the
    global shift inside the boundary bond term is replaced by ``omega**k``
    (respectively ``U**-1`` by ``omega**k``), including the interior bonds.
    """

    def __init__(self, model: LatticeModel, guard: int = DENSE_GUARD):
        n, p = model.n, model.p
        _check_guard("dense transfer dimension", n**p, guard)
        self.model = model
        self.dim = n**p
        w = omega(n)
        s1, s3 = pauli(n, "s1"), pauli(n, "s3")
        self.A = _kron_all([circulant_w(n, model.a)] * p)
        # B is diagonal in the spin basis
        spins = np.indices((n,) * p).reshape(p, -1)
        cosv = 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)
        interior = np.zeros(self.dim)
        for k in range(p - 1):
            interior += cosv[(spins[k + 1] - spins[k]) % n]
        boundary = cosv[(spins[0] - spins[p - 1]) % n]
        self.B = np.diag(np.exp(model.b * (interior + boundary))).astype(complex)
        self.M = self.B @ self.A
        # U = omega**-1 * (s1 x ... x s1)
        self.U = _kron_all([s1] * p) / w
        Upow = [np.linalg.matrix_power(self.U, i) for i in range(n)]
        Uinv = np.linalg.inv(self.U)
        Uinvpow = [np.linalg.matrix_power(Uinv, i) for i in range(n)]
        self.Vp = [sum(w ** (-k * i) * Upow[i] for i in range(n)) / n for k in range(n)]
        self.Vm = [sum(w ** (-k * i) * Uinvpow[i] for i in range(n)) / n for k in range(n)]
        # boundary bond T_p = Z_p^-1 Z_1, a diagonal clock ratio
        Zs = [_site_op(n, p, k, s3) for k in range(p)]
        Tp = np.linalg.inv(Zs[p - 1]) @ Zs[0]
        Bint = np.diag(np.exp(model.b * interior)).astype(complex)
        self.Bp = [Bint @ expm(model.b * w**k * Uinv @ Tp) for k in range(n)]
        self.Bm = [expm(model.b * w**k * self.U @ np.linalg.inv(Tp)) for k in range(n)]
        self.Tp = Tp

    @cached_property
    def symbolic(self) -> tuple[AlgebraElement, AlgebraElement]:
        return gamma_forms(self.model)

    @property
    def A_sym(self) -> AlgebraElement:
        return self.symbolic[0]

    @property
    def B_sym(self) -> AlgebraElement:
        return self.symbolic[1]


def build_transfer(model: LatticeModel, guard: int = DENSE_GUARD) -> TransferOperators:
    return TransferOperators(model, guard)


def transfer_partition(model: LatticeModel, guard: int = DENSE_GUARD) -> PartitionResult:
    """``Tr M**q`` from the dense transfer matrix."""
    t0 = time.perf_counter()
    ops = build_transfer(model, guard)
    z = np.trace(np.linalg.matrix_power(ops.M, model.q))
    return PartitionResult(complex(z), "transfer", ops.dim, time.perf_counter() - t0)


def _comm(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.max(np.abs(x @ y - y @ x)))


def projector_suite(ops: TransferOperators) -> dict[str, float]:
    """Max deviations for the projector identities (smaller is better).

    ``VkVl`` covers ``k != l`` for all four sign combinations, where
    ``V_l^-`` is taken as the projector onto the same eigenvalue as
    ``V_l^+`` (``V_{-l}^-``); ``resolution`` checks that the products
    ``V_k^+ V_{-k}^-`` sum to the identity.
    """
    n = ops.model.n
    Vp, Vm = ops.Vp, ops.Vm
    eye = np.eye(ops.dim)
    norm = lambda x: float(np.max(np.abs(x))) if x.size else 0.0
    out = {
        "U^n-1": norm(np.linalg.matrix_power(ops.U, n) - eye),
        "V^n-V": max(
            norm(np.linalg.matrix_power(V, n) - V) for V in list(Vp) + list(Vm)
        ),
    }
    pairs = 0.0
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            mk, ml = Vm[(-k) % n], Vm[(-l) % n]
            for x, y in ((Vp[k], Vp[l]), (Vp[k], ml), (mk, Vp[l]), (mk, ml)):
                pairs = max(pairs, norm(x @ y))
    out["VkVl"] = pairs
    out["resolution"] = norm(sum(Vp[k] @ Vm[(-k) % n] for k in range(n)) - eye)
    out["[U,A]"] = _comm(ops.U, ops.A)
    out["[U,B]"] = _comm(ops.U, ops.B)
    out["[V,A]"] = max(_comm(V, ops.A) for V in list(Vp) + list(Vm))
    out["B offdiag"] = norm(ops.B - np.diag(np.diag(ops.B)))
    out["sector commute"] = max(
        max(_comm(ops.Bp[k], ops.Bm[(-k) % n]), _comm(ops.Bp[k], ops.Vp[k]),
            _comm(ops.Bm[(-k) % n], ops.Vp[k]))
        for k in range(n)
    )
    return out


def residue_r(n: int, q: int) -> int:
    """Projector power ``r`` in ``[1, n-1]``: ``(q - n) mod (n - 1)``, with 0 read as ``n - 1``."""
    if q < 1:
        raise InvalidInputError(f"q must be >= 1, got {q}")
    if n == 2:
        return 1
    r = (q - n) % (n - 1)
    return r if r else n - 1


def decomposed_power(ops: TransferOperators, q: int | None = None, pairing: str = "conjugate") -> np.ndarray:
    """``M**q`` assembled sector by sector.

    ``pairing="conjugate"`` pairs ``B_k^+`` with ``B_{-k}^-`` (the two
    projectors pick the same ``U`` eigenvalue).  ``pairing="same"`` pairs
    ``B_k^+`` with ``B_k^-``, which only agrees with ``M**q`` when ``n = 2``;
    it is kept so tests can demonstrate that.
    """
    n = ops.model.n
    q = ops.model.q if q is None else int(q)
    r = residue_r(n, q)
    out = np.zeros((ops.dim, ops.dim), dtype=complex)
    for k in range(n):
        j = (-k) % n if pairing == "conjugate" else k
        if pairing not in ("conjugate", "same"):
            raise InvalidInputError(f"unknown pairing {pairing!r}")
        sector = ops.Bp[k] @ ops.Bm[j] @ ops.A
        proj = np.linalg.matrix_power(ops.Vp[k] @ ops.Vm[j], r)
        out += np.linalg.matrix_power(sector, q) @ proj
    return out


def decomposed_partition(model: LatticeModel, guard: int = DENSE_GUARD) -> PartitionResult:
    t0 = time.perf_counter()
    ops = build_transfer(model, guard)
    z = np.trace(decomposed_power(ops))
    return PartitionResult(complex(z), "decomposed", model.n * ops.dim, time.perf_counter() - t0)


# gamma-monomial forms ------------------------------------------------------


@dataclass
class GammaStructure:
    """Exact monomial forms of the transfer-matrix building blocks.

    Words are generator index tuples; ``word_mono`` is their normal form.
    Every physical operator is a phase times a word:

    * ``X_k = kappa_X * (g_k**(n-1) gb_k)``
    * ``T_a = Z_a^-1 Z_{a+1} = kappa[a] * (gb_a**(n-1) g_{a+1})``  for ``a < p``
    * ``T_p = Z_p^-1 Z_1 = kappa_b * U * (gb_p**(n-1) g_1)``
    * ``U = upsilon * (prod_k g_k**(n-1) gb_k)``

    ``unit`` is the rescaling phase that makes every exponent argument
    unit-power: ``rho`` for odd ``n`` and ``rho / xi`` for even ``n``.
    """

    sig: AlgebraSignature
    kappa_X: PhaseExponent
    X: list
    Z: list
    U: GammaMonomial
    upsilon: PhaseExponent
    kappa: list
    kappa_b: PhaseExponent
    unit: PhaseExponent
    words: dict


def _words(n: int, p: int) -> dict:
    w = {}
    w["X"] = [tuple([k] * (n - 1) + [p + k]) for k in range(p)]
    w["Ucore"] = tuple(g for k in range(p) for g in w["X"][k])
    w["int+"] = [tuple([p + a] * (n - 1) + [a + 1]) for a in range(p - 1)]
    w["int-"] = [tuple([a + 1] * (n - 1) + [p + a]) for a in range(p - 1)]
    w["bnd+"] = tuple([2 * p - 1] * (n - 1) + [0])
    w["bnd-"] = tuple([0] * (n - 1) + [2 * p - 1])
    return w


def gamma_structure(n: int, p: int, fault=None) -> GammaStructure:
    """Derive all phases from the monomial algebra (no hand-entered phases)."""
    sig = AlgebraSignature(n, p, fault)
    words = _words(n, p)
    kX = sig.w(-1) if n % 2 else sig.w(-1) * PhaseExponent.xi_pow(n, 1)
    X = [sig.word(wd).scaled(kX) for wd in words["X"]]
    Z, pre = [], sig.identity()
    for k in range(p):
        Z.append(sig.mul(sig.inverse(pre), sig.generator(k)))
        pre = sig.mul(pre, X[k])
    U = sig.mul(*X).scaled(sig.w(-1))
    ucore = sig.word(words["Ucore"])
    upsilon = U.phase * ucore.phase.inverse()

    def ratio(m: GammaMonomial, ref: GammaMonomial) -> PhaseExponent:
        if m.exponents != ref.exponents:
            raise PreconditionError(f"monomials differ: {m.exponents} vs {ref.exponents}")
        return m.phase * ref.phase.inverse()

    kappa = []
    for a in range(p - 1):
        T = sig.mul(sig.inverse(Z[a]), Z[a + 1])
        kappa.append(ratio(T, sig.word(words["int+"][a])))
    Tp = sig.mul(sig.inverse(Z[p - 1]), Z[0])
    kappa_b = ratio(Tp, sig.mul(U, sig.word(words["bnd+"])))
    unit = rho(n) if n % 2 else rho(n) * PhaseExponent.xi_pow(n, -1)
    return GammaStructure(sig, kX, X, Z, U, upsilon, kappa, kappa_b, unit, words)


def _exp_factor(gs: GammaStructure, c: complex, ph: PhaseExponent, word, where: str) -> AlgebraElement:
    """``exp(c * ph * word)`` as ``sum_i f_i(c*unit) u**i`` with ``u = ph/unit * word``."""
    sig = gs.sig
    u = sig.word(word).scaled(ph * gs.unit.inverse())
    try:
        return exp_unit_monomial(sig, c * gs.unit.to_complex(), u)
    except PreconditionError as exc:
        raise PreconditionError(f"{where}: {exc}") from None


def gamma_forms(model: LatticeModel, fault=None) -> tuple[AlgebraElement, AlgebraElement]:
    """Symbolic ``A`` and ``B`` as algebra elements.

    ``A = prod_k W[X_k]``.  ``B`` is the product of the interior bond
    exponentials times ``sum_k Bt_k^+ Bt_{-k}^- V_k^+``, where the boundary
    exponentials are expanded in the unit-power monomials ``u_k^+`` and
    ``u_{-k}^-``.
    """
    n, p, b = model.n, model.p, model.b
    gs = gamma_structure(n, p, fault)
    sig = gs.sig
    lam = np.exp(2.0 * model.a * np.cos(2.0 * np.pi * np.arange(n) / n))
    A = AlgebraElement.scalar(sig, 1.0)
    for k in range(p):
        Wk = {}
        xi_pow = sig.identity()
        for l in range(n):
            Wk[xi_pow.exponents] = Wk.get(xi_pow.exponents, 0) + lam[l] * xi_pow.phase.to_complex()
            xi_pow = monomial_mul(sig, xi_pow, gs.X[k])
        A = A * AlgebraElement(sig, Wk)

    inv_unit = gs.unit.inverse()
    B = AlgebraElement.scalar(sig, 1.0)
    for a in range(p - 1):
        B = B * _exp_factor(gs, b, gs.kappa[a], gs.words["int+"][a], f"interior bond {a + 1}, +")
        B = B * _exp_factor_minus(gs, b, gs.kappa[a].inverse(), gs.words["int-"][a],
                                  f"interior bond {a + 1}, -")
    Ue = AlgebraElement.from_monomial(sig, gs.U)
    Upow = [AlgebraElement.scalar(sig, 1.0)]
    for _ in range(n - 1):
        Upow.append(Upow[-1] * Ue)
    w = omega(n)
    bnd = AlgebraElement(sig)
    for k in range(n):
        plus = _exp_factor(gs, b, gs.kappa_b * sig.w(k), gs.words["bnd+"], f"boundary u_{k}^+")
        minus = _exp_factor_minus(gs, b, gs.kappa_b.inverse() * sig.w(-k), gs.words["bnd-"],
                                  f"boundary u_{(-k) % n}^-")
        V = reduce(lambda x, y: x + y, [Upow[i] * (w ** (-k * i) / n) for i in range(n)])
        bnd = bnd + plus * minus * V
    return A, B * bnd


def _exp_factor_minus(gs: GammaStructure, c: complex, ph: PhaseExponent, word, where: str) -> AlgebraElement:
    """``exp(c * ph * word)`` as ``sum_i f_i(c/unit) v**i`` with ``v = ph*unit * word``."""
    sig = gs.sig
    u = sig.word(word).scaled(ph * gs.unit)
    try:
        return exp_unit_monomial(sig, c / gs.unit.to_complex(), u)
    except PreconditionError as exc:
        raise PreconditionError(f"{where}: {exc}") from None


# multisum ------------------------------------------------------------------


@dataclass
class MultisumResult:
    matrix: np.ndarray | None
    Z: complex
    terms: int
    element: AlgebraElement
    nonzero_traces: int
    trace_phases: dict
    impure_traces: int
    wall_time: float = 0.0


def _column_blocks(gs: GammaStructure, model: LatticeModel, k: int):
    """All ``n**(3p)`` column blocks of sector ``k``.

    Each factor of ``B_k^+ B_{-k}^- A`` is expanded as a sum over one index:
    interior ``+`` bonds (``S``), the boundary ``+`` bond (``l1``), interior
    ``-`` bonds (``T``), the boundary ``-`` bond (``l2``) and the ``p``
    circulants of ``A`` (``I``).  A block fixes every index; it contributes a
    complex coefficient times a generator word.
    """
    n, p, b = model.n, model.p, model.b
    sig = gs.sig
    unit = gs.unit
    fp = gen_hyperbolic(n, b * unit.to_complex())
    fm = gen_hyperbolic(n, b / unit.to_complex())
    lam = np.exp(2.0 * model.a * np.cos(2.0 * np.pi * np.arange(n) / n))

    # factor -> list over index of (coef, word)
    factors = []
    for a in range(p - 1):
        ph = (gs.kappa[a] * unit.inverse()).to_complex()
        factors.append([(fp[s] * ph**s, gs.words["int+"][a] * s) for s in range(n)])
    ph = (gs.kappa_b * sig.w(k) * unit.inverse()).to_complex()
    factors.append([(fp[l] * ph**l, gs.words["bnd+"] * l) for l in range(n)])
    for a in range(p - 1):
        ph = (gs.kappa[a].inverse() * unit).to_complex()
        factors.append([(fm[t] * ph**t, gs.words["int-"][a] * t) for t in range(n)])
    ph = (gs.kappa_b.inverse() * sig.w(-k) * unit).to_complex()
    factors.append([(fm[l] * ph**l, gs.words["bnd-"] * l) for l in range(n)])
    kx = gs.kappa_X.to_complex()
    for j in range(p):
        factors.append([(lam[i] * kx**i, gs.words["X"][j] * i) for i in range(n)])

    # combine factor by factor into normal-ordered monomials
    blocks = [(1.0 + 0j, sig.identity(), ())]
    for fac in factors:
        nxt = []
        for c0, m0, w0 in blocks:
            for c1, w1 in fac:
                nxt.append((c0 * c1, monomial_mul(sig, m0, sig.word(w1)), w0 + w1))
        blocks = nxt
    return blocks


def multisum_power(model: LatticeModel, q: int | None = None, guard: int = MULTISUM_GUARD,
                   dense_guard: int = DENSE_GUARD, sample_words: int = 0, seed: int = 0,
                   fault=None) -> MultisumResult:
    """``M**q`` as the multisum over ``Pi = (k, L_r, S_r, T_r, I_r)``.

    For each sector ``k`` the ``q`` column blocks are multiplied in all
    ``n**(3pq)`` ways (the compiled kernel does this).  The projector is
    expanded as ``(1/n**2) sum_{j1,j2} omega**(-k(j1-j2)) U**(j1-j2)``.
    Every resulting word is a pure generator product, so its normalized
    trace is zero or a power of ``omega``; ``Z`` is ``n**p`` times the sum
    of coefficients times those traces.  ``sample_words`` words are also
    rebuilt explicitly and traced with the combinatorial trace theorem.
    """
    from .gca import trace_theorem

    t0 = time.perf_counter()
    n, p = model.n, model.p
    q = model.q if q is None else int(q)
    m = 3 * p * q + 1
    _check_guard("multisum index lattice", n**m, guard)
    gs = gamma_structure(n, p, fault)
    sig = gs.sig
    ngen = sig.ngen
    size = n**ngen
    pw = n ** np.arange(ngen, dtype=np.int64)
    ucore = sig.word(gs.words["Ucore"])
    ucore_pows = [sig.identity()]
    for _ in range(n - 1):
        ucore_pows.append(monomial_mul(sig, ucore_pows[-1], ucore))

    total: dict[tuple[int, ...], complex] = {}
    Zn = 0j
    nonzero = 0
    impure = 0
    phase_hist: dict[int, int] = {}
    terms = 0
    rng = np.random.default_rng(seed)
    samples = []
    for k in range(n):
        blocks = _column_blocks(gs, model, k)
        coefs = np.array([c for c, _, _ in blocks], dtype=complex)
        codes = np.array([int(np.dot(bm.exponents, pw)) for _, bm, _ in blocks], dtype=np.int64)
        phases = []
        for _, bm, _ in blocks:
            e = bm.phase.omega_exponent()
            if e is None:
                impure += 1
                e = 0
            phases.append(e)
        acc, counts = kernels.multisum_accumulate(coefs, codes, np.array(phases), q, n, ngen,
                                                  np.array(sig.table))
        terms += int(counts.sum())
        if sample_words:
            for _ in range(sample_words):
                idx = rng.integers(0, len(blocks), size=q)
                d = int(rng.integers(0, n))
                word = sum((blocks[i][2] for i in idx), ()) + gs.words["Ucore"] * d
                samples.append(word)
        slots = np.nonzero(counts)
        for code, wp in zip(*slots):
            exps = tuple(int(x) for x in (code // pw) % n)
            c = acc[code, wp]
            word_m = GammaMonomial(exps, sig.w(int(wp)))
            for j1 in range(n):
                for j2 in range(n):
                    d = (j1 - j2) % n
                    vcoef = omega(n) ** (-k * (j1 - j2)) / (n * n)
                    # U**d = upsilon**d * Ucore**d; upsilon goes into the coefficient
                    g = c * vcoef * (gs.upsilon**d).to_complex()
                    omega_hat = monomial_mul(sig, word_m, ucore_pows[d])
                    e = omega_hat.phase.omega_exponent()
                    if omega_hat.is_scalar():
                        cnt = int(counts[code, wp])
                        nonzero += cnt
                        if e is None:
                            impure += cnt
                        else:
                            phase_hist[e] = phase_hist.get(e, 0) + cnt
                        Zn += g * omega_hat.phase.to_complex()
                    key = omega_hat.exponents
                    total[key] = total.get(key, 0) + g * omega_hat.phase.to_complex()
    elem = AlgebraElement(sig, total)
    matrix = None
    if sig.dim <= dense_guard:
        matrix = to_matrix(sig, elem, dense_guard)
    theorem_mismatch = 0
    checked = 0
    for word in samples:
        tn = sig.word(word)
        try:
            tt = trace_theorem(sig, word)
        except CapacityError:
            continue
        checked += 1
        ref = tn.phase if tn.is_scalar() else PhaseExponent.zero(n)
        if tt != ref:
            theorem_mismatch += 1
    res = MultisumResult(
        matrix=matrix,
        Z=complex(Zn * n**p),
        terms=terms,
        element=elem,
        nonzero_traces=nonzero,
        trace_phases=dict(sorted(phase_hist.items())),
        impure_traces=impure,
        wall_time=time.perf_counter() - t0,
    )
    res.theorem_samples = checked
    res.theorem_mismatch = theorem_mismatch
    return res


# n = 2 closed form ---------------------------------------------------------


def ising_brackets(p: int, q: int, a: float, b: float) -> dict[str, np.ndarray]:
    """The four bracket grids ``cosh2a' cosh2b' - sinh2a' cos(phi_l) - sinh2b' cos(phi_k)``."""
    A2, B2 = 4.0 * a, 4.0 * b  # 2a', 2b'
    ch = math.cosh(A2) * math.cosh(B2)
    sa, sb = math.sinh(A2), math.sinh(B2)
    k = np.arange(1, p + 1)[:, None]
    l = np.arange(1, q + 1)[None, :]
    half_k = np.cos(np.pi * (2 * k + 1) / p)
    half_l = np.cos(np.pi * (2 * l + 1) / q)
    full_k = np.cos(2 * np.pi * k / p)
    full_l = np.cos(2 * np.pi * l / q)
    grid = lambda ck, cl: ch - sa * cl - sb * ck
    return {
        "hh": grid(half_k, half_l),
        "fh": grid(full_k, half_l),
        "hf": grid(half_k, full_l),
        "ff": grid(full_k, full_l),
    }


def ising_sigma(a: float, b: float) -> int:
    """``+1`` above the critical temperature, ``-1`` below (``0`` exactly at it)."""
    return int(np.sign(1.0 - math.sinh(4.0 * a) * math.sinh(4.0 * b)))


def ising_closed_form(p: int, q: int, a: float, b: float, sigma: int | None = None) -> float:
    """Exact ``n = 2`` partition function on a ``p x q`` torus.

    ``Z = 2**(pq-1) * (P_hh + P_fh + P_hf - sigma * P_ff)`` where each ``P`` is
    a product of square roots of brackets over ``k = 1..p``, ``l = 1..q``
    with half-integer or integer momenta.  Valid for ferromagnetic couplings
    ``a, b >= 0``.  Square roots are taken in complex arithmetic; a negative
    bracket or a result that is not real-positive emits a
    :class:`DomainWarning` naming the offending entries.
    """
    if p < 1 or q < 1:
        raise InvalidInputError(f"p and q must be >= 1, got p={p}, q={q}")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise NumericDomainError("couplings must be finite")
    if a < 0 or b < 0:
        raise NumericDomainError(
            f"closed form holds for a, b >= 0 only, got a={a}, b={b}"
        )
    if sigma is None:
        sigma = ising_sigma(a, b)
    br = ising_brackets(p, q, a, b)
    neg = {key: [(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(v < 0))]
           for key, v in br.items()}
    neg = {key: v for key, v in neg.items() if v}
    if neg:
        warnings.warn(f"negative brackets (k, l) under square root: {neg}", DomainWarning,
                      stacklevel=2)
    prods = {key: np.prod(np.sqrt(v.astype(complex))) for key, v in br.items()}
    z = 2.0 ** (p * q - 1) * (prods["hh"] + prods["fh"] + prods["hf"] - sigma * prods["ff"])
    if abs(z.imag) > 1e-9 * abs(z) or z.real <= 0:
        warnings.warn(f"closed form is not real-positive: {z!r}", DomainWarning, stacklevel=2)
    return float(z.real)


def closed_form_partition(model: LatticeModel) -> PartitionResult:
    if model.n != 2:
        raise InvalidInputError(f"closed form requires n = 2, got n = {model.n}")
    t0 = time.perf_counter()
    z = ising_closed_form(model.p, model.q, model.a, model.b)
    return PartitionResult(complex(z), "closed-form", 4 * model.sites, time.perf_counter() - t0)
