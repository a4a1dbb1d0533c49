"""Exact roots-of-unity arithmetic and the generalized hyperbolic functions.

Phases are stored as integer exponents of a base root.  For odd ``n`` the
base is ``omega = exp(2*pi*i/n)`` and exponents live in ``Z_n``; for even
``n`` the base is ``xi = exp(pi*i/n)`` (so ``xi**2 == omega``) and exponents
live in ``Z_2n``.  Keeping the exponent as an integer makes every product of
phases exact; floating point only enters through :meth:`PhaseExponent.to_complex`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleOrderError, InvalidOrderError, NumericDomainError

__all__ = [
    "PhaseExponent",
    "GenHyperbolicTable",
    "omega",
    "xi",
    "phase_modulus",
    "phase_mul",
    "gen_hyperbolic",
    "gen_hyperbolic_series",
    "rho",
]


def _check_order(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidOrderError(f"order n must be an integer >= 2, got {n!r}")


def phase_modulus(n: int) -> int:
    """Size ``L`` of the phase group: ``n`` for odd ``n``, ``2n`` for even."""
    _check_order(n)
    return n if n % 2 else 2 * n


def omega(n: int) -> complex:
    """Primitive n-th root of unity ``exp(2*pi*i/n)``."""
    _check_order(n)
    return cmath.exp(2j * math.pi / n)


def xi(n: int) -> complex:
    """Primitive 2n-th root ``exp(pi*i/n)`` with ``xi(n)**2 == omega(n)``."""
    _check_order(n)
    return cmath.exp(1j * math.pi / n)


@dataclass(frozen=True)
class PhaseExponent:
    """An exact element of the cyclic phase group, or exact zero.

    ``exponent`` counts powers of the base root (``omega`` for odd ``n``,
    ``xi`` for even ``n``) and is always reduced to ``[0, L)``.
    """

    n: int
    exponent: int = 0
    is_zero: bool = False

    def __post_init__(self):
        _check_order(self.n)
        if self.is_zero:
            object.__setattr__(self, "exponent", 0)
        else:
            object.__setattr__(self, "exponent", int(self.exponent) % self.modulus)

    @property
    def modulus(self) -> int:
        return self.n if self.n % 2 else 2 * self.n

    @property
    def step(self) -> int:
        """Exponent units per power of omega (1 for odd n, 2 for even n)."""
        return 1 if self.n % 2 else 2

    # constructors
    @classmethod
    def one(cls, n: int) -> PhaseExponent:
        return cls(n, 0)

    @classmethod
    def zero(cls, n: int) -> PhaseExponent:
        return cls(n, 0, True)

    @classmethod
    def omega_pow(cls, n: int, k: int) -> PhaseExponent:
        """The phase ``omega**k``."""
        _check_order(n)
        return cls(n, k * (1 if n % 2 else 2))

    @classmethod
    def xi_pow(cls, n: int, k: int) -> PhaseExponent:
        """The phase ``xi**k``; odd ``n`` only admits even ``k``."""
        _check_order(n)
        if n % 2 == 0:
            return cls(n, k)
        if k % 2:
            raise NumericDomainError(
                f"xi**{k} is not in the phase group of odd n={n}"
            )
        return cls(n, k // 2)

    @classmethod
    def from_complex(cls, n: int, z: complex, tol: float = 1e-9) -> PhaseExponent:
        """Snap a numeric value onto ``{0} U {phases}``; raise if it is neither."""
        L = phase_modulus(n)
        if abs(z) < tol:
            return cls.zero(n)
        e = round(cmath.phase(z) / (2 * math.pi / L)) % L
        cand = cls(n, e)
        if abs(cand.to_complex() - z) > tol:
            raise NumericDomainError(f"{z!r} is not a phase of order {L}")
        return cand

    # group law
    def __mul__(self, other: PhaseExponent) -> PhaseExponent:
        return phase_mul(self, other)

    def inverse(self) -> PhaseExponent:
        if self.is_zero:
            raise ZeroDivisionError("zero phase has no inverse")
        return PhaseExponent(self.n, -self.exponent)

    def __pow__(self, k: int) -> PhaseExponent:
        if self.is_zero:
            if k <= 0:
                raise ZeroDivisionError("zero phase raised to non-positive power")
            return self
        return PhaseExponent(self.n, self.exponent * k)

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return cmath.exp(2j * math.pi * self.exponent / self.modulus)

    def omega_exponent(self) -> int | None:
        """``k`` with ``self == omega**k``, or None if not an n-th root."""
        if self.is_zero or self.exponent % self.step:
            return None
        return self.exponent // self.step

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        k = self.omega_exponent()
        if k is not None:
            return f"w^{k}"
        return f"xi^{self.exponent}"


def phase_mul(p1: PhaseExponent, p2: PhaseExponent) -> PhaseExponent:
    """Product in ``Z_L``; zero absorbs."""
    if p1.n != p2.n:
        raise IncompatibleOrderError(f"cannot multiply phases of order {p1.n} and {p2.n}")
    if p1.is_zero or p2.is_zero:
        return PhaseExponent.zero(p1.n)
    return PhaseExponent(p1.n, p1.exponent + p2.exponent)


def rho(n: int) -> PhaseExponent:
    """The unit-power rescaling phase ``omega**((n*n-1)/2)``.

    For even ``n`` the exponent is half-integral, so the value is taken as
    ``xi**(n*n-1)``, which is the same formula read in the 2n-th roots.
    """
    _check_order(n)
    if n % 2:
        return PhaseExponent.omega_pow(n, (n * n - 1) // 2)
    return PhaseExponent.xi_pow(n, n * n - 1)


@dataclass(frozen=True)
class GenHyperbolicTable:
    """Branch values ``f_0(x) .. f_{n-1}(x)`` of the n-section of ``exp``."""

    n: int
    x: complex
    values: tuple[complex, ...]

    def __getitem__(self, i: int) -> complex:
        return self.values[i % self.n]

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self.values)


def gen_hyperbolic(n: int, x: complex) -> GenHyperbolicTable:
    """Generalized hyperbolic functions via the discrete Fourier closed form.

    ``f_i(x) = (1/n) * sum_k omega**(-k*i) * exp(omega**k * x)``.  For
    ``n = 2`` these are ``cosh`` and ``sinh``.
    """
    _check_order(n)
    x = complex(x)
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise NumericDomainError(f"argument must be finite, got {x!r}")
    k = np.arange(n)
    roots = np.exp(2j * np.pi * k / n)
    ex = np.exp(roots * x)
    # f_i = mean_k omega^(-k*i) * ex[k]; index the power table mod n to stay exact
    table = roots[(-np.outer(k, k)) % n]
    vals = table @ ex / n
    return GenHyperbolicTable(n, x, tuple(complex(v) for v in vals))


def gen_hyperbolic_series(n: int, x: complex, tol: float = 1e-17) -> tuple[complex, ...]:
    """Direct summation of ``f_i(x) = sum_k x**(nk+i)/(nk+i)!``.

    Slow and only used as an independent check of :func:`gen_hyperbolic`.
    """
    _check_order(n)
    x = complex(x)
    out = [0j] * n
    term = 1 + 0j  # x**j / j!
    j = 0
    while True:
        out[j % n] += term
        j += 1
        term = term * x / j
        if abs(term) < tol and j > abs(x):
            break
    return tuple(out)
