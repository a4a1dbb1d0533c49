"""Numpy implementations of the hot loops; the reference for the compiled ones."""

from __future__ import annotations

import math

import numpy as np

CHUNK = 1 << 16


def brute_force_sum(n: int, p: int, q: int, a: float, b: float) -> tuple[float, int]:
    """Sum of ``exp(-E/kT)`` over all ``n**(p*q)`` torus configurations.

    Returns ``(Z, count)``.  Chunk sums are combined with ``math.fsum``.
    """
    cosv = 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)
    total = n ** (p * q)
    pw = n ** np.arange(p * q - 1, -1, -1, dtype=np.int64)
    parts = []
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        s = ((idx[:, None] // pw) % n).reshape(-1, p, q)
        horiz = cosv[(np.roll(s, -1, axis=2) - s) % n].sum(axis=(1, 2))
        vert = cosv[(np.roll(s, -1, axis=1) - s) % n].sum(axis=(1, 2))
        parts.append(float(np.exp(a * horiz + b * vert).sum()))
    return math.fsum(parts), total


def multisum_accumulate(coefs, codes, phases, q: int, n: int, ngen: int, table):
    """Enumerate all ``q``-fold products of column blocks.

    Block ``i`` is ``coefs[i] * omega**phases[i] * g**exps(codes[i])`` with
    ``codes`` the base-``n`` encoding of the exponent vector (generator 0 is
    the least significant digit).  Products are normal ordered with the
    commutation table.  Returns ``(acc, counts)`` indexed by
    ``[code, omega-phase]``: the summed coefficients and the number of
    products landing in each slot.
    """
    coefs = np.asarray(coefs, dtype=complex)
    codes = np.asarray(codes, dtype=np.int64)
    phases = np.asarray(phases, dtype=np.int64) % n
    tab = np.asarray(table, dtype=np.int64)
    low = np.tril(tab, -1)  # c[i, j] for i > j
    pw = n ** np.arange(ngen, dtype=np.int64)
    bexps = (codes[:, None] // pw) % n

    cur_c, cur_e, cur_p = coefs, bexps, phases
    for _ in range(q - 1):
        # (state, block) pairs; phase from moving block exponents left
        cross = np.einsum("ai,ij,bj->ab", cur_e, low, bexps) % n
        new_c = (cur_c[:, None] * coefs[None, :]).ravel()
        new_e = ((cur_e[:, None, :] + bexps[None, :, :]) % n).reshape(-1, ngen)
        new_p = ((cur_p[:, None] + phases[None, :] + cross) % n).ravel()
        cur_c, cur_e, cur_p = new_c, new_e, new_p
    size = n**ngen
    slot = (cur_e @ pw) * n + cur_p
    acc = np.zeros(size * n, dtype=complex)
    np.add.at(acc, slot, cur_c)
    counts = np.bincount(slot, minlength=size * n).astype(np.int64)
    return acc.reshape(size, n), counts.reshape(size, n)
