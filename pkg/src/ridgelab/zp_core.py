"""Arithmetic and index bookkeeping for the prime grids Z_p and Z_p^D.

Everything in this package lives on a discretized domain Z_p^D with p prime.
This module owns the primality guard, modular inverses, and the linear
indexing convention shared by the transforms, the dense operators, the
register simulator, and the CSV serialization.

Linear index layout (little-endian in coordinates):

    index(c_0, ..., c_{k-1}) = sum_j c_j * p**j

so coordinate 0 is the fastest-varying digit.  A combined point (a, b) in
Z_p^D x Z_p is indexed with b as the highest digit: index = lin(a) + b * p**D.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from .errors import InvalidInverse, NotPrime, TooLargeForDense

#: Default cap on the number of rows (p**(d+1)) of any dense operator.
DEFAULT_DENSE_LIMIT = 1_000_000

#: Dense tables may hold at most this many total entries, as a multiple of
#: the row limit.  With the defaults that is 8e6 entries (64 MB of float64).
_TOTAL_ENTRY_FACTOR = 8

# Witness set making Miller-Rabin deterministic below 3.3e24, which covers
# every 64-bit integer.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@lru_cache(maxsize=4096)
def _is_prime_cached(n: int) -> bool:
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n) -> bool:
    """Deterministic primality test (Miller-Rabin, exact for n < 2**64)."""
    n = int(n)
    if n < 0:
        return False
    return _is_prime_cached(n)


def require_prime(p) -> int:
    """Return ``int(p)`` or raise :class:`NotPrime`."""
    p = int(p)
    if not is_prime(p):
        raise NotPrime(f"modulus {p} is not prime")
    return p


def mod_inverse(v: int, p: int) -> int:
    """Multiplicative inverse of v in the field Z_p.

    Raises :class:`InvalidInverse` for v outside [1, p), in particular for
    the non-invertible element v = 0.
    """
    p = require_prime(p)
    v = int(v)
    if not 1 <= v <= p - 1:
        raise InvalidInverse(f"{v} has no inverse mod {p}")
    return pow(v, p - 2, p)


def scale_vector_mod(a, v: int, p: int):
    """Componentwise (v * a) mod p for a coordinate vector a in Z_p^D."""
    p = require_prime(p)
    v = int(v)
    if not 0 <= v < p:
        raise ValueError(f"scalar {v} outside Z_{p}")
    a = np.asarray(a)
    if np.any((a < 0) | (a >= p)):
        raise ValueError(f"coordinates outside Z_{p}")
    return (a * v) % p


def dense_limit() -> int:
    """Row cap for dense tables; RIDGELAB_DENSE_LIMIT overrides the default."""
    raw = os.environ.get("RIDGELAB_DENSE_LIMIT")
    if raw is None:
        return DEFAULT_DENSE_LIMIT
    limit = int(raw)
    if limit <= 0:
        raise ValueError("RIDGELAB_DENSE_LIMIT must be positive")
    return limit


def max_dense_entries() -> int:
    """Total-entry cap for any single dense allocation."""
    return _TOTAL_ENTRY_FACTOR * dense_limit()


def _check_table(rows: int, cols: int, what: str) -> None:
    limit = dense_limit()
    if rows > limit:
        raise TooLargeForDense(
            f"{what}: {rows} rows exceed the dense limit {limit} "
            "(set RIDGELAB_DENSE_LIMIT to override)"
        )
    if rows * cols > _TOTAL_ENTRY_FACTOR * limit:
        raise TooLargeForDense(
            f"{what}: {rows}x{cols} entries exceed "
            f"{_TOTAL_ENTRY_FACTOR}x the dense limit {limit}"
        )


def powers(p: int, d: int) -> np.ndarray:
    """[1, p, p**2, ...] used to flatten little-endian coordinates."""
    return p ** np.arange(d, dtype=np.int64)


def linear_index(coords, p: int) -> int:
    """Flatten a coordinate vector to its linear index."""
    coords = np.asarray(coords, dtype=np.int64)
    return int(coords @ powers(p, coords.shape[-1]))


def coords_from_linear(index: int, p: int, d: int) -> tuple:
    """Inverse of :func:`linear_index`."""
    index = int(index)
    out = []
    for _ in range(d):
        out.append(index % p)
        index //= p
    return tuple(out)


@lru_cache(maxsize=32)
def _all_coords_cached(p: int, d: int) -> np.ndarray:
    idx = np.arange(p**d, dtype=np.int64)
    coords = np.empty((p**d, d), dtype=np.int64)
    for k in range(d):
        coords[:, k] = (idx // p**k) % p
    coords.setflags(write=False)
    return coords


def all_coords(p: int, d: int) -> np.ndarray:
    """All points of Z_p^D as a (p**d, d) array in linear-index order.

    The returned array is shared and read-only.
    """
    p = require_prime(p)
    _check_table(p**d, d, "coordinate table")
    return _all_coords_cached(p, int(d))


@lru_cache(maxsize=16)
def _scale_index_cached(p: int, d: int) -> np.ndarray:
    coords = _all_coords_cached(p, d)
    pw = powers(p, d)
    table = np.empty((p, p**d), dtype=np.int64)
    for v in range(p):
        table[v] = ((coords * v) % p) @ pw
    table.setflags(write=False)
    return table


def scale_index_table(p: int, d: int) -> np.ndarray:
    """Table T[v, lin(a)] = lin((v * a) mod p), shared and read-only.

    Row v of the table is the permutation a -> v*a of Z_p^D (a bijection for
    every v != 0 because p is prime); row 0 collapses everything to 0.
    """
    p = require_prime(p)
    _check_table(p ** (d + 1), 1, "scale-index table")
    return _scale_index_cached(p, int(d))


@lru_cache(maxsize=8)
def _ridge_index_cached(p: int, d: int) -> np.ndarray:
    coords = _all_coords_cached(p, d)
    inner = (coords @ coords.T) % p  # inner[lin(a), lin(x)] = a.x mod p
    b = np.arange(p, dtype=np.int64)
    table = (inner[None, :, :] - b[:, None, None]) % p
    table = table.reshape(p ** (d + 1), p**d).astype(np.int32)
    table.setflags(write=False)
    return table


def ridge_index_table(p: int, d: int) -> np.ndarray:
    """Table I[lin(a) + b*p**d, lin(x)] = (a.x - b) mod p, read-only.

    This is the index pattern behind every dense ridge operator: applying a
    1-D profile h through ``h[I]`` yields the matrix with entries
    h((a.x - b) mod p) in the shared row/column ordering.
    """
    p = require_prime(p)
    _check_table(p ** (d + 1), p**d, "ridge index table")
    return _ridge_index_cached(p, int(d))
