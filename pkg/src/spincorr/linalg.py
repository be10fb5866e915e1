"""Determinants and permanents of small complex matrices.

The fast routes are LU factorization (via numpy) for the determinant and
Ryser's inclusion-exclusion formula with Gray-code subset updates for the
permanent.  Both have naive Leibniz-expansion counterparts that serve as
independent cross-checks in the test suite and are deliberately capped at
tiny orders.
"""

from __future__ import annotations

import itertools

import numpy as np

# Ryser is O(2^n * n); order 25 keeps a single call under a few seconds.
PERMANENT_MAX_ORDER = 25
# Leibniz expansion is O(n! * n); order 9 is already ~3e6 permutations.
NAIVE_MAX_ORDER = 9
IMAG_RESIDUE_TOL = 1e-10


def _as_square(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def determinant(matrix) -> complex:
    """Determinant of a square complex matrix.

    Uses LU factorization with partial pivoting.  The empty (0 x 0) matrix
    has determinant 1 by convention.
    """
    a = _as_square(matrix)
    if a.shape[0] == 0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(a))


def permanent(matrix) -> complex:
    """Permanent of a square complex matrix by Ryser's formula.

    Column subsets are visited in Gray-code order so each step updates the
    running row sums with a single column.  Cost is O(2^n * n); orders above
    PERMANENT_MAX_ORDER are rejected.  The empty matrix has permanent 1.
    """
    a = _as_square(matrix)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n > PERMANENT_MAX_ORDER:
        raise ValueError(f"permanent order {n} exceeds cap {PERMANENT_MAX_ORDER}")
    cols = np.ascontiguousarray(a.T)
    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    sign = 1.0
    gray = 0
    for t in range(1, 1 << n):
        g = t ^ (t >> 1)
        bit = g ^ gray
        j = bit.bit_length() - 1
        if g & bit:
            row_sums += cols[j]
        else:
            row_sums -= cols[j]
        sign = -sign
        total += sign * row_sums.prod()
        gray = g
    if n % 2:
        total = -total
    return complex(total)


def _leibniz(matrix, signed: bool) -> complex:
    a = _as_square(matrix)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n > NAIVE_MAX_ORDER:
        raise ValueError(f"naive expansion order {n} exceeds cap {NAIVE_MAX_ORDER}")
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        term = 1.0 + 0.0j
        for i, j in enumerate(perm):
            term *= a[i, j]
        if signed and _permutation_parity(perm) < 0:
            total -= term
        else:
            total += term
    return total


def _permutation_parity(perm) -> int:
    inversions = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


def determinant_naive(matrix) -> complex:
    """Reference determinant by direct Leibniz expansion (capped order)."""
    return _leibniz(matrix, signed=True)


def permanent_naive(matrix) -> complex:
    """Reference permanent by direct Leibniz expansion (capped order)."""
    return _leibniz(matrix, signed=False)


def real_part(value: complex, tol: float = IMAG_RESIDUE_TOL) -> float:
    """Drop a numerically negligible imaginary part.

    Raises if the imaginary residue exceeds ``tol`` relative to the magnitude,
    which would indicate a genuinely complex result rather than rounding noise.
    """
    z = complex(value)
    if abs(z.imag) > tol * max(1.0, abs(z)):
        raise ValueError(f"imaginary residue {z.imag!r} exceeds tolerance {tol!r}")
    return z.real
