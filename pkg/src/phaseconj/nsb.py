"""Null-diagonal symmetric bistochastic (NSB) matrices.

An NSB matrix is nonnegative, symmetric, has zero diagonal, and every row
(hence every column) sums to one. These matrices index the optimal
phase-covariant conjugation channels one-to-one. For even d the permutation
matrices of perfect matchings are NSB; for d = 2 and d = 3 the NSB set is a
single point.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .linalg import matrix_from_json, matrix_to_json

NEGATIVE_SLACK = 1e-12
SYMMETRY_TOL = 1e-12
ROW_SUM_TOL = 1e-10


class NsbValidationError(ValueError):
    """Raised when a matrix violates one of the NSB constraints."""


@dataclass(frozen=True)
class NsbMatrix:
    """Validated NSB matrix; construct through :func:`validate`."""

    d: int
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)


@dataclass(frozen=True)
class MatchingPermutation:
    """Perfect matching of {0..d-1}: d/2 disjoint pairs, stored as (lo, hi)."""

    d: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.d % 2 != 0:
            raise ValueError(f"perfect matchings need even d, got {self.d}")
        norm = tuple(sorted((min(p), max(p)) for p in self.pairs))
        flat = [i for p in norm for i in p]
        if sorted(flat) != list(range(self.d)):
            raise ValueError(f"pairs {self.pairs} do not partition 0..{self.d - 1}")
        object.__setattr__(self, "pairs", norm)

    def permutation_matrix(self) -> np.ndarray:
        m = np.zeros((self.d, self.d))
        for i, j in self.pairs:
            m[i, j] = m[j, i] = 1.0
        return m

    def as_nsb(self) -> NsbMatrix:
        return validate(self.permutation_matrix())


def validate(m, tol: float = ROW_SUM_TOL) -> NsbMatrix:
    """Check the NSB constraints and return the validated matrix.

    ``tol`` governs the row-sum check; symmetry is checked at 1e-12, the
    diagonal must vanish at 1e-12, and entries below -1e-12 are rejected
    (tiny negatives from round-off are clamped to zero). Each violation is
    reported with the offending indices.
    """
    arr = np.array(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NsbValidationError(f"expected a square matrix, got shape {arr.shape}")
    d = arr.shape[0]
    if d < 2:
        raise NsbValidationError(f"dimension must be >= 2, got {d}")
    if arr.min() < -NEGATIVE_SLACK:
        i, j = np.unravel_index(int(np.argmin(arr)), arr.shape)
        raise NsbValidationError(f"negative entry {arr[i, j]:.3e} at ({i}, {j})")
    diag = np.abs(np.diag(arr))
    if diag.max() > SYMMETRY_TOL:
        i = int(np.argmax(diag))
        raise NsbValidationError(f"nonzero diagonal entry {arr[i, i]:.3e} at ({i}, {i})")
    asym = np.abs(arr - arr.T)
    if asym.max() > SYMMETRY_TOL:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise NsbValidationError(
            f"asymmetric at ({i}, {j}): {arr[i, j]:.12g} vs {arr[j, i]:.12g}"
        )
    sums = arr.sum(axis=1)
    bad = np.abs(sums - 1.0)
    if bad.max() > tol:
        i = int(np.argmax(bad))
        raise NsbValidationError(f"row {i} sums to {sums[i]:.12g}, expected 1")
    return NsbMatrix(d, np.clip(arr, 0.0, None))


def complete_lower_triangle(lower, d: int, tol: float = ROW_SUM_TOL) -> NsbMatrix:
    """Complete strictly-lower-triangular entries to a symmetric zero-diagonal
    matrix and validate it.

    ``lower`` lists the entries b[i, j] for i > j in row-major order:
    (1,0), (2,0), (2,1), (3,0), ...
    """
    vals = np.asarray(lower, dtype=float)
    need = d * (d - 1) // 2
    if vals.shape != (need,):
        raise NsbValidationError(f"expected {need} lower-triangular entries, got {vals.shape}")
    m = np.zeros((d, d))
    k = 0
    for i in range(1, d):
        for j in range(i):
            m[i, j] = m[j, i] = vals[k]
            k += 1
    return validate(m, tol)


def canonical(d: int) -> NsbMatrix:
    """The equal-weight NSB matrix (J - I)/(d - 1).

    For d = 2 and d = 3 the NSB set is a single point and this is it; for
    larger d it is the symmetric interior representative.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    m = (np.ones((d, d)) - np.eye(d)) / (d - 1)
    return validate(m)


def family_d4(p1: float, p2: float) -> NsbMatrix:
    """The two-parameter family of 4x4 NSB matrices.

    Row 0 is (0, p1, p2, 1-p1-p2); the remaining rows are forced by
    symmetry and the row sums.
    """
    if p1 < 0 or p2 < 0 or p1 + p2 > 1 + 1e-12:
        raise ValueError(f"need p1, p2 >= 0 with p1 + p2 <= 1, got ({p1}, {p2})")
    p3 = 1.0 - p1 - p2
    m = np.array(
        [
            [0.0, p1, p2, p3],
            [p1, 0.0, p3, p2],
            [p2, p3, 0.0, p1],
            [p3, p2, p1, 0.0],
        ]
    )
    return validate(m)


def decompose_d4(b: NsbMatrix) -> tuple[float, float, float]:
    """Barycentric coordinates of a 4x4 NSB matrix over the three matching extremals.

    The coordinates are read off row 0 (the row sums force the rest); the
    reconstruction is verified at 1e-12 so that a non-NSB input is rejected.
    """
    if b.d != 4:
        raise ValueError(f"decompose_d4 needs d = 4, got d = {b.d}")
    p1, p2, p3 = float(b.entries[0, 1]), float(b.entries[0, 2]), float(b.entries[0, 3])
    recon = sum(p * m.permutation_matrix() for p, m in zip((p1, p2, p3), matchings(4)))
    if np.abs(recon - b.entries).max() > 1e-12:
        raise ValueError("matrix is not in the d=4 NSB family (reconstruction failed)")
    return p1, p2, p3


def matchings(d: int) -> list[MatchingPermutation]:
    """All perfect matchings of {0..d-1}, in a fixed lexicographic order.

    The count is the double factorial (d-1)!!.
    """
    if d % 2 != 0:
        raise ValueError(f"perfect matchings need even d, got {d}")

    def rec(items: tuple[int, ...]):
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for i, other in enumerate(rest):
            for tail in rec(rest[:i] + rest[i + 1 :]):
                yield ((first, other),) + tail

    return [MatchingPermutation(d, pairs) for pairs in rec(tuple(range(d)))]


def random_nsb(d: int, seed: int) -> NsbMatrix:
    """Deterministic random NSB matrix for the given seed.

    Even d: a Dirichlet-weighted convex combination of all perfect matchings.
    Odd d: a convex combination of the canonical matrix with the symmetrized
    cyclic shifts (P_k + P_k^T)/2; this covers an explicit convex subset of
    the polytope, not necessarily all of it.
    """
    rng = np.random.default_rng(seed)
    if d % 2 == 0:
        mats = [m.permutation_matrix() for m in matchings(d)]
    else:
        mats = [canonical(d).entries]
        for k in range(1, (d - 1) // 2 + 1):
            shift = np.zeros((d, d))
            for i in range(d):
                shift[i, (i + k) % d] = 1.0
            mats.append((shift + shift.T) / 2)
    weights = rng.dirichlet(np.ones(len(mats)))
    return validate(sum(w * m for w, m in zip(weights, mats)))


def nsb_to_json(b: NsbMatrix) -> dict:
    return matrix_to_json(b.entries)


def load_nsb(path: str, tol: float = ROW_SUM_TOL) -> NsbMatrix:
    """Load an NSB matrix from CSV (d rows of d values) or matrix JSON."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        arr = matrix_from_json(json.loads(text))
        if np.abs(arr.imag).max() > 0:
            raise NsbValidationError("NSB matrices are real; found complex entries")
        return validate(arr.real, tol)
    rows = [[float(x) for x in row] for row in csv.reader(text.strip().splitlines()) if row]
    return validate(np.array(rows), tol)


def save_nsb(b: NsbMatrix, path: str) -> None:
    """Write an NSB matrix as CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for row in b.entries:
            writer.writerow([f"{x:.17g}" for x in row])
