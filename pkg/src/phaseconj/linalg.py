"""Dense complex-matrix primitives shared by every other module.

Matrices are plain 2-D ``complex128`` numpy arrays. Every predicate takes an
explicit tolerance argument; ``DEFAULT_TOL`` is the shared fallback.
"""

from __future__ import annotations

import math

import numpy as np

DEFAULT_TOL = 1e-9


def as_matrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry (i*p+k, j*q+l) equals a[i,j]*b[k,l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: tuple[int, int], which: int) -> np.ndarray:
    """Trace out subsystem ``which`` (1 or 2) of a matrix on a d1*d2 space."""
    a = as_matrix(m)
    d1, d2 = dims
    if a.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"matrix shape {a.shape} does not match dims {dims}")
    four = a.reshape(d1, d2, d1, d2)
    if which == 1:
        return np.einsum("akal->kl", four)
    if which == 2:
        return np.einsum("akbk->ab", four)
    raise ValueError("which must be 1 or 2")


def conjugate(m) -> np.ndarray:
    """Entrywise complex conjugate."""
    return as_matrix(m).conj()


def transpose(m) -> np.ndarray:
    """Index transpose."""
    return as_matrix(m).T.copy()


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T.copy()


def frobenius_distance(a, b) -> float:
    """Frobenius norm of a - b."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    """Check m == m^dagger entrywise within tol."""
    a = as_matrix(m)
    return a.shape[0] == a.shape[1] and bool(np.abs(a - a.conj().T).max() <= tol)


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    """Check m^dagger m == identity within tol (Frobenius)."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])) <= tol)


def hermitian_eigensystem(m, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns of a Hermitian matrix.

    Raises ValueError if the input is not Hermitian within tol. Reconstruction
    satisfies ||V diag(w) V^dagger - m||_F <= tol * dim.
    """
    a = as_matrix(m)
    if not is_hermitian(a, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    order = np.argsort(w)[::-1]
    return w[order].real, v[:, order]


def is_psd(m, tol: float = DEFAULT_TOL) -> bool:
    """Hermitian within tol with smallest eigenvalue >= -tol."""
    a = as_matrix(m)
    if not is_hermitian(a, tol):
        return False
    w = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return bool(w.min() >= -tol)


def random_density_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix from the Ginibre ensemble."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian matrix with O(1) entries."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def matrix_to_json(m) -> dict:
    """Serialize a matrix as {"rows", "cols", "data"} with row-major [re, im] pairs."""
    a = as_matrix(m)
    data = [[float(z.real), float(z.imag)] for z in a.reshape(-1)]
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": data}


def matrix_from_json(obj: dict) -> np.ndarray:
    """Parse the matrix schema, rejecting NaN/Inf entries and shape mismatches."""
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows <= 0 or cols <= 0:
        raise ValueError("matrix dimensions must be positive")
    if len(data) != rows * cols:
        raise ValueError(f"data length {len(data)} does not equal rows*cols={rows * cols}")
    out = np.empty(rows * cols, dtype=complex)
    for idx, pair in enumerate(data):
        try:
            re, im = float(pair[0]), float(pair[1])
        except (TypeError, IndexError, ValueError) as exc:
            raise ValueError(f"malformed [re, im] pair at flat index {idx}") from exc
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValueError(f"non-finite entry at flat index {idx}")
        out[idx] = complex(re, im)
    return out.reshape(rows, cols)
