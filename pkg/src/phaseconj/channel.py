"""Channels as Choi operators and Kraus families, plus the phase-group projector.

Index convention (the classic bug source, so it is pinned here once):

* the Choi operator of a channel T is R = (T (x) Id)|1>><<1| with
  |1>> = sum_i |i>|i>, so R lives on (output slot) (x) (reference slot);
* flat row index i*d + k means |i> in the output slot and |k> in the
  reference slot;
* the channel is recovered as T(rho) = Tr_2[(I (x) rho^T) R], tracing the
  reference slot;
* trace preservation reads Tr_1[R] = I (trace over the output slot).

With this convention (K (x) I)|1>> is exactly the row-major flattening of K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    is_hermitian,
    kron,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
)
from .states import phase_unitary, random_phase_vector


def maxent_vector(d: int) -> np.ndarray:
    """Unnormalized maximally entangled vector sum_i |i>|i> as a d^2 vector."""
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1.0
    return v


@dataclass(frozen=True)
class ChoiOperator:
    """Choi operator on the d^2-dimensional doubled space."""

    d: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (self.d**2, self.d**2):
            raise ValueError(f"Choi matrix must be {self.d**2}x{self.d**2}, got {m.shape}")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class KrausChannel:
    """Channel as a nonempty family of d x d Kraus operators."""

    d: int
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.operators)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (self.d, self.d):
                raise ValueError(f"Kraus operator shape {k.shape} != ({self.d}, {self.d})")
        object.__setattr__(self, "operators", ops)

    def completeness_defect(self) -> float:
        """Max-entry deviation of sum_k K^dagger K from the identity."""
        acc = sum(k.conj().T @ k for k in self.operators)
        return float(np.abs(acc - np.eye(self.d)).max())


def choi_from_kraus(ch: KrausChannel, tol: float = DEFAULT_TOL) -> ChoiOperator:
    """R = sum_k vec(K_k) vec(K_k)^dagger with row-major vec."""
    if ch.completeness_defect() > tol:
        raise ValueError(
            f"Kraus completeness violated (defect {ch.completeness_defect():.3e})"
        )
    vecs = [k.reshape(-1) for k in ch.operators]
    r = sum(np.outer(v, v.conj()) for v in vecs)
    return ChoiOperator(ch.d, r)


def kraus_from_choi(r: ChoiOperator, tol: float = DEFAULT_TOL) -> KrausChannel:
    """Kraus operators from the eigendecomposition of a PSD Choi operator.

    Eigenpairs with eigenvalue above tol (relative to the largest) each give
    one operator sqrt(lam) * unvec(v).
    """
    m = (r.matrix + r.matrix.conj().T) / 2
    if not is_hermitian(r.matrix, tol * r.d**2):
        raise ValueError("Choi operator is not Hermitian within tolerance")
    w, v = np.linalg.eigh(m)
    top = float(w.max())
    if float(w.min()) < -tol * max(top, 1.0):
        raise ValueError(f"Choi operator is not PSD (min eigenvalue {w.min():.3e})")
    ops = [
        np.sqrt(lam) * v[:, i].reshape(r.d, r.d)
        for i, lam in enumerate(w)
        if lam > tol * max(top, 1.0)
    ]
    if not ops:
        raise ValueError("Choi operator has no eigenvalue above threshold")
    return KrausChannel(r.d, tuple(ops))


def apply(r: ChoiOperator, rho) -> np.ndarray:
    """Apply a channel in Choi form: Tr_2[(I (x) rho^T) R]."""
    rho = as_matrix(rho)
    if rho.shape != (r.d, r.d):
        raise ValueError(f"state shape {rho.shape} != ({r.d}, {r.d})")
    return partial_trace(kron(np.eye(r.d), rho.T) @ r.matrix, (r.d, r.d), 2)


def apply_kraus(ch: KrausChannel, rho) -> np.ndarray:
    """Apply a channel in Kraus form: sum_k K rho K^dagger."""
    rho = as_matrix(rho)
    if rho.shape != (ch.d, ch.d):
        raise ValueError(f"state shape {rho.shape} != ({ch.d}, {ch.d})")
    return sum(k @ rho @ k.conj().T for k in ch.operators)


@dataclass(frozen=True)
class CptReport:
    """Outcome of the complete-positivity / trace-preservation check."""

    psd: bool
    min_eigenvalue: float
    trace_preserving: bool
    deviation: float

    @property
    def ok(self) -> bool:
        return self.psd and self.trace_preserving


def is_cpt(r: ChoiOperator, tol: float = DEFAULT_TOL) -> CptReport:
    """Check CP (R is PSD) and TP (Tr_1[R] = I, deviation in operator norm)."""
    herm = is_hermitian(r.matrix, tol)
    w = np.linalg.eigvalsh((r.matrix + r.matrix.conj().T) / 2)
    min_eig = float(w.min())
    marginal = partial_trace(r.matrix, (r.d, r.d), 1)
    deviation = float(np.linalg.norm(marginal - np.eye(r.d), ord=2))
    return CptReport(
        psd=herm and min_eig >= -tol,
        min_eigenvalue=min_eig,
        trace_preserving=deviation <= tol,
        deviation=deviation,
    )


def is_phase_covariant(
    r: ChoiOperator,
    tol: float = DEFAULT_TOL,
    n_samples: int = 20,
    seed: int = 12345,
) -> bool:
    """Check [R, conj(U) (x) conj(U)] = 0 on random phase vectors."""
    rng = np.random.default_rng(seed)
    for _ in range(n_samples):
        u = phase_unitary(random_phase_vector(r.d, rng)).conj()
        w = kron(u, u)
        if np.linalg.norm(r.matrix @ w - w @ r.matrix) > tol:
            return False
    return True


def _class_labels(d: int) -> np.ndarray:
    """Phase-group equivalence class of each doubled-space basis vector |ik>.

    |ii> is a singleton class; |ij> and |ji> (i != j) share a class. Two
    vectors are equivalent iff the index multisets coincide.
    """
    labels = np.empty(d * d, dtype=np.int64)
    for i in range(d):
        for k in range(d):
            lo, hi = (i, k) if i <= k else (k, i)
            labels[i * d + k] = lo * d + hi
    return labels


def twirl(r: ChoiOperator) -> ChoiOperator:
    """Project onto the phase-covariant sector.

    Zeroes every matrix element connecting different equivalence classes;
    this mask equals the exact average of (conj(U) (x) conj(U))-conjugations
    over the whole phase group, and is idempotent.
    """
    labels = _class_labels(r.d)
    mask = labels[:, None] == labels[None, :]
    return ChoiOperator(r.d, np.where(mask, r.matrix, 0.0))


def random_channel(d: int, n_kraus: int, seed: int) -> KrausChannel:
    """Random channel from a Haar-ish isometry (QR of a Ginibre block)."""
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n_kraus * d, d)) + 1j * rng.normal(size=(n_kraus * d, d))
    v, _ = np.linalg.qr(g)
    return KrausChannel(d, tuple(v[k * d : (k + 1) * d, :] for k in range(n_kraus)))


def channel_to_json(obj: KrausChannel | ChoiOperator) -> dict:
    """Serialize a channel file: {"d", "kraus": [...]} or {"d", "choi": ...}."""
    if isinstance(obj, KrausChannel):
        return {"d": obj.d, "kraus": [matrix_to_json(k) for k in obj.operators]}
    return {"d": obj.d, "choi": matrix_to_json(obj.matrix)}


def channel_from_json(data: dict) -> KrausChannel | ChoiOperator:
    """Parse a channel file; Kraus form wins when both keys are present."""
    d = int(data["d"])
    if "kraus" in data:
        return KrausChannel(d, tuple(matrix_from_json(k) for k in data["kraus"]))
    if "choi" in data:
        return ChoiOperator(d, matrix_from_json(data["choi"]))
    raise ValueError("channel object needs a 'kraus' or 'choi' key")
