"""Unitary realizations of the optimal conjugation channels.

For even d every perfect matching yields a channel realized by a single
unitary on system (x) ancilla with the minimal ancilla dimension d/2: place
the matching's pair-swap operators in a circulant block pattern. A control
register of dimension d-1 then mixes d-1 such extremal unitaries with
weights read off the diagonal of the control state. Channels that are not
matching extremals (and all odd-d channels) get a generic isometry-based
dilation with one ancilla level per Kraus operator.

Tensor ordering everywhere: system (x) ancilla (x) control, row-major.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import KrausChannel, apply_kraus
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    frobenius_distance,
    is_psd,
    is_unitary,
    kron,
    matrix_from_json,
    matrix_to_json,
    random_density_matrix,
)
from .nsb import MatchingPermutation, matchings

UNITARY_TOL = 1e-10


def pair_swap(i: int, j: int, d: int) -> np.ndarray:
    """The rank-two swap |i><j| + |j><i| on C^d, for 0 <= j < i < d."""
    if not 0 <= j < i < d:
        raise ValueError(f"need 0 <= j < i < d, got i={i}, j={j}, d={d}")
    t = np.zeros((d, d), dtype=complex)
    t[i, j] = t[j, i] = 1.0
    return t


@dataclass(frozen=True)
class DilationSpec:
    """Unitary on system (x) ancilla ((x) control) plus the fixed input states."""

    d: int
    ancilla_dim: int
    control_dim: int
    unitary: np.ndarray
    ancilla_state: np.ndarray
    control_state: np.ndarray | None = None

    def __post_init__(self):
        u = as_matrix(self.unitary)
        anc = as_matrix(self.ancilla_state)
        dim = self.d * self.ancilla_dim * max(self.control_dim, 1)
        if u.shape != (dim, dim):
            raise ValueError(f"unitary must be {dim}x{dim}, got {u.shape}")
        if not is_unitary(u, UNITARY_TOL):
            raise ValueError("dilation operator is not unitary within 1e-10")
        if anc.shape != (self.ancilla_dim, self.ancilla_dim):
            raise ValueError(f"ancilla state must be {self.ancilla_dim}-dimensional")
        if not is_psd(anc, UNITARY_TOL) or abs(np.trace(anc).real - 1.0) > UNITARY_TOL:
            raise ValueError("ancilla state must be a density matrix")
        ctrl = self.control_state
        if self.control_dim > 0:
            if ctrl is None:
                raise ValueError("control_dim > 0 requires a control state")
            ctrl = as_matrix(ctrl)
            if ctrl.shape != (self.control_dim, self.control_dim):
                raise ValueError(f"control state must be {self.control_dim}-dimensional")
            if not is_psd(ctrl, UNITARY_TOL) or abs(np.trace(ctrl).real - 1.0) > UNITARY_TOL:
                raise ValueError("control state must be a density matrix")
        elif ctrl is not None:
            raise ValueError("control state given but control_dim is 0")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "ancilla_state", anc)
        object.__setattr__(self, "control_state", ctrl)


def apply_dilation(spec: DilationSpec, rho) -> np.ndarray:
    """Evolve rho (x) ancilla ((x) control) and trace out everything but the system."""
    rho = as_matrix(rho)
    if rho.shape != (spec.d, spec.d):
        raise ValueError(f"state shape {rho.shape} != ({spec.d}, {spec.d})")
    env = spec.ancilla_state
    if spec.control_dim > 0:
        env = kron(env, spec.control_state)
    full = spec.unitary @ kron(rho, env) @ spec.unitary.conj().T
    rest = env.shape[0]
    return np.einsum("imjm->ij", full.reshape(spec.d, rest, spec.d, rest))


def _basis_dyad(i: int, j: int, n: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def matching_unitary(m: MatchingPermutation) -> DilationSpec:
    """Minimal dilation of a matching channel: circulant pair-swap blocks.

    With S_0..S_{d/2-1} the swaps of the matching's pairs (ordered by their
    smaller element), U = sum_{i,j} S_{(i+j) mod d/2} (x) |i><j| on system
    (x) ancilla. Distinct swaps have disjoint support and the swaps square
    to a resolution of the identity, so U is unitary; tracing out the
    ancilla prepared in |0><0| leaves sum_r S_r rho S_r.
    """
    d, n = m.d, m.d // 2
    swaps = [pair_swap(hi, lo, d) for lo, hi in m.pairs]
    u = np.zeros((d * n, d * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            u += kron(swaps[(i + j) % n], _basis_dyad(i, j, n))
    return DilationSpec(d, n, 0, u, _basis_dyad(0, 0, n))


def extremal_channel(m: MatchingPermutation, rho) -> np.ndarray:
    """The matching channel sum over pairs of T_ij rho T_ij, applied directly."""
    rho = as_matrix(rho)
    if rho.shape != (m.d, m.d):
        raise ValueError(f"state shape {rho.shape} != ({m.d}, {m.d})")
    out = np.zeros_like(rho)
    for lo, hi in m.pairs:
        t = pair_swap(hi, lo, m.d)
        out += t @ rho @ t
    return out


@dataclass(frozen=True)
class ShiftFormulaReport:
    """Literal modular-shift block operator and whether it came out unitary."""

    d: int
    k: int
    matrix: np.ndarray
    unitary: bool
    deviation: float


def shift_formula_unitary(d: int, k: int) -> ShiftFormulaReport:
    """Evaluate the closed-form shift construction for level k literally.

    Builds sum_{i,j} T[(k + 2i + 2j) mod d, (2i + 2j) mod d] (x) |i><j| and
    reports its unitarity defect. Odd shifts k give a valid matching and a
    unitary; even shifts make the blocks collide, so the operator is
    reported, not promised, unitary.
    """
    if d % 2 != 0:
        raise ValueError(f"even d required, got {d}")
    if not 1 <= k <= d - 1:
        raise ValueError(f"need 1 <= k <= d-1, got k={k}")
    n = d // 2
    u = np.zeros((d * n, d * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            lo = (2 * i + 2 * j) % d
            hi = (k + 2 * i + 2 * j) % d
            t = pair_swap(max(hi, lo), min(hi, lo), d)
            u += kron(t, _basis_dyad(i, j, n))
    deviation = float(np.linalg.norm(u.conj().T @ u - np.eye(d * n)))
    return ShiftFormulaReport(d, k, u, deviation <= UNITARY_TOL, deviation)


def control_matchings(d: int) -> list[MatchingPermutation]:
    """The d-1 matchings assigned to control levels 1..d-1.

    Odd level k pairs each even m with (m + k) mod d, which is always a
    perfect matching; even levels take the first unused matchings in
    lexicographic order. For d = 4 this reproduces the three extremals in
    their standard order.
    """
    if d % 2 != 0:
        raise ValueError(f"even d required, got {d}")
    chosen: dict[int, MatchingPermutation] = {}
    used = set()
    for k in range(1, d, 2):
        m = MatchingPermutation(d, tuple((i, (i + k) % d) for i in range(0, d, 2)))
        chosen[k] = m
        used.add(m.pairs)
    pool = iter(m for m in matchings(d) if m.pairs not in used)
    for k in range(2, d, 2):
        chosen[k] = next(pool)
    return [chosen[k] for k in range(1, d)]


@dataclass(frozen=True)
class ControlledUnitary:
    """Control-indexed family of extremal dilations sharing one big unitary."""

    d: int
    matchings: tuple[MatchingPermutation, ...]
    unitary: np.ndarray

    def dilation(self, control_state) -> DilationSpec:
        """Fix the control register state; its diagonal sets the extremal weights."""
        return DilationSpec(
            d=self.d,
            ancilla_dim=self.d // 2,
            control_dim=self.d - 1,
            unitary=self.unitary,
            ancilla_state=_basis_dyad(0, 0, self.d // 2),
            control_state=as_matrix(control_state),
        )


def controlled_unitary(d: int) -> ControlledUnitary:
    """Block-diagonal unitary sum_k U_k (x) |k-1><k-1| over the control register."""
    selected = control_matchings(d)
    n_ctrl = d - 1
    dim = d * (d // 2) * n_ctrl
    u = np.zeros((dim, dim), dtype=complex)
    for level, m in enumerate(selected):
        u += kron(matching_unitary(m).unitary, _basis_dyad(level, level, n_ctrl))
    return ControlledUnitary(d, tuple(selected), u)


def mixed_ancilla_check(
    m: MatchingPermutation,
    alpha: float,
    beta: float,
    n_random: int = 10,
    seed: int = 12345,
    tol: float = 1e-11,
) -> bool:
    """Check that the matching dilation also works with ancilla alpha|0><0| + beta|1><1|."""
    if alpha < 0 or beta < 0 or abs(alpha + beta - 1.0) > 1e-12:
        raise ValueError(f"need a convex pair, got ({alpha}, {beta})")
    if m.d < 4:
        raise ValueError("mixed ancilla needs ancilla_dim >= 2, i.e. d >= 4")
    base = matching_unitary(m)
    anc = np.zeros((base.ancilla_dim, base.ancilla_dim), dtype=complex)
    anc[0, 0], anc[1, 1] = alpha, beta
    spec = DilationSpec(base.d, base.ancilla_dim, 0, base.unitary, anc)
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        rho = random_density_matrix(m.d, rng)
        if frobenius_distance(apply_dilation(spec, rho), extremal_channel(m, rho)) > tol:
            return False
    return True


def generic_stinespring(ch: KrausChannel, tol: float = DEFAULT_TOL) -> DilationSpec:
    """Dilation with one ancilla level per Kraus operator.

    The isometry V|psi> = sum_k K_k|psi> (x) |k> occupies the ancilla-|0>
    columns of U; the remaining columns are an orthonormal completion (any
    completion acts only outside the prepared sector).
    """
    defect = ch.completeness_defect()
    if defect > tol:
        raise ValueError(f"Kraus completeness violated (defect {defect:.3e})")
    d, n = ch.d, len(ch.operators)
    dim = d * n
    v = np.zeros((dim, d), dtype=complex)
    for a, k in enumerate(ch.operators):
        v[a::n, :] = k
    u = np.zeros((dim, dim), dtype=complex)
    u[:, np.arange(d) * n] = v
    if n > 1:
        q = np.linalg.qr(v, mode="complete")[0]
        u[:, [c for c in range(dim) if c % n != 0]] = q[:, d:]
    return DilationSpec(d, n, 0, u, _basis_dyad(0, 0, n))


@dataclass(frozen=True)
class DilationReport:
    """Worst-case agreement between a dilation and its target channel."""

    max_distance: float
    tolerance: float
    passed: bool
    n_random: int
    seed: int


def verify_dilation(
    spec: DilationSpec,
    ch: KrausChannel,
    n_random: int = 20,
    seed: int = 12345,
    tol: float = UNITARY_TOL,
) -> DilationReport:
    """Compare traced-out evolution against the Kraus form on random states."""
    if spec.d != ch.d:
        raise ValueError(f"dimension mismatch: dilation d={spec.d}, channel d={ch.d}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_random):
        rho = random_density_matrix(spec.d, rng)
        dist = frobenius_distance(apply_dilation(spec, rho), apply_kraus(ch, rho))
        worst = max(worst, dist)
    return DilationReport(worst, tol, worst <= tol, n_random, seed)


def dilation_to_json(spec: DilationSpec) -> dict:
    return {
        "d": spec.d,
        "ancilla_dim": spec.ancilla_dim,
        "control_dim": spec.control_dim,
        "unitary": matrix_to_json(spec.unitary),
        "ancilla_state": matrix_to_json(spec.ancilla_state),
        "control_state": (
            matrix_to_json(spec.control_state) if spec.control_state is not None else None
        ),
    }


def dilation_from_json(data: dict) -> DilationSpec:
    ctrl = data.get("control_state")
    return DilationSpec(
        d=int(data["d"]),
        ancilla_dim=int(data["ancilla_dim"]),
        control_dim=int(data["control_dim"]),
        unitary=matrix_from_json(data["unitary"]),
        ancilla_state=matrix_from_json(data["ancilla_state"]),
        control_state=matrix_from_json(ctrl) if ctrl is not None else None,
    )


def dilation_spec_to_file(spec: DilationSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dilation_to_json(spec), fh, indent=2, sort_keys=True)
        fh.write("\n")
