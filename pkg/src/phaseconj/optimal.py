"""Optimal conjugation channels, their fidelities, and an independent optimizer.

The best phase-covariant approximation to conjugation of equatorial states
reaches fidelity 2/d, one channel per NSB matrix: Kraus operators
sqrt(b[i,j]) * (|i><j| + |j><i|) over the pairs i > j. This module builds
those channels, evaluates fidelities three ways (closed form, pointwise,
Monte Carlo), exposes the comparison constants for universal conjugation
and for phase estimation, and re-derives the 2/d optimum numerically by
maximizing over all covariant channels with a semidefinite program.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChoiOperator, KrausChannel, apply_kraus, twirl
from .nsb import NsbMatrix
from .states import PhaseVector, conjugated_state, equatorial_state, random_phase_vector

ZERO_WEIGHT = 1e-14


def optimal_choi(b: NsbMatrix) -> ChoiOperator:
    """Choi operator sum_{i>j} b[i,j] (|ij> + |ji>)(<ij| + <ji|)."""
    d = b.d
    r = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(i):
            v = np.zeros(d * d)
            v[i * d + j] = 1.0
            v[j * d + i] = 1.0
            r += b.entries[i, j] * np.outer(v, v)
    return ChoiOperator(d, r)


def optimal_kraus(b: NsbMatrix) -> KrausChannel:
    """Kraus operators sqrt(b[i,j]) (|i><j| + |j><i|), skipping zero weights."""
    d = b.d
    ops = []
    for i in range(d):
        for j in range(i):
            if b.entries[i, j] > ZERO_WEIGHT:
                t = np.zeros((d, d), dtype=complex)
                t[i, j] = t[j, i] = 1.0
                ops.append(np.sqrt(b.entries[i, j]) * t)
    return KrausChannel(d, tuple(ops))


def analytic_fidelity(d: int) -> float:
    """Best conjugation fidelity over phase-covariant channels: 2/d."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return 2.0 / d


def universal_fidelity(d: int) -> float:
    """Best conjugation fidelity over fully universal channels: 2/(d+1)."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return 2.0 / (d + 1)


def phase_estimation_fidelity(d: int) -> float:
    """Fidelity of the best estimate-and-reprepare strategy: (2d-1)/d^2."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return (2.0 * d - 1.0) / d**2


def choi_fidelity(r: ChoiOperator) -> float:
    """Conjugation fidelity <Psi0| R |Psi0| with Psi0 the doubled seed state.

    The operator is first projected onto its covariant sector (a no-op for
    covariant channels, the intended inputs), so the value equals the
    phase-averaged pointwise fidelity for any channel and is linear in R.
    """
    tw = twirl(r).matrix
    return float(tw.sum().real) / r.d**2


def pointwise_fidelity(ch: KrausChannel, pv: PhaseVector) -> float:
    """Overlap of the channel output on one equatorial state with its conjugate."""
    psi = equatorial_state(pv)
    out = apply_kraus(ch, np.outer(psi, psi.conj()))
    target = conjugated_state(pv)
    return float(np.vdot(target, out @ target).real)


def monte_carlo_fidelity(
    ch: KrausChannel, n_samples: int, seed: int
) -> tuple[float, float]:
    """Mean and standard error of the pointwise fidelity over uniform phases."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    vals = np.array(
        [pointwise_fidelity(ch, random_phase_vector(ch.d, rng)) for _ in range(n_samples)]
    )
    stderr = float(vals.std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0
    return float(vals.mean()), stderr


@dataclass(frozen=True)
class FidelityReport:
    """Fidelity of one channel evaluated three ways."""

    d: int
    analytic: float
    pointwise_samples: tuple[tuple[PhaseVector, float], ...]
    monte_carlo_mean: float
    monte_carlo_stderr: float


def fidelity_report(
    ch: KrausChannel, n_pointwise: int = 5, n_mc: int = 1000, seed: int = 12345
) -> FidelityReport:
    """Evaluate a channel's conjugation fidelity pointwise and by Monte Carlo."""
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n_pointwise):
        pv = random_phase_vector(ch.d, rng)
        samples.append((pv, pointwise_fidelity(ch, pv)))
    mean, stderr = monte_carlo_fidelity(ch, n_mc, seed + 1)
    return FidelityReport(ch.d, analytic_fidelity(ch.d), tuple(samples), mean, stderr)


class OracleConvergenceError(RuntimeError):
    """Optimizer did not reach a clean optimum; carries the best value found."""

    def __init__(self, message: str, best_value: float | None):
        super().__init__(message)
        self.best_value = best_value


@dataclass(frozen=True)
class OracleResult:
    """Outcome of the covariant-channel fidelity maximization."""

    value: float
    choi: ChoiOperator
    singleton_weights: np.ndarray
    solver: str
    status: str


def oracle_max_fidelity(d: int, tol: float = 1e-6, solver: str | None = None) -> OracleResult:
    """Maximize the conjugation fidelity over all covariant channels.

    The covariant Choi operators decompose into d singleton weights c_i >= 0
    on |ii> and one PSD Hermitian 2x2 block per pair {|ij>, |ji>}, with the
    trace-preservation marginal fixing each column sum to one. The objective
    and constraints are affine in these block entries, so the maximum is a
    small semidefinite program, solved here with cvxpy. No structure of the
    known optimum is assumed.
    """
    import cvxpy as cp

    if not 2 <= d <= 8:
        raise ValueError(f"oracle supports 2 <= d <= 8, got {d}")

    c = cp.Variable(d, nonneg=True)
    pairs = [(i, j) for i in range(d) for j in range(i)]
    blocks = {p: cp.Variable((2, 2), hermitian=True) for p in pairs}
    constraints = [blk >> 0 for blk in blocks.values()]
    for m in range(d):
        # Tr_1 of |ij><ij| is |j><j|, of |ji><ji| is |i><i|; cross terms vanish.
        col = c[m]
        for (i, j), blk in blocks.items():
            if j == m:
                col = col + cp.real(blk[0, 0])
            if i == m:
                col = col + cp.real(blk[1, 1])
        constraints.append(col == 1)
    objective = cp.sum(c)
    for blk in blocks.values():
        objective = objective + cp.real(cp.sum(blk))
    problem = cp.Problem(cp.Maximize(objective / d**2), constraints)

    candidates = [solver] if solver else ["CLARABEL", "SCS", "CVXOPT"]
    installed = set(cp.installed_solvers())
    best = None
    last_status = "no solver available"
    for name in candidates:
        if name not in installed:
            continue
        kwargs = {"eps": 1e-9, "max_iters": 200_000} if name == "SCS" else {}
        try:
            problem.solve(solver=name, **kwargs)
        except cp.error.SolverError:
            last_status = f"{name} failed"
            continue
        last_status = f"{name}: {problem.status}"
        if problem.value is not None and (best is None or problem.value > best):
            best = float(problem.value)
        if problem.status == cp.OPTIMAL:
            r = np.zeros((d * d, d * d), dtype=complex)
            weights = np.maximum(np.asarray(c.value, dtype=float), 0.0)
            for i, ci in enumerate(weights):
                r[i * d + i, i * d + i] = ci
            for (i, j), blk in blocks.items():
                vals = np.asarray(blk.value)
                vals = (vals + vals.conj().T) / 2
                hi, lo = i * d + j, j * d + i
                r[hi, hi] = vals[0, 0]
                r[hi, lo] = vals[0, 1]
                r[lo, hi] = vals[1, 0]
                r[lo, lo] = vals[1, 1]
            return OracleResult(
                value=float(problem.value),
                choi=ChoiOperator(d, r),
                singleton_weights=weights,
                solver=name,
                status=problem.status,
            )
    raise OracleConvergenceError(
        f"fidelity maximization did not converge ({last_status}); "
        f"best value found: {best}",
        best,
    )


def fidelity_table(d_max: int) -> list[tuple[int, float, float, float]]:
    """Rows (d, covariant 2/d, universal 2/(d+1), estimation (2d-1)/d^2)."""
    if d_max < 2:
        raise ValueError(f"d_max must be >= 2, got {d_max}")
    return [
        (d, analytic_fidelity(d), universal_fidelity(d), phase_estimation_fidelity(d))
        for d in range(2, d_max + 1)
    ]
