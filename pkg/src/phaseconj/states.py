"""Equatorial states, diagonal phase unitaries, and multi-phase conjugation.

An equatorial state in dimension d has all d basis amplitudes of modulus
1/sqrt(d); the amplitude of |0> is fixed real positive, so the state is
parametrized by the d-1 remaining phases. States are plain complex vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseVector:
    """d-1 relative phases (radians), reduced to [0, 2*pi) on construction."""

    d: int
    phases: tuple[float, ...]

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if len(self.phases) != self.d - 1:
            raise ValueError(f"expected {self.d - 1} phases, got {len(self.phases)}")
        reduced = tuple(float(p) for p in np.mod(self.phases, TWO_PI))
        object.__setattr__(self, "phases", reduced)

    def negated(self) -> "PhaseVector":
        """Phase vector of the conjugated state (all phases negated)."""
        return PhaseVector(self.d, tuple(-p for p in self.phases))

    def to_json(self) -> dict:
        return {"d": self.d, "phases": [float(p) for p in self.phases]}

    @classmethod
    def from_json(cls, obj: dict) -> "PhaseVector":
        return cls(int(obj["d"]), tuple(float(p) for p in obj["phases"]))


def seed_state(d: int) -> np.ndarray:
    """The real equatorial state with every amplitude equal to 1/sqrt(d)."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return np.full(d, 1.0 / np.sqrt(d), dtype=complex)


def equatorial_state(pv: PhaseVector) -> np.ndarray:
    """Amplitudes exp(i*phi_k)/sqrt(d) with phi_0 = 0."""
    phases = np.concatenate([[0.0], pv.phases])
    return np.exp(1j * phases) / np.sqrt(pv.d)


def phase_unitary(pv: PhaseVector) -> np.ndarray:
    """Diagonal unitary diag(1, exp(i*phi_1), ..., exp(i*phi_{d-1}))."""
    phases = np.concatenate([[0.0], pv.phases])
    return np.diag(np.exp(1j * phases))


def conjugated_state(pv: PhaseVector) -> np.ndarray:
    """The ideal conjugation target: the equatorial state with negated phases."""
    return equatorial_state(pv.negated())


def random_phase_vector(d: int, rng: np.random.Generator) -> PhaseVector:
    """Uniform i.i.d. phases on [0, 2*pi), the invariant measure of the phase group."""
    return PhaseVector(d, tuple(rng.uniform(0.0, TWO_PI, d - 1)))
