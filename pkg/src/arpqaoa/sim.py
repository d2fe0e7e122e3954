"""Dense statevector simulation, sampling and cost estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .circuit import Circuit, Gate, Param

DEFAULT_MAX_QUBITS = 24


class SimulationCapError(ValueError):
    """Raised when a circuit is wider than the configured qubit cap."""


@dataclass
class StateVector:
    amplitudes: np.ndarray
    n: int

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps, n)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class SampleSet:
    counts: Mapping[int, int]
    shots: int
    n: int

    def bitstring(self, index: int) -> str:
        """Printed most-significant qubit first."""
        return format(index, f"0{self.n}b") if self.n else ""

    def mode(self) -> int:
        return max(sorted(self.counts), key=lambda b: self.counts[b])


# -- gate kernels ----------------------------------------------------------------

def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _apply_1q(psi: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    view = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    return np.einsum("ab,ibj->iaj", u, view).reshape(-1)


def _apply_cx(psi: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    """Flip the target where the control is set; works in place on a contiguous ``psi``."""
    psi = np.ascontiguousarray(psi)
    view = psi.reshape((2,) * n)
    idx = [slice(None)] * n
    idx[_axis(n, control)] = 1
    sub = view[tuple(idx)]
    t_axis = _axis(n, target) - (1 if _axis(n, control) < _axis(n, target) else 0)
    sub[...] = np.flip(sub, axis=t_axis).copy()
    return psi


_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def apply_gate(psi: np.ndarray, n: int, g: Gate, values: Mapping[str, float],
               inplace: bool = False) -> np.ndarray:
    """Return the state after ``g``; ``psi`` is left untouched unless ``inplace``."""
    angle = g.angle.bind(values) if isinstance(g.angle, Param) else g.angle
    if g.name == "h":
        return _apply_1q(psi, n, g.qubits[0], _H)
    if g.name == "rz":
        return _apply_1q(psi, n, g.qubits[0], rz_matrix(angle))
    if g.name == "rx":
        return _apply_1q(psi, n, g.qubits[0], rx_matrix(angle))
    if g.name == "cx":
        return _apply_cx(psi if inplace else psi.copy(), n, *g.qubits)
    raise ValueError(f"unknown gate {g.name!r}")


def apply_mixer(psi: np.ndarray, n: int, beta: float) -> np.ndarray:
    u = rx_matrix(2.0 * beta)
    for q in range(n):
        psi = _apply_1q(psi, n, q, u)
    return psi


def run(c: Circuit, bindings=None, max_qubits: int = DEFAULT_MAX_QUBITS,
        method: str = "auto") -> StateVector:
    """Simulate from ``|0...0>``.

    ``method="gates"`` applies every gate. ``"auto"`` replaces each cost
    block recorded by :func:`build_ansatz` with one diagonal phase, which
    is exact because the block is diagonal.
    """
    if c.width > max_qubits:
        raise SimulationCapError(
            f"instance too large for simulation: {c.width} qubits > cap {max_qubits}")
    values = c.bindings(bindings) if bindings is not None else {}
    n = c.width
    psi = StateVector.zero(n).amplitudes
    blocks = {b.start: b for b in c.blocks} if method == "auto" else {}
    k = 0
    while k < len(c.gates):
        block = blocks.pop(k, None)  # popped so an empty block is applied once
        if block is not None:
            phases = block.phases
            width = block.spin.num_qubits
            diag = np.tile(phases, 1 << (n - width)) if width < n else phases
            psi = psi * np.exp(-1j * values[block.param] * diag)
            k = block.stop
            continue
        psi = apply_gate(psi, n, c.gates[k], values, inplace=True)
        k += 1
    return StateVector(psi, n)


def qaoa_state(phases: np.ndarray, n: int, gammas, betas) -> StateVector:
    """Standard QAOA state built directly from a diagonal phase table."""
    psi = np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)
    for gamma, beta in zip(gammas, betas):
        psi = psi * np.exp(-1j * gamma * phases)
        psi = apply_mixer(psi, n, beta)
    return StateVector(psi, n)


def sample(s: StateVector, shots: int, seed=None) -> SampleSet:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = s.probabilities
    p = p / p.sum()
    draws = rng.multinomial(shots, p)
    hits = np.flatnonzero(draws)
    return SampleSet({int(b): int(draws[b]) for b in hits}, shots, s.n)


def exact_expectation(s: StateVector, f) -> float:
    energies = f.energies()
    if len(energies) != len(s.amplitudes):
        raise ValueError(f"state has {s.n} qubits, formulation has {f.num_qubits}")
    return float(np.dot(s.probabilities, energies))


def sample_cost_mean(samples: SampleSet, f) -> float:
    if not samples.counts:
        raise ValueError("empty sample set")
    energies = f.energies()
    return sum(c * float(energies[b]) for b, c in samples.counts.items()) / samples.shots
