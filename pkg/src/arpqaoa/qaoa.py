"""Classical outer loop: COBYLA over (gamma, beta) with best-measurement tracking."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import sim
from .circuit import Circuit

CONVERGENCE_RTOL = 1e-4
CONVERGENCE_WINDOW = 5


@dataclass(frozen=True)
class OptimizerConfig:
    max_evaluations: int = 150
    initial_params: tuple[float, ...] | None = None  # defaults to 0.01 for all 2p angles
    shots: int = 1024
    seed: int = 0
    use_exact_expectation: bool = False
    rhobeg: float = 0.5
    max_qubits: int = sim.DEFAULT_MAX_QUBITS

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


@dataclass
class Iteration:
    params: list[float]
    cost_signal: float
    samples: list[tuple[int, int, float]]  # (bitstring index, count, cost)
    min_cost: float
    min_bitstring: int


@dataclass
class Best:
    bitstring: int
    cost: float
    iteration: int


@dataclass
class RunRecord:
    iterations: list[Iteration] = field(default_factory=list)
    best: Best | None = None
    final_params: list[float] = field(default_factory=list)
    converged: bool = False
    seed: int = 0
    num_qubits: int = 0

    def final_mode(self) -> tuple[int, float]:
        """Most frequent bitstring of the last sampled distribution and its cost."""
        last = self.iterations[-1]
        top = max(last.samples, key=lambda s: (s[1], -s[0]))
        return top[0], top[2]

    def to_dict(self, include_samples: bool = True) -> dict:
        d = asdict(self)
        if not include_samples:
            for it in d["iterations"]:
                it.pop("samples")
        return d

    def to_json(self, include_samples: bool = True) -> str:
        return json.dumps(self.to_dict(include_samples), sort_keys=True)


class _Converged(Exception):
    pass


def optimize(ansatz: Circuit, f, cfg: OptimizerConfig = OptimizerConfig()) -> RunRecord:
    """Run QAOA: every evaluation simulates, samples ``cfg.shots`` times and scores the samples.

    The cost signal handed to COBYLA is the sample mean (or the exact
    expectation when ``cfg.use_exact_expectation``). The lowest-cost sample
    seen anywhere is kept as ``record.best``. After the optimizer stops the
    returned parameters are sampled once more; that last distribution is
    the one whose mode is reported.
    """
    if ansatz.width != f.num_qubits:
        raise ValueError(f"ansatz has {ansatz.width} qubits, formulation {f.num_qubits}")
    if ansatz.width > cfg.max_qubits:
        raise sim.SimulationCapError(
            f"instance too large for simulation: {ansatz.width} qubits > cap {cfg.max_qubits}")
    n_params = len(ansatz.parameters)
    x0 = np.full(n_params, 0.01) if cfg.initial_params is None else np.asarray(cfg.initial_params, float)
    if x0.shape != (n_params,):
        raise ValueError(f"need {n_params} initial parameters")

    rng = np.random.default_rng(cfg.seed)
    energies = f.energies()
    record = RunRecord(seed=cfg.seed, num_qubits=f.num_qubits)
    history: list[float] = []

    def evaluate(x) -> float:
        state = sim.run(ansatz, list(x), max_qubits=cfg.max_qubits)
        shots = sim.sample(state, cfg.shots, rng)
        rows = [(b, c, float(energies[b])) for b, c in sorted(shots.counts.items())]
        if cfg.use_exact_expectation:
            signal = sim.exact_expectation(state, f)
        else:
            signal = sum(c * e for _, c, e in rows) / cfg.shots
        low = min(rows, key=lambda r: (r[2], r[0]))
        record.iterations.append(Iteration([float(v) for v in x], signal, rows, low[2], low[0]))
        if record.best is None or low[2] < record.best.cost:
            record.best = Best(low[0], low[2], len(record.iterations) - 1)
        return signal

    def objective(x) -> float:
        signal = evaluate(x)
        history.append(signal)
        if len(history) > CONVERGENCE_WINDOW:
            window = history[-CONVERGENCE_WINDOW - 1:]
            scale = max(abs(window[-1]), 1e-12)
            if all(abs(a - b) / scale < CONVERGENCE_RTOL for a, b in zip(window, window[1:])):
                raise _Converged
        return signal

    budget = cfg.max_evaluations - 1
    x_final = x0
    if budget >= 1:
        try:
            res = minimize(objective, x0, method="COBYLA",
                           options={"maxiter": budget, "rhobeg": cfg.rhobeg})
            x_final = res.x
            record.converged = bool(res.success)
        except _Converged:
            best_idx = int(np.argmin(history))
            x_final = np.asarray(record.iterations[best_idx].params)
            record.converged = True
    evaluate(x_final)
    record.final_params = [float(v) for v in x_final]
    return record


def repeat_seed(seed: int, repeat: int) -> int:
    """Independent, reproducible seed for one repeat of a seeded experiment."""
    return int(np.random.SeedSequence([seed, repeat]).generate_state(1)[0])


def best_measurement(record: RunRecord) -> tuple[int, float]:
    if not record.iterations or record.best is None:
        raise ValueError("empty run record")
    return record.best.bitstring, record.best.cost


def normalized_distance(found: Sequence[float], optimal: float) -> float:
    """Mean of ``|found - optimal| / |optimal|``."""
    if not found:
        raise ValueError("no found costs")
    if optimal == 0:
        raise ValueError("undefined normalization: optimal cost is 0")
    return float(sum(abs(x - optimal) for x in found) / abs(optimal) / len(found))
