import numpy as np
import pytest

from arpqaoa.circuit import build_ansatz
from arpqaoa.formulation import HUBO, QUBO, Formulation, build
from arpqaoa.generate import canonical_instance
from arpqaoa.poly import PBPoly
from arpqaoa.problem import preprocess
from arpqaoa.qaoa import (OptimizerConfig, best_measurement, normalized_distance, optimize,
                          repeat_seed)
from arpqaoa.sim import SimulationCapError, run


def _case1(kind=HUBO):
    full, _, mask = preprocess(canonical_instance(1))
    f = build(full, mask, kind)
    return f, build_ansatz(f.spin, 1, width=f.num_qubits)


def test_normalized_distance_examples():
    assert normalized_distance([-5.0] * 10, -5.0) == 0.0
    found = [-76.0] + [-76.75] * 9
    assert normalized_distance(found, -76.75) == pytest.approx(0.75 / 76.75 / 10)
    assert normalized_distance(found, -76.75) == pytest.approx(0.000977, abs=5e-7)
    assert normalized_distance([-8.0], -4.0) == 1.0
    with pytest.raises(ValueError, match="undefined normalization"):
        normalized_distance([1.0], 0.0)
    with pytest.raises(ValueError):
        normalized_distance([], -1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(max_evaluations=0)
    with pytest.raises(ValueError):
        OptimizerConfig(shots=0)


def test_constant_polynomial_returns_constant():
    f = Formulation.from_poly(PBPoly(constant=5.0), registry=["dummy"])
    c = build_ansatz(f.spin, 1, width=1)
    rec = optimize(c, f, OptimizerConfig(max_evaluations=1, shots=16))
    assert len(rec.iterations) == 1
    bits, cost = best_measurement(rec)
    assert cost + f.dropped_constant == 5.0


def _one_qubit_expectation(c0, h, gamma, beta):
    # E = c0 + h z with z = 2b - 1: the cost layer rotates |+> about Z by -2 h gamma,
    # the mixer about X by 2 beta, leaving <z> = sin(2 h gamma) sin(2 beta)
    return c0 + h * np.sin(2 * h * gamma) * np.sin(2 * beta)


def test_one_qubit_closed_form_matches_simulation():
    f = Formulation.from_poly(PBPoly({frozenset(["b"]): 3.0}, 1.0))
    c0, h = f.spin.constant + f.dropped_constant, f.spin.terms[frozenset([0])]
    assert (c0, h) == (2.5, 1.5)
    c = build_ansatz(f.spin, 1, width=1)
    for gamma, beta in [(0.3, 0.2), (-1.1, 0.7), (2.0, -0.4)]:
        p = run(c, [gamma, beta]).probabilities
        assert p[1] * 3.0 + 1.0 == pytest.approx(_one_qubit_expectation(c0, h, gamma, beta))


def test_optimizer_reaches_one_qubit_optimum():
    f = Formulation.from_poly(PBPoly({frozenset(["b"]): 3.0}, 1.0))
    c = build_ansatz(f.spin, 1, width=1)
    rec = optimize(c, f, OptimizerConfig(use_exact_expectation=True, shots=64, seed=1))
    analytic_min = f.spin.constant - abs(f.spin.terms[frozenset([0])])
    assert rec.iterations[-1].cost_signal == pytest.approx(analytic_min, abs=1e-3)
    assert len(rec.iterations) <= 150


def test_runs_are_deterministic():
    f, c = _case1()
    cfg = OptimizerConfig(max_evaluations=25, shots=256, seed=11)
    assert optimize(c, f, cfg).to_json() == optimize(c, f, cfg).to_json()
    other = optimize(c, f, OptimizerConfig(max_evaluations=25, shots=256, seed=12))
    assert other.to_json() != optimize(c, f, cfg).to_json()


def test_best_measurement_is_the_scan_minimum():
    f, c = _case1(QUBO)
    rec = optimize(c, f, OptimizerConfig(max_evaluations=20, shots=128, seed=3))
    costs = [(cost, b) for it in rec.iterations for b, _, cost in it.samples]
    bits, cost = best_measurement(rec)
    assert cost == min(costs)[0]
    assert f.energies()[bits] == cost
    running = np.minimum.accumulate([it.min_cost for it in rec.iterations])
    assert rec.best.cost == running[-1]
    assert rec.best.cost == rec.iterations[rec.best.iteration].min_cost
    assert cost <= rec.final_mode()[1]


def test_budget_and_record_shape():
    f, c = _case1()
    rec = optimize(c, f, OptimizerConfig(max_evaluations=7, shots=32, seed=0))
    assert len(rec.iterations) <= 7
    assert rec.final_params == rec.iterations[-1].params
    d = rec.to_dict(include_samples=False)
    assert "samples" not in d["iterations"][0]
    assert d["num_qubits"] == f.num_qubits


def test_initial_parameters_and_errors():
    f, c = _case1()
    with pytest.raises(ValueError, match="initial"):
        optimize(c, f, OptimizerConfig(initial_params=(0.1,)))
    rec = optimize(c, f, OptimizerConfig(max_evaluations=1, initial_params=(0.2, 0.3)))
    assert rec.iterations[0].params == [0.2, 0.3]
    with pytest.raises(SimulationCapError):
        optimize(c, f, OptimizerConfig(max_qubits=f.num_qubits - 1))
    other = Formulation.from_poly(PBPoly({frozenset(["a"]): 1.0}))
    with pytest.raises(ValueError, match="qubits"):
        optimize(c, other)


def test_best_measurement_rejects_empty_record():
    from arpqaoa.qaoa import RunRecord
    with pytest.raises(ValueError, match="empty"):
        best_measurement(RunRecord())


def test_repeat_seeds_are_stable_and_distinct():
    seeds = [repeat_seed(0, r) for r in range(10)]
    assert seeds == [repeat_seed(0, r) for r in range(10)]
    assert len(set(seeds)) == 10
    assert repeat_seed(1, 0) != repeat_seed(0, 0)
