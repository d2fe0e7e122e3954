"""Experiment runner: prepare a formulation, check it, and solve it repeatedly."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from . import qaoa
from .circuit import LADDER, Circuit, Metrics, build_ansatz, metrics
from .formulation import HUBO, QUBO, Formulation, build, route_objective
from .oracle import OracleResult, brute_force_min, enumerate_routes
from .problem import ProblemInstance, preprocess

FORMS = ("qubo", "hubo", "hubo_factored")


class PenaltyInsufficientError(RuntimeError):
    """The formulation's global minimum is not an optimal feasible route."""


def form_label(kind: str, factored: bool) -> str:
    return f"{kind}_factored" if factored else kind


def parse_form(label: str) -> tuple[str, bool]:
    if label not in FORMS and label != "qubo_factored":
        raise ValueError(f"unknown form {label!r}; expected one of {', '.join(FORMS)}")
    kind, _, rest = label.partition("_")
    return (QUBO if kind == "qubo" else HUBO), rest == "factored"


@dataclass
class Prepared:
    instance: ProblemInstance  # completed graph
    formulation: Formulation
    ansatz: Circuit
    metrics: Metrics
    optimum: OracleResult
    factored: bool

    @property
    def form(self) -> str:
        return form_label(self.formulation.kind, self.factored)

    @property
    def test(self) -> str:
        return self.instance.name or "instance"


def prepare(instance: ProblemInstance, kind: str, factored: bool = False,
            style: str = LADDER, p: int = 1, alpha: float | None = None) -> Prepared:
    completed, _, mask = preprocess(instance)
    f = build(completed, mask, kind, alpha)
    ansatz = build_ansatz(f.spin, p, factored, style, width=f.num_qubits)
    return Prepared(completed, f, ansatz, metrics(ansatz), enumerate_routes(completed), factored)


@dataclass(frozen=True)
class GateCheck:
    ok: bool
    brute_force: OracleResult
    route_value: float | None  # objective of the decoded minimiser, if feasible
    optimum: float


def penalty_gate(prep: Prepared, max_qubits: int = 24) -> GateCheck:
    """Does the formulation's global minimum decode to an optimal feasible route?"""
    bf = brute_force_min(prep.formulation, max_qubits)
    value = route_objective(bf.route, prep.instance) if bf.feasible else None
    opt = prep.optimum.value
    ok = (bf.feasible and prep.optimum.feasible and abs(value - opt) < 1e-9
          and abs(bf.value + prep.formulation.dropped_constant - opt) < 1e-6)
    return GateCheck(ok, bf, value, opt)


@dataclass
class Row:
    test: str
    form: str
    repeat: int
    seed: int
    qubits: int
    depth: int
    two_qubit_gates: int
    found_cost: float
    optimal_cost: float
    feasible: bool
    route: str | None

    def to_dict(self) -> dict:
        return asdict(self)


def solve(prep: Prepared, repeats: int = 10, seed: int = 0, shots: int = 1024,
          max_evaluations: int = 150, max_qubits: int = 24) -> list[Row]:
    """Run the optimizer ``repeats`` times with seeds derived from ``seed``.

    The found cost of a repeat is the full cost (constant included) of its
    best measurement, which equals the route objective when it decodes to
    a feasible route.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    f = prep.formulation
    rows = []
    for r in range(repeats):
        s = qaoa.repeat_seed(seed, r)
        cfg = qaoa.OptimizerConfig(max_evaluations=max_evaluations, shots=shots, seed=s,
                                   max_qubits=max_qubits)
        record = qaoa.optimize(prep.ansatz, f, cfg)
        bits, cost = qaoa.best_measurement(record)
        decoded = f.decode(bits)
        rows.append(Row(prep.test, prep.form, r, s, f.num_qubits, prep.metrics.depth,
                        prep.metrics.two_qubit_gates, cost + f.dropped_constant,
                        prep.optimum.value, decoded.feasible,
                        str(decoded.route) if decoded.feasible else None))
    return rows
