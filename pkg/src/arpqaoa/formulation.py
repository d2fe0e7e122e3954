"""QUBO and HUBO formulations of the Asset Retrieval Problem.

QUBO variables are moves ``x[u,v,i]`` (the agent goes u -> v on step i),
HUBO variables are positions ``x[u,i]`` (the agent is at u after step i).
Both use one-hot slack ``z[j]`` for ``total time + j == deadline``.

Each constraint polynomial is kept in ``Formulation.parts`` with its
constant, so it is nonnegative and vanishes exactly when the constraint
holds. The optimised polynomial ``Formulation.poly`` is
``objective + alpha * sum(constraints)`` with the constant moved to
``dropped_constant``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .poly import PBPoly, VarId, drop_constant, evaluate, loads, to_spin, SpinPoly
from .problem import FeasibilityMask, InfeasibleInstanceError, ProblemInstance

QUBO = "qubo"
HUBO = "hubo"


@dataclass(frozen=True)
class Route:
    path: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))

    def __len__(self):
        return len(self.path)

    def __str__(self):
        return " -> ".join(self.path)


@dataclass(frozen=True)
class Decoded:
    """Result of reading a bitstring back as a route."""

    route: Route | None
    violations: tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.route is not None and not self.violations

    @property
    def first_violation(self) -> str | None:
        return self.violations[0] if self.violations else None


@dataclass(frozen=True, eq=False)
class Formulation:
    poly: PBPoly
    registry: tuple
    alpha: float
    dropped_constant: float
    kind: str
    instance: ProblemInstance | None = None
    mask: FeasibilityMask | None = None
    parts: Mapping[str, PBPoly] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.registry)) != len(self.registry):
            raise ValueError("registry lists a variable twice")
        missing = set(self.poly.variables) - set(self.registry)
        if missing:
            names = ", ".join(sorted(map(str, missing))[:5])
            raise ValueError(f"registry mismatch: polynomial uses unregistered variables {names}")

    @classmethod
    def from_poly(cls, poly: PBPoly, registry: Sequence | None = None) -> "Formulation":
        """Wrap an arbitrary polynomial (no routing semantics)."""
        if registry is None:
            registry = sorted(poly.variables, key=lambda v: (type(v).__name__, v))
        body, const = drop_constant(poly)
        return cls(body, tuple(registry), 1.0, const, "custom")

    @property
    def num_qubits(self) -> int:
        return len(self.registry)

    @cached_property
    def index(self) -> dict:
        return {v: q for q, v in enumerate(self.registry)}

    @cached_property
    def indexed_poly(self) -> PBPoly:
        return self.poly.relabel(self.index)

    @cached_property
    def spin(self) -> SpinPoly:
        return to_spin(self.indexed_poly)

    def energies(self) -> np.ndarray:
        """``poly`` (constant dropped) on every bitstring; cached."""
        if "_energies" not in self.__dict__:
            self.__dict__["_energies"] = self.indexed_poly.table(self.num_qubits)
        return self.__dict__["_energies"]

    def assignment(self, bits) -> dict:
        return {v: int(b) for v, b in zip(self.registry, _as_bits(bits, self.num_qubits))}

    def evaluate_bits(self, bits) -> float:
        return evaluate(self.poly, self.assignment(bits))

    def encode(self, route: Route) -> tuple[int, ...]:
        return encode(route, self)

    def decode(self, bits) -> Decoded:
        return decode(bits, self)

    # -- external interface --------------------------------------------

    def registry_json(self) -> str:
        return json.dumps({str(v): q for q, v in enumerate(self.registry)}, indent=2) + "\n"

    def poly_text(self) -> str:
        return self.poly.dumps()

    @classmethod
    def from_text(cls, poly_text: str, registry_json: str, kind: str = "custom",
                  alpha: float = 1.0, dropped_constant: float = 0.0) -> "Formulation":
        reg = json.loads(registry_json)
        if sorted(reg.values()) != list(range(len(reg))):
            raise ValueError("registry mismatch: qubit indices must be 0..n-1 without gaps")
        registry = [None] * len(reg)
        for name, q in reg.items():
            registry[q] = VarId.parse(name)
        return cls(loads(poly_text, VarId.parse), tuple(registry), alpha, dropped_constant, kind)


def _as_bits(bits, n: int) -> tuple[int, ...]:
    if isinstance(bits, (int, np.integer)):
        return tuple((int(bits) >> q) & 1 for q in range(n))
    bits = tuple(int(b) for b in bits)
    if len(bits) != n:
        raise ValueError(f"expected {n} bits, got {len(bits)}")
    return bits


def bits_to_int(bits: Sequence[int]) -> int:
    return sum(int(b) << q for q, b in enumerate(bits))


def default_penalty(instance: ProblemInstance) -> float:
    if not instance.internal:
        raise ValueError("instance has no internal nodes")
    top = max(instance.value(u) for u in instance.internal)
    return 0.75 * top if top > 0 else 1.0


def unpruned_qubit_count(kind: str, internal_nodes: int, deadline: int) -> int:
    """Variables before pruning on a completed graph, slacks included.

    HUBO: one position per non-start node and inner step. QUBO: moves out
    of the start on step 1, then on every later step each internal node
    can move to any other node, plus the waiting loop at the end node.
    """
    n, T = internal_nodes, deadline
    slacks = T + 1
    if kind == HUBO:
        return (n + 1) * (T - 1) + slacks
    if kind == QUBO:
        return (n + 1) + (T - 1) * (n * n + 1) + slacks
    raise ValueError(f"unknown formulation kind {kind!r}")


def _square_minus(terms: list[PBPoly], target: float) -> PBPoly:
    inner = PBPoly.sum(terms) - target
    return inner * inner


def _pairs(vars_: list) -> PBPoly:
    out = {}
    for a in range(len(vars_)):
        for b in range(a + 1, len(vars_)):
            key = frozenset((vars_[a], vars_[b]))
            out[key] = out.get(key, 0.0) + 1.0
    return PBPoly(out)


def _slack(T: int) -> tuple[list[VarId], PBPoly, PBPoly]:
    zs = [VarId.slack(j) for j in range(T + 1)]
    one_hot = _square_minus([PBPoly.var(z) for z in zs], 1.0)
    weighted = PBPoly.sum(PBPoly.var(z, float(j)) for j, z in zip(range(T + 1), zs))
    return zs, one_hot, weighted


def _check_inputs(instance: ProblemInstance, mask: FeasibilityMask, alpha: float, allowed) -> None:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not instance.is_complete:
        raise ValueError("instance must be completed with complete_internal_graph first")
    if not allowed:
        raise InfeasibleInstanceError("instance infeasible: every variable was pruned")


def _assemble(kind, instance, mask, alpha, registry, objective, constraints) -> Formulation:
    full = objective + PBPoly.sum(constraints.values()) * alpha
    body, const = drop_constant(full)
    parts = {kind[0].upper() + "0": objective, **constraints}
    return Formulation(body, tuple(registry), alpha, const, kind, instance, mask, parts)


def build_qubo(instance: ProblemInstance, mask: FeasibilityMask, alpha: float) -> Formulation:
    allowed = mask.qubo_allowed
    _check_inputs(instance, mask, alpha, allowed)
    A, B, T = instance.start, instance.end, instance.deadline
    order = {n: k for k, n in enumerate(instance.nodes)}
    moves = sorted(allowed, key=lambda m: (m[2], order[m[0]], order[m[1]]))
    xs = {m: VarId.edge(*m) for m in moves}
    zs, q5, slack_time = _slack(T)

    def at_step(i, pred=lambda u, v: True):
        return [xs[m] for m in moves if m[2] == i and pred(m[0], m[1])]

    q0 = PBPoly.sum(PBPoly.var(x, -instance.value(m[1]))
                    for m, x in xs.items() if m[1] in instance.internal)

    q1 = PBPoly.sum(_pairs([x for m, x in xs.items() if m[1] == v]) for v in instance.internal)

    q2_terms = []
    for i in range(2, T):
        q2_terms.append(_square_minus([PBPoly.var(x) for x in at_step(i)], 1.0))
    q2_terms.append(_square_minus([PBPoly.var(x) for x in at_step(1, lambda u, v: u == A)], 1.0))
    q2_terms.append(_square_minus([PBPoly.var(x) for x in at_step(T, lambda u, v: v == B)], 1.0))
    q2 = PBPoly.sum(q2_terms)

    travel = PBPoly.sum(PBPoly.var(x, float(instance.time(m[0], m[1]))) for m, x in xs.items())
    q3 = (travel + slack_time - T) ** 2

    q4_terms = []
    for i in range(2, T + 1):
        for v in (*instance.internal, B):
            arrive = [PBPoly.var(x) for m, x in xs.items() if m[2] == i - 1 and m[1] == v]
            leave = [PBPoly.var(x, -1.0) for m, x in xs.items() if m[2] == i and m[0] == v]
            if arrive or leave:
                q4_terms.append(PBPoly.sum(arrive + leave) ** 2)
    q4 = PBPoly.sum(q4_terms)

    constraints = {"Q1": q1, "Q2": q2, "Q3": q3, "Q4": q4, "Q5": q5}
    return _assemble(QUBO, instance, mask, alpha, [*xs.values(), *zs], q0, constraints)


def build_hubo(instance: ProblemInstance, mask: FeasibilityMask, alpha: float) -> Formulation:
    allowed = mask.hubo_allowed
    _check_inputs(instance, mask, alpha, allowed)
    A, B, T = instance.start, instance.end, instance.deadline
    order = {n: k for k, n in enumerate(instance.nodes)}
    positions = sorted(allowed, key=lambda a: (a[1], order[a[0]]))
    xs = {a: VarId.node(*a) for a in positions}
    zs, h5, slack_time = _slack(T)

    def pos(u: str, i: int) -> PBPoly:
        # boundary: start at step 0, end at step T, everything else fixed to 0
        if i == 0:
            return PBPoly.const(1.0 if u == A else 0.0)
        if i == T:
            return PBPoly.const(1.0 if u == B else 0.0)
        x = xs.get((u, i))
        return PBPoly.var(x) if x is not None else PBPoly()

    h0 = PBPoly.sum(PBPoly.var(x, -instance.value(u))
                    for (u, i), x in xs.items() if u in instance.internal)

    h1 = PBPoly.sum(_pairs([x for (u, i), x in xs.items() if u == v]) for v in instance.internal)

    h2 = PBPoly.sum(_square_minus([PBPoly.var(x) for (u, j), x in xs.items() if j == i], 1.0)
                    for i in range(1, T))

    travel_terms = []
    for i in range(1, T + 1):
        for u in instance.nodes:
            left = pos(u, i - 1)
            if left.is_zero():
                continue
            for v in instance.nodes:
                if v == u or not instance.has_edge(u, v):
                    continue
                right = pos(v, i)
                if not right.is_zero():
                    travel_terms.append(left * right * float(instance.time(u, v)))
    h3 = (PBPoly.sum(travel_terms) + slack_time - T) ** 2

    near_b = set(instance.neighbors(B))
    h4_terms = []
    for i in range(2, T + 1):
        for u in instance.nodes:
            if u != B and u not in near_b:
                h4_terms.append(pos(u, i - 1) * pos(B, i))
    for i in range(1, T - 1):
        for u in instance.nodes:
            if u != B:
                h4_terms.append(pos(B, i) * pos(u, i + 1))
    h4 = PBPoly.sum(h4_terms)

    constraints = {"H1": h1, "H2": h2, "H3": h3, "H4": h4, "H5": h5}
    return _assemble(HUBO, instance, mask, alpha, [*xs.values(), *zs], h0, constraints)


def build(instance: ProblemInstance, mask: FeasibilityMask, kind: str,
          alpha: float | None = None) -> Formulation:
    if alpha is None:
        alpha = default_penalty(instance)
    if kind == QUBO:
        return build_qubo(instance, mask, alpha)
    if kind == HUBO:
        return build_hubo(instance, mask, alpha)
    raise ValueError(f"unknown formulation kind {kind!r}")


# -- routes ----------------------------------------------------------------

def route_time(route: Route, instance: ProblemInstance) -> int:
    return sum(instance.time(a, b) for a, b in zip(route.path, route.path[1:]))


def is_feasible(route: Route, instance: ProblemInstance) -> tuple[bool, list[str]]:
    """Check a route of exactly ``deadline`` hops; returns (ok, violations)."""
    path = route.path
    A, B, T = instance.start, instance.end, instance.deadline
    violations = []
    if len(path) != T + 1:
        violations.append("length")
    if not path or path[0] != A:
        violations.append("start")
    if not path or path[-1] != B:
        violations.append("end")
    for a, b in zip(path, path[1:]):
        if a not in instance.nodes or b not in instance.nodes or not instance.has_edge(a, b):
            violations.append("edge")
            break
    if A in path[1:]:
        violations.append("revisit-start")
    if B in path:
        first = path.index(B)
        if any(p != B for p in path[first:]):
            violations.append("leave-end")
    inner = [p for p in path if p in instance.internal]
    if len(inner) != len(set(inner)):
        violations.append("visit-once")
    if "edge" not in violations and route_time(route, instance) > T:
        violations.append("time")
    return not violations, violations


def route_objective(route: Route, instance: ProblemInstance) -> float:
    ok, violations = is_feasible(route, instance)
    if not ok:
        raise ValueError(f"infeasible route {route}: {violations}")
    return -sum(instance.value(u) for u in set(route.path) if u in instance.internal)


def encode(route: Route, f: Formulation) -> tuple[int, ...]:
    """Bitstring (qubit order) for a feasible route; raises if a needed variable is pruned."""
    inst = f.instance
    path, T = route.path, inst.deadline
    on = set()
    if f.kind == QUBO:
        for i in range(1, T + 1):
            on.add(VarId.edge(path[i - 1], path[i], i))
    elif f.kind == HUBO:
        for i in range(1, T):
            on.add(VarId.node(path[i], i))
    else:
        raise ValueError("encode needs a routing formulation")
    on.add(VarId.slack(T - route_time(route, inst)))
    missing = on - set(f.registry)
    if missing:
        raise KeyError(f"route {route} needs pruned variables {sorted(map(str, missing))}")
    return tuple(int(v in on) for v in f.registry)


def decode(bits, f: Formulation) -> Decoded:
    """Read a bitstring as a route, reporting violated constraint polynomials."""
    if f.kind not in (QUBO, HUBO):
        raise ValueError("decode needs a routing formulation")
    assignment = f.assignment(bits)
    violations = tuple(label for label, part in f.parts.items()
                       if label[1] != "0" and evaluate(part, assignment) > 1e-9)
    if violations:
        return Decoded(None, violations)
    inst = f.instance
    T = inst.deadline
    on = [v for v, b in assignment.items() if b]
    path = [inst.start] + [None] * (T - 1) + [inst.end]
    if f.kind == HUBO:
        for v in on:
            if v.kind == "node":
                path[v.step] = v.u
    else:
        for v in on:
            if v.kind == "edge":
                path[v.step] = v.v
    route = Route(tuple(path))
    ok, problems = is_feasible(route, inst)
    return Decoded(route, () if ok else tuple(problems))
