"""Exact reference answers: exhaustive bitstring search and route search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .formulation import Formulation, Route, route_objective
from .problem import ProblemInstance, complete_internal_graph, shortest_paths

MAX_BRUTE_FORCE_QUBITS = 24
TIE_TOL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    value: float
    feasible: bool
    tie_count: int
    assignment: tuple[int, ...] | None = None
    route: Route | None = None


def brute_force_min(f: Formulation, max_qubits: int = MAX_BRUTE_FORCE_QUBITS) -> OracleResult:
    """Global minimum of ``f.poly`` over all 2^n bitstrings.

    The first minimiser in integer order is returned. ``feasible`` reports
    whether it decodes to a valid route (always True for non-routing
    formulations).
    """
    n = f.num_qubits
    if n > max_qubits:
        raise ValueError(f"{n} qubits exceeds the brute-force limit of {max_qubits}")
    energies = f.energies()
    best = int(np.argmin(energies))
    value = float(energies[best])
    ties = int(np.count_nonzero(energies <= value + TIE_TOL))
    bits = tuple((best >> q) & 1 for q in range(n))
    feasible = True
    route = None
    if f.instance is not None:
        decoded = f.decode(bits)
        feasible, route = decoded.feasible, decoded.route
    return OracleResult(value, feasible, ties, bits, route)


def feasible_routes(instance: ProblemInstance) -> Iterator[Route]:
    """Every feasible route on the completed graph, depth first in node order."""
    inst = instance if instance.is_complete else complete_internal_graph(instance, shortest_paths(instance))
    A, B, T = inst.start, inst.end, inst.deadline

    def walk(path: list[str], elapsed: int):
        here = path[-1]
        if here == B:
            yield Route(tuple(path) + (B,) * (T + 1 - len(path)))
            return
        if len(path) > T:
            return
        for nxt in (*inst.internal, B):
            if nxt in path:
                continue
            t = inst.time(here, nxt)
            if elapsed + t <= T:
                path.append(nxt)
                yield from walk(path, elapsed + t)
                path.pop()

    yield from walk([A], 0)


def enumerate_routes(instance: ProblemInstance) -> OracleResult:
    """Best route by exhaustive search with an optimistic-bound prune.

    Branches whose collected value plus every unvisited asset cannot reach
    the incumbent are cut; equal-valued branches are still explored so the
    tie count is exact.
    """
    inst = instance if instance.is_complete else complete_internal_graph(instance, shortest_paths(instance))
    A, B, T = inst.start, inst.end, inst.deadline
    values = {u: inst.value(u) for u in inst.internal}
    best = {"value": None, "route": None, "ties": 0}

    def record(path, collected):
        if best["value"] is None or collected > best["value"] + 1e-12:
            best.update(value=collected, route=Route(tuple(path) + (B,) * (T + 1 - len(path))), ties=1)
        elif abs(collected - best["value"]) <= 1e-12:
            best["ties"] += 1

    def walk(path, elapsed, collected, remaining):
        here = path[-1]
        if here == B:
            record(path, collected)
            return
        if best["value"] is not None and collected + remaining < best["value"] - 1e-12:
            return
        for nxt in (*inst.internal, B):
            if nxt in path:
                continue
            t = inst.time(here, nxt)
            if elapsed + t > T:
                continue
            path.append(nxt)
            gain = values.get(nxt, 0.0)
            walk(path, elapsed + t, collected + gain, remaining - gain)
            path.pop()

    walk([A], 0, 0.0, sum(values.values()))
    if best["route"] is None:
        return OracleResult(0.0, False, 0)
    value = route_objective(best["route"], inst)
    return OracleResult(value, True, best["ties"], route=best["route"])
