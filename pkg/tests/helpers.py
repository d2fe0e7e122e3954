"""Independent reference implementations used as test oracles."""

from __future__ import annotations

from itertools import product

import numpy as np

from arpqaoa.formulation import HUBO, QUBO
from arpqaoa.generate import random_instance
from arpqaoa.poly import PBPoly
from arpqaoa.problem import ProblemInstance


def floyd_warshall(inst: ProblemInstance) -> dict:
    nodes = inst.nodes
    inf = float("inf")
    d = {(u, v): (0 if u == v else inf) for u in nodes for v in nodes}
    for key, t in inst.edges.items():
        u, v = tuple(key)
        d[(u, v)] = d[(v, u)] = min(d[(u, v)], t)
    for k in nodes:
        for i in nodes:
            for j in nodes:
                if d[(i, k)] + d[(k, j)] < d[(i, j)]:
                    d[(i, j)] = d[(i, k)] + d[(k, j)]
    return d


def line_instance(times=(1, 1), values=(10.0,), deadline=3) -> ProblemInstance:
    """A - 1 - ... - B path graph."""
    internal = tuple(str(k) for k in range(1, len(values) + 1))
    nodes = ("A", *internal, "B")
    edges = {frozenset((a, b)): t for a, b, t in zip(nodes, nodes[1:], times)}
    return ProblemInstance("A", "B", internal, dict(zip(internal, values)), edges, deadline)


def small_instances(max_internal=3, max_deadline=5, seeds=range(4)):
    for n in range(1, max_internal + 1):
        for T in range(2, max_deadline + 1):
            for s in seeds:
                try:
                    yield random_instance(n, T, seed=s)
                except ValueError:
                    continue


def random_pbpoly(rng: np.random.Generator, n: int, n_terms: int, max_degree: int,
                  labels=None) -> PBPoly:
    labels = list(range(n)) if labels is None else labels
    terms = {}
    for _ in range(n_terms):
        k = int(rng.integers(1, max_degree + 1))
        key = frozenset(rng.choice(n, size=min(k, n), replace=False).tolist())
        terms[frozenset(labels[q] for q in key)] = float(rng.normal())
    return PBPoly(terms, float(rng.normal()))


def all_bits(n: int):
    return product((0, 1), repeat=n)


# -- constraint checkers written as direct counts ------------------------------

def _on(assignment, kind):
    return [v for v, b in assignment.items() if b and v.kind == kind]


def qubo_constraints(f, assignment) -> dict[str, bool]:
    inst = f.instance
    A, B, T = inst.start, inst.end, inst.deadline
    moves = _on(assignment, "edge")
    slacks = _on(assignment, "slack")
    ok = {}
    ok["Q1"] = all(sum(m.v == v for m in moves) <= 1 for v in inst.internal)
    steps = []
    for i in range(1, T + 1):
        if i == 1:
            count = sum(m.step == 1 and m.u == A for m in moves)
        elif i == T:
            count = sum(m.step == T and m.v == B for m in moves)
        else:
            count = sum(m.step == i for m in moves)
        steps.append(count == 1)
    ok["Q2"] = all(steps)
    total = sum(inst.time(m.u, m.v) for m in moves) + sum(z.step for z in slacks)
    ok["Q3"] = total == T
    flow = True
    for i in range(2, T + 1):
        for v in (*inst.internal, B):
            arrive = sum(m.step == i - 1 and m.v == v for m in moves)
            leave = sum(m.step == i and m.u == v for m in moves)
            flow &= arrive == leave
    ok["Q4"] = flow
    ok["Q5"] = len(slacks) == 1
    return ok


def hubo_constraints(f, assignment) -> dict[str, bool]:
    inst = f.instance
    A, B, T = inst.start, inst.end, inst.deadline
    at = {(v.u, v.step) for v in _on(assignment, "node")}
    slacks = _on(assignment, "slack")

    def here(u, i):
        if i == 0:
            return u == A
        if i == T:
            return u == B
        return (u, i) in at

    ok = {}
    ok["H1"] = all(sum(here(v, i) for i in range(1, T)) <= 1 for v in inst.internal)
    ok["H2"] = all(sum(here(u, i) for u in inst.nodes) == 1 for i in range(1, T))
    total = 0
    for i in range(1, T + 1):
        for u in inst.nodes:
            for v in inst.nodes:
                if u != v and inst.has_edge(u, v) and here(u, i - 1) and here(v, i):
                    total += inst.time(u, v)
    total += sum(z.step for z in slacks)
    ok["H3"] = total == T
    near = set(inst.neighbors(B))
    bad = any(here(u, i - 1) and here(B, i)
              for i in range(2, T + 1) for u in inst.nodes if u != B and u not in near)
    bad |= any(here(B, i) and here(u, i + 1)
               for i in range(1, T - 1) for u in inst.nodes if u != B)
    ok["H4"] = not bad
    ok["H5"] = len(slacks) == 1
    return ok


def constraint_checker(kind):
    return {QUBO: qubo_constraints, HUBO: hubo_constraints}[kind]
