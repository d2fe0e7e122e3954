"""Random instance generation and the four shipped canonical instances."""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .problem import ProblemInstance, shortest_paths

# (internal nodes, deadline) of the four benchmark shapes
CANONICAL_SHAPES = {1: (2, 4), 2: (3, 5), 3: (3, 6), 4: (4, 6)}


def random_instance(internal_nodes: int, deadline: int, seed: int = 0,
                    value_range: tuple[int, int] = (5, 30),
                    time_range: tuple[int, int] = (1, 3),
                    edge_probability: float = 0.4,
                    max_tries: int = 1000) -> ProblemInstance:
    """Connected random graph whose end node is reachable by the deadline.

    A random spanning tree guarantees connectivity; other node pairs get
    an edge with ``edge_probability``. Times and asset values are uniform
    integers in the closed ranges given.
    """
    if internal_nodes < 1:
        raise ValueError("need at least one internal node")
    if deadline < 1:
        raise ValueError("deadline must be positive")
    lo_v, hi_v = value_range
    lo_t, hi_t = time_range
    if lo_v < 0 or hi_v < lo_v:
        raise ValueError(f"invalid value range {value_range}")
    if lo_t < 1 or hi_t < lo_t:
        raise ValueError(f"invalid time range {time_range}")

    rng = np.random.default_rng(seed)
    internal = tuple(str(k) for k in range(1, internal_nodes + 1))
    nodes = ("A", *internal, "B")
    for _ in range(max_tries):
        edges = {}
        order = rng.permutation(len(nodes))
        for k in range(1, len(nodes)):
            u = nodes[order[k]]
            v = nodes[order[rng.integers(k)]]
            edges[frozenset((u, v))] = int(rng.integers(lo_t, hi_t + 1))
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                key = frozenset((nodes[a], nodes[b]))
                if key not in edges and rng.random() < edge_probability:
                    edges[key] = int(rng.integers(lo_t, hi_t + 1))
        values = {u: float(rng.integers(lo_v, hi_v + 1)) for u in internal}
        inst = ProblemInstance("A", "B", internal, values, edges, deadline)
        if shortest_paths(inst)("A", "B") <= deadline:
            return inst
    raise ValueError("could not generate a feasible instance; loosen the deadline or time range")


def canonical_instance(k: int) -> ProblemInstance:
    if k not in CANONICAL_SHAPES:
        raise ValueError(f"canonical instances are numbered 1-{len(CANONICAL_SHAPES)}")
    text = resources.files("arpqaoa").joinpath("instances", f"case{k}.json").read_text()
    return ProblemInstance.from_dict(json.loads(text), name=f"case{k}")


def canonical_instances() -> dict[int, ProblemInstance]:
    return {k: canonical_instance(k) for k in CANONICAL_SHAPES}
