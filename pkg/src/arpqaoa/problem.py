"""Asset Retrieval Problem instances and classical graph pre-processing.

An instance is an undirected graph with a start node, an end node and a
set of internal (asset-bearing) nodes. Edge weights are integer traversal
times and the agent has a deadline. Routes always consist of exactly
``deadline`` hops: once the agent reaches the end node it stays there via
a zero-time self-loop.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import networkx as nx

_ID_PATTERN = re.compile(r"^[A-Za-z0-9_.\-]+$")


class InfeasibleInstanceError(ValueError):
    """No route can reach the end node within the deadline."""


def _pair(u: str, v: str) -> frozenset:
    return frozenset((u, v))


@dataclass(frozen=True)
class ProblemInstance:
    start: str
    end: str
    internal: tuple[str, ...]
    asset_value: Mapping[str, float]
    edges: Mapping[frozenset, int]
    deadline: int
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "internal", tuple(self.internal))
        object.__setattr__(self, "asset_value", dict(self.asset_value))
        object.__setattr__(self, "edges", {frozenset(k): v for k, v in self.edges.items()})
        if self.start == self.end:
            raise ValueError("start and end must differ")
        if self.start in self.internal or self.end in self.internal:
            raise ValueError("start/end cannot be internal nodes")
        if len(set(self.internal)) != len(self.internal):
            raise ValueError("duplicate internal node ids")
        for node in self.nodes:
            if not _ID_PATTERN.match(node):
                raise ValueError(f"invalid node id {node!r}")
        for node, value in self.asset_value.items():
            if node not in self.nodes:
                raise ValueError(f"asset value for unknown node {node!r}")
            if value < 0:
                raise ValueError(f"negative asset value at {node!r}")
        for node in (self.start, self.end):
            if self.asset_value.get(node, 0) != 0:
                raise ValueError(f"{node!r} is start/end and must have asset value 0")
        object.__setattr__(self, "asset_value",
                           {u: float(self.asset_value.get(u, 0.0)) for u in self.internal})
        for key, t in self.edges.items():
            if len(key) != 2:
                raise ValueError(f"self-loop {sorted(key)} not allowed")
            for node in key:
                if node not in self.nodes:
                    raise ValueError(f"edge references unknown node {node!r}")
            if not isinstance(t, int) or isinstance(t, bool) or t < 1:
                raise ValueError(f"edge {sorted(key)} must have integer time >= 1, got {t!r}")
        if not isinstance(self.deadline, int) or self.deadline < 1:
            raise ValueError("deadline must be a positive integer")
        reached = _reachable(self.start, self.nodes, self.edges)
        for node in self.nodes:
            if node not in reached:
                raise ValueError(f"unreachable node {node!r}")

    @property
    def nodes(self) -> tuple[str, ...]:
        return (self.start, *self.internal, self.end)

    def value(self, node: str) -> float:
        return float(self.asset_value.get(node, 0.0))

    def has_edge(self, u: str, v: str) -> bool:
        if u == v:
            return u == self.end
        return _pair(u, v) in self.edges

    def time(self, u: str, v: str) -> int:
        """Traversal time; the end node's self-loop takes zero time."""
        if u == v == self.end:
            return 0
        return self.edges[_pair(u, v)]

    def neighbors(self, u: str) -> list[str]:
        return [v for v in self.nodes if v != u and _pair(u, v) in self.edges]

    @property
    def is_complete(self) -> bool:
        n = len(self.nodes)
        return len(self.edges) == n * (n - 1) // 2

    def with_deadline(self, deadline: int) -> "ProblemInstance":
        return ProblemInstance(self.start, self.end, self.internal, self.asset_value,
                               self.edges, deadline, self.name)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        order = {n: k for k, n in enumerate(self.nodes)}
        edges = [(sorted(k, key=order.__getitem__), t) for k, t in self.edges.items()]
        edges.sort(key=lambda e: (order[e[0][0]], order[e[0][1]]))
        return {
            "nodes": [{"id": n, "asset_value": self.value(n)} for n in self.nodes],
            "start": self.start,
            "end": self.end,
            "edges": [{"u": u, "v": v, "time": t} for (u, v), t in edges],
            "deadline": self.deadline,
        }

    @classmethod
    def from_dict(cls, data: Mapping, name: str = "") -> "ProblemInstance":
        _check_keys(data, {"nodes", "start", "end", "edges", "deadline"}, "instance")
        values = {}
        order = []
        for node in data["nodes"]:
            _check_keys(node, {"id", "asset_value"}, "node")
            node_id = str(node["id"])
            if node_id in values:
                raise ValueError(f"duplicate node {node_id!r}")
            values[node_id] = float(node["asset_value"])
            order.append(node_id)
        start, end = str(data["start"]), str(data["end"])
        for node in (start, end):
            if node not in values:
                raise ValueError(f"{node!r} is not listed in nodes")
        edges = {}
        for edge in data["edges"]:
            _check_keys(edge, {"u", "v", "time"}, "edge")
            key = _pair(str(edge["u"]), str(edge["v"]))
            if key in edges:
                raise ValueError(f"duplicate edge {sorted(key)}")
            edges[key] = edge["time"]
        internal = tuple(n for n in order if n not in (start, end))
        return cls(start, end, internal, values, edges, data["deadline"], name)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "ProblemInstance":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), name=path.stem)


def _check_keys(obj: Mapping, allowed: set, what: str) -> None:
    if not isinstance(obj, Mapping):
        raise ValueError(f"{what} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown {what} keys: {sorted(unknown)}")
    missing = allowed - set(obj)
    if missing:
        raise ValueError(f"missing {what} keys: {sorted(missing)}")


def _reachable(source: str, nodes: Iterable[str], edges: Mapping[frozenset, int]) -> set:
    adj = {n: [] for n in nodes}
    for key in edges:
        u, v = tuple(key)
        adj[u].append(v)
        adj[v].append(u)
    seen = {source}
    stack = [source]
    while stack:
        for v in adj[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


@dataclass(frozen=True)
class DistanceTable:
    dist: Mapping[tuple[str, str], int]

    def __call__(self, u: str, v: str) -> int:
        return self.dist[(u, v)]


@dataclass(frozen=True)
class FeasibilityMask:
    """Variables that can appear in at least one feasible route.

    ``hubo_allowed`` holds ``(node, step)`` pairs and ``qubo_allowed`` holds
    ``(from, to, step)`` triples.
    """

    hubo_allowed: frozenset
    qubo_allowed: frozenset


def shortest_paths(instance: ProblemInstance) -> DistanceTable:
    """All-pairs shortest traversal times (Dijkstra from every node)."""
    graph = nx.Graph()
    graph.add_nodes_from(instance.nodes)
    for key, t in instance.edges.items():
        u, v = tuple(key)
        graph.add_edge(u, v, weight=t)
    dist = {}
    for source, lengths in nx.all_pairs_dijkstra_path_length(graph, weight="weight"):
        for target in instance.nodes:
            if target not in lengths:
                raise ValueError(f"unreachable node {target!r}")
            dist[(source, target)] = int(lengths[target])
    return DistanceTable(dist)


def complete_internal_graph(instance: ProblemInstance, dist: DistanceTable) -> ProblemInstance:
    """Join every pair of nodes by an edge whose time is their shortest-path time."""
    nodes = instance.nodes
    edges = {}
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            u, v = nodes[a], nodes[b]
            edges[_pair(u, v)] = dist(u, v)
    return ProblemInstance(instance.start, instance.end, instance.internal,
                           instance.asset_value, edges, instance.deadline, instance.name)


def earliest_arrival(instance: ProblemInstance, hops: int) -> list[dict[str, float]]:
    """``out[i][u]``: least time of an ``i``-hop walk from start to internal node ``u``.

    Walks move along edges, never stay put and never pass through the start
    or end node, so every prefix of a feasible route is such a walk.
    """
    inf = float("inf")
    A = instance.start
    out = [{u: inf for u in instance.internal} for _ in range(hops + 1)]
    if hops >= 1:
        for u in instance.internal:
            if instance.has_edge(A, u):
                out[1][u] = instance.time(A, u)
    for i in range(2, hops + 1):
        for v in instance.internal:
            out[i][v] = min((out[i - 1][u] + instance.time(u, v) for u in instance.internal
                             if u != v and instance.has_edge(u, v)), default=inf)
    return out


def prune_variables(instance: ProblemInstance, dist: DistanceTable) -> FeasibilityMask:
    """Keep only variables some feasible route can switch on.

    Step indices count hops, not time. Being at internal node ``u`` after
    hop ``i`` takes at least ``earliest_arrival(i)[u]`` time, and the end
    node is still ``dist(u, end)`` away. The end node itself stays allowed
    at every step once the instance is feasible (the agent waits there).
    """
    A, B, T = instance.start, instance.end, instance.deadline
    if dist(A, B) > T:
        return FeasibilityMask(frozenset(), frozenset())
    early = earliest_arrival(instance, T)

    hubo = set()
    for i in range(1, T):
        hubo.add((B, i))
        for u in instance.internal:
            if early[i][u] + dist(u, B) <= T:
                hubo.add((u, i))

    qubo = set()
    for v in (*instance.internal, B):
        if instance.has_edge(A, v) and instance.time(A, v) + dist(v, B) <= T:
            qubo.add((A, v, 1))
    for i in range(2, T + 1):
        qubo.add((B, B, i))
        for u in instance.internal:
            for v in (*instance.internal, B):
                if u == v or not instance.has_edge(u, v):
                    continue
                if early[i - 1][u] + instance.time(u, v) + dist(v, B) <= T:
                    qubo.add((u, v, i))
    return FeasibilityMask(frozenset(hubo), frozenset(qubo))


def preprocess(instance: ProblemInstance) -> tuple[ProblemInstance, DistanceTable, FeasibilityMask]:
    """Complete the graph and prune; raises if no route meets the deadline."""
    dist = shortest_paths(instance)
    if dist(instance.start, instance.end) > instance.deadline:
        raise InfeasibleInstanceError(
            f"shortest route takes {dist(instance.start, instance.end)} > deadline {instance.deadline}")
    completed = complete_internal_graph(instance, dist)
    return completed, dist, prune_variables(completed, dist)
