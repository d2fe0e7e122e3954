"""Gate-level circuits for QAOA with phase-gadget synthesis.

A term ``c * Z_a Z_b ... Z_k`` becomes a phase gadget: CNOTs collect the
parity of the term's qubits onto one target, an RZ rotates it, and the
CNOTs are undone. Terms whose qubit sets form a subset chain can share
one CNOT scaffold (``factor_terms`` / ``synth_group``).

Bit convention: qubit 0 is the least-significant bit of a basis-state
index, and measured bit ``b`` means ``x = b``. Since ``RZ`` acts on ``|b>``
with eigenvalue ``1 - 2b = -z``, a ``k``-qubit gadget flips the sign of its
angle when ``k`` is odd so that the cost layer applies
``exp(-i * gamma * (E(b) - const))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .poly import SpinPoly

LADDER = "ladder"
TREE = "tree"


@dataclass(frozen=True)
class Param:
    """Symbolic angle ``multiplier * value(name)``."""

    name: str
    multiplier: float = 1.0

    def bind(self, values: Mapping[str, float]) -> float:
        try:
            return self.multiplier * values[self.name]
        except KeyError:
            raise KeyError(f"unbound parameter {self.name!r}") from None


@dataclass(frozen=True)
class Gate:
    name: str  # "h", "rz", "rx", "cx"
    qubits: tuple[int, ...]
    angle: float | Param | None = None

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in {self.name} {self.qubits}")

    @property
    def is_parametric(self) -> bool:
        return isinstance(self.angle, Param)

    def bound(self, values: Mapping[str, float]) -> "Gate":
        if isinstance(self.angle, Param):
            return Gate(self.name, self.qubits, self.angle.bind(values))
        return self


def H(q: int) -> Gate:
    return Gate("h", (q,))


def RZ(q: int, angle) -> Gate:
    return Gate("rz", (q,), angle)


def RX(q: int, angle) -> Gate:
    return Gate("rx", (q,), angle)


def CNOT(control: int, target: int) -> Gate:
    return Gate("cx", (control, target))


@dataclass(frozen=True)
class DiagonalBlock:
    """Gates ``start:stop`` implement ``exp(-i * param * (spin - const))``."""

    start: int
    stop: int
    spin: SpinPoly
    param: str

    @cached_property
    def phases(self):
        return self.spin.table(self.spin.num_qubits, include_constant=False)


@dataclass
class Circuit:
    width: int
    gates: list[Gate] = field(default_factory=list)
    parameters: list[str] = field(default_factory=list)
    blocks: list[DiagonalBlock] = field(default_factory=list)

    def append(self, gate: Gate) -> None:
        for q in gate.qubits:
            if not 0 <= q < self.width:
                raise ValueError(f"qubit {q} outside circuit of width {self.width}")
        self.gates.append(gate)

    def extend(self, gates) -> None:
        for g in gates:
            self.append(g)

    def __len__(self):
        return len(self.gates)

    def bindings(self, values) -> dict[str, float]:
        """Accept a mapping or a sequence ordered like ``parameters``."""
        if isinstance(values, Mapping):
            return dict(values)
        values = list(values)
        if len(values) != len(self.parameters):
            raise ValueError(f"expected {len(self.parameters)} parameter values, got {len(values)}")
        return dict(zip(self.parameters, map(float, values)))

    def bind(self, values) -> "Circuit":
        b = self.bindings(values) if values is not None else {}
        return Circuit(self.width, [g.bound(b) for g in self.gates], [], [])

    def count(self, name: str) -> int:
        return sum(1 for g in self.gates if g.name == name)


# -- phase gadgets ------------------------------------------------------------

def _angle(coeff: float, size: int, param: str | float):
    sign = -1.0 if size % 2 else 1.0
    if isinstance(param, str):
        return Param(param, 2.0 * coeff * sign)
    return 2.0 * coeff * sign * float(param)


def _fan_in(qubits: Sequence[int], style: str) -> list[Gate]:
    """CNOTs leaving the parity of ``qubits`` on ``min(qubits)``."""
    qs = sorted(qubits)
    if style == LADDER:
        return [CNOT(qs[k], qs[k - 1]) for k in range(len(qs) - 1, 0, -1)]
    if style == TREE:
        gates = []
        live = qs
        while len(live) > 1:
            gates.extend(CNOT(live[k + 1], live[k]) for k in range(0, len(live) - 1, 2))
            live = live[0::2]
        return gates
    raise ValueError(f"unknown gadget style {style!r}")


def synth_phase_gadget(term, coeff: float, param: str | float, style: str = LADDER) -> list[Gate]:
    """Gates for ``exp(-i * param * coeff * prod(z_q for q in term))``."""
    qubits = sorted(term)
    if not qubits:
        raise ValueError("constant term has no gadget; fold it into the tracked constant")
    compute = _fan_in(qubits, style)
    return [*compute, RZ(qubits[0], _angle(coeff, len(qubits), param)), *reversed(compute)]


@dataclass(frozen=True)
class GadgetGroup:
    """Terms forming a strict subset chain, smallest first."""

    chain: tuple[frozenset, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if not self.chain:
            raise ValueError("empty gadget group")
        if len(self.chain) != len(self.coefficients):
            raise ValueError("one coefficient per term")
        for small, big in zip(self.chain, self.chain[1:]):
            if not small < big:
                raise ValueError(f"{sorted(small)} is not a strict subset of {sorted(big)}")

    @property
    def largest(self) -> frozenset:
        return self.chain[-1]


def _tiebreak(term: frozenset) -> tuple:
    # longest first; among equals the lexicographically largest sorted index tuple
    return (len(term), tuple(sorted(term)))


def factor_terms(spin: SpinPoly) -> list[GadgetGroup]:
    """Greedy subset-chain grouping of the nonconstant terms.

    Repeatedly start a chain at the longest unassigned term, then keep
    appending the longest unassigned strict subset of the last term added.
    """
    unassigned = set(spin.terms)
    groups = []
    while unassigned:
        head = max(unassigned, key=_tiebreak)
        unassigned.discard(head)
        chain = [head]
        while True:
            subsets = [t for t in unassigned if t < chain[-1]]
            if not subsets:
                break
            nxt = max(subsets, key=_tiebreak)
            unassigned.discard(nxt)
            chain.append(nxt)
        chain.reverse()
        groups.append(GadgetGroup(tuple(chain), tuple(spin.terms[t] for t in chain)))
    return groups


def synth_group(group: GadgetGroup, param: str | float, style: str = LADDER) -> list[Gate]:
    """One CNOT scaffold for the whole chain: ``2 * (len(largest) - 1)`` CNOTs."""
    if len(group.chain) == 1:
        return synth_phase_gadget(group.chain[0], group.coefficients[0], param, style)
    first = sorted(group.chain[0])
    target = first[0]
    compute = _fan_in(first, style)
    gates = [*compute, RZ(target, _angle(group.coefficients[0], len(first), param))]
    prev = group.chain[0]
    for term, coeff in zip(group.chain[1:], group.coefficients[1:]):
        step = [CNOT(q, target) for q in sorted(term - prev)]
        compute.extend(step)
        gates.extend(step)
        gates.append(RZ(target, _angle(coeff, len(term), param)))
        prev = term
    gates.extend(reversed(compute))
    return gates


def _term_key(term: frozenset) -> tuple:
    return (tuple(sorted(term)),)


def cost_layer(spin: SpinPoly, param: str | float, factored: bool = False,
               style: str = LADDER) -> list[Gate]:
    """All gadgets for ``spin``; fragments ordered by their largest term's qubit set."""
    if factored:
        groups = sorted(factor_terms(spin), key=lambda g: _term_key(g.largest))
        return [g for group in groups for g in synth_group(group, param, style)]
    gates = []
    for term in sorted(spin.terms, key=_term_key):
        gates.extend(synth_phase_gadget(term, spin.terms[term], param, style))
    return gates


def build_ansatz(spin: SpinPoly, p: int = 1, factored: bool = False, style: str = LADDER,
                 width: int | None = None) -> Circuit:
    """``H^n`` followed by ``p`` rounds of cost layer and ``RX(2 beta)`` mixer.

    Parameters are ordered ``gamma_1..gamma_p, beta_1..beta_p``.
    """
    if p < 1:
        raise ValueError("need at least one QAOA layer")
    n = spin.num_qubits if width is None else width
    if spin.num_qubits > n:
        raise ValueError("spin polynomial wider than the circuit")
    gammas = [f"gamma_{l}" for l in range(1, p + 1)]
    betas = [f"beta_{l}" for l in range(1, p + 1)]
    c = Circuit(n, parameters=gammas + betas)
    c.extend(H(q) for q in range(n))
    for gamma, beta in zip(gammas, betas):
        start = len(c)
        c.extend(cost_layer(spin, gamma, factored, style))
        c.blocks.append(DiagonalBlock(start, len(c), spin, gamma))
        c.extend(RX(q, Param(beta, 2.0)) for q in range(n))
    return c


# -- metrics -------------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    qubits: int
    depth: int
    two_qubit_gates: int


def depth(c: Circuit) -> int:
    """Layers under as-soon-as-possible scheduling, one time unit per gate."""
    level = [0] * c.width
    for g in c.gates:
        t = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = t
    return max(level, default=0)


def metrics(c: Circuit) -> Metrics:
    return Metrics(c.width, depth(c), sum(1 for g in c.gates if len(g.qubits) == 2))


def cnot_count(spin: SpinPoly, factored: bool = False) -> int:
    """Closed-form CNOT total: sum of 2(k-1) over terms, or over group heads."""
    if factored:
        return sum(2 * (len(g.largest) - 1) for g in factor_terms(spin))
    return sum(2 * (len(t) - 1) for t in spin.terms)
