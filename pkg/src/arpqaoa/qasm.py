"""OpenQASM 2.0 export and import for the h / rz / rx / cx gate set.

Qubit ``q[0]`` is the least-significant bit of a measured bitstring.
"""

from __future__ import annotations

import re

from .circuit import Circuit, Gate, Param

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

_QREG = re.compile(r"qreg\s+(\w+)\[(\d+)\]\s*;")
_GATE = re.compile(r"(h|rz|rx|cx)\s*(?:\(([^)]*)\))?\s+(\w+)\[(\d+)\]\s*(?:,\s*(\w+)\[(\d+)\])?\s*;")


def export_qasm(c: Circuit, bindings=None) -> str:
    values = c.bindings(bindings) if bindings is not None else {}
    lines = [HEADER.rstrip("\n"), "// qubit 0 is the least-significant bit", f"qreg q[{c.width}];"]
    for g in c.gates:
        angle = g.angle
        if isinstance(angle, Param):
            angle = angle.bind(values)
        if g.name == "cx":
            lines.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
        elif angle is None:
            lines.append(f"{g.name} q[{g.qubits[0]}];")
        else:
            lines.append(f"{g.name}({float(angle)!r}) q[{g.qubits[0]}];")
    return "\n".join(lines) + "\n"


def parse_qasm(text: str) -> Circuit:
    """Read what :func:`export_qasm` writes (one register, four gate kinds)."""
    body = re.sub(r"//[^\n]*", "", text)
    statements = [s.strip() + ";" for s in body.split(";") if s.strip()]
    if not statements or not statements[0].startswith("OPENQASM"):
        raise ValueError("missing OPENQASM header")
    circuit = None
    reg = None
    for stmt in statements[1:]:
        if stmt.startswith("include"):
            continue
        m = _QREG.fullmatch(stmt)
        if m:
            if circuit is not None:
                raise ValueError("only one quantum register is supported")
            reg, circuit = m.group(1), Circuit(int(m.group(2)))
            continue
        m = _GATE.fullmatch(stmt)
        if not m or circuit is None:
            raise ValueError(f"unsupported statement: {stmt}")
        name, arg, r1, q1, r2, q2 = m.groups()
        if r1 != reg or (r2 is not None and r2 != reg):
            raise ValueError(f"unknown register in: {stmt}")
        if name == "cx":
            if q2 is None:
                raise ValueError(f"cx needs two qubits: {stmt}")
            circuit.append(Gate("cx", (int(q1), int(q2))))
        elif name == "h":
            circuit.append(Gate("h", (int(q1),)))
        else:
            if arg is None:
                raise ValueError(f"{name} needs an angle: {stmt}")
            circuit.append(Gate(name, (int(q1),), float(arg)))
    if circuit is None:
        raise ValueError("no qreg declared")
    return circuit
