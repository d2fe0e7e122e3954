import numpy as np
import pytest

from arpqaoa.circuit import build_ansatz
from arpqaoa.formulation import HUBO, build
from arpqaoa.generate import canonical_instance
from arpqaoa.problem import preprocess
from arpqaoa.qasm import export_qasm, parse_qasm
from arpqaoa.sim import run


def _ansatz(factored=True):
    full, _, mask = preprocess(canonical_instance(1))
    f = build(full, mask, HUBO)
    return build_ansatz(f.spin, 1, factored, width=f.num_qubits)


def test_round_trip_preserves_gates_and_state():
    c = _ansatz()
    text = export_qasm(c, [0.3, -0.7])
    assert text.startswith('OPENQASM 2.0;\ninclude "qelib1.inc";\n')
    assert "least-significant" in text
    back = parse_qasm(text)
    bound = c.bind([0.3, -0.7])
    assert back.width == c.width
    assert [(g.name, g.qubits) for g in back.gates] == [(g.name, g.qubits) for g in bound.gates]
    for a, b in zip(back.gates, bound.gates):
        assert a.angle == b.angle  # repr floats survive exactly
    psi_a = run(back, method="gates").amplitudes
    psi_b = run(c, [0.3, -0.7], method="gates").amplitudes
    assert np.allclose(psi_a, psi_b, atol=1e-12)


@pytest.mark.parametrize("text, message", [
    ("qreg q[2];\nh q[0];\n", "header"),
    ('OPENQASM 2.0;\nh q[0];\n', "unsupported"),
    ('OPENQASM 2.0;\nqreg q[2];\nrz q[0];\n', "angle"),
    ('OPENQASM 2.0;\nqreg q[2];\nh r[0];\n', "register"),
    ('OPENQASM 2.0;\nqreg q[2];\nqreg r[2];\n', "one quantum register"),
    ('OPENQASM 2.0;\nqreg q[2];\nccx q[0],q[1];\n', "unsupported"),
    ('OPENQASM 2.0;\nqreg q[2];\nh q[5];\n', "outside"),
    ('OPENQASM 2.0;\n', "no qreg"),
])
def test_parse_errors(text, message):
    with pytest.raises(ValueError, match=message):
        parse_qasm(text)


def test_parse_ignores_comments_and_whitespace():
    c = parse_qasm('OPENQASM 2.0; // hi\nqreg q[2];\n  rz( 0.5 ) q[1] ;\ncx q[0] , q[1];\n')
    assert [(g.name, g.qubits, g.angle) for g in c.gates] == [("rz", (1,), 0.5), ("cx", (0, 1), None)]
