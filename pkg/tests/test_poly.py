import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arpqaoa.poly import (PBPoly, SpinPoly, VarId, binary_table, drop_constant, dumps, evaluate,
                          evaluate_spin, loads, multiply, spin_table, substitute, to_spin)

from helpers import all_bits, random_pbpoly

x, y, z = (PBPoly.var(v) for v in "xyz")


def test_var_id_names_round_trip():
    for v in (VarId.edge("A", "3", 2), VarId.node("B", 4), VarId.slack(0)):
        assert VarId.parse(str(v)) == v
    assert str(VarId.edge("A", "1", 1)) == "x[A,1,1]"
    assert str(VarId.node("1", 2)) == "x[1,2]"
    assert str(VarId.slack(3)) == "z[3]"
    with pytest.raises(ValueError):
        VarId.parse("y[1]")


def test_binary_variables_are_idempotent():
    assert x * x == x
    assert (x + y) ** 2 == x + y + 2 * x * y
    assert (1 - x) * (1 - x) == 1 - x


def test_arithmetic_with_constants():
    p = 3 + 2 * x - y
    assert p.constant == 3.0
    assert p.terms == {frozenset("x"): 2.0, frozenset("y"): -1.0}
    assert (p - p).is_zero()
    assert 5 - x == PBPoly({frozenset("x"): -1.0}, 5.0)


def test_zero_terms_are_dropped():
    p = x + y - x
    assert p.terms == {frozenset("y"): 1.0}
    assert p.variables == {"y"}
    assert PBPoly({frozenset("x"): 1e-15}).terms == {}


def test_degree_and_histogram():
    p = x * y * z + x * y + 2 * x + 1
    assert p.degree == 3
    assert p.degree_histogram() == {1: 1, 2: 1, 3: 1}
    assert PBPoly.const(4).degree == 0


def test_evaluate_requires_every_variable():
    assert evaluate(x * y + 1, {"x": 1, "y": 1}) == 2.0
    with pytest.raises(KeyError, match="missing variable"):
        evaluate(x * y, {"x": 1})


def test_substitute_fixes_one_variable():
    p = 2 * x * y + 3 * y + 1
    assert substitute(p, "y", 1) == 2 * x + 4
    assert substitute(p, "y", 0) == PBPoly.const(1)


def test_drop_constant():
    body, c = drop_constant(x + 7)
    assert body == x and c == 7.0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_multiply_matches_pointwise_product(seed, n):
    rng = np.random.default_rng(seed)
    p = random_pbpoly(rng, n, 4, 3)
    q = random_pbpoly(rng, n, 4, 3)
    prod = multiply(p, q)
    for bits in all_bits(n):
        a = dict(enumerate(bits))
        assert evaluate(prod, a) == pytest.approx(evaluate(p, a) * evaluate(q, a), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
def test_spin_form_agrees_with_binary_form(seed, n):
    rng = np.random.default_rng(seed)
    p = random_pbpoly(rng, n, 10, 4)
    s = to_spin(p)
    assert s.degree == p.degree
    for bits in all_bits(n):
        spins = [2 * b - 1 for b in bits]
        assert evaluate_spin(s, spins) == pytest.approx(evaluate(p, dict(enumerate(bits))), abs=1e-9)


def test_to_spin_single_variable():
    # x = (1 + z) / 2
    s = to_spin(PBPoly.var(0, 4.0))
    assert s.constant == 2.0 and s.terms == {frozenset([0]): 2.0}


def test_tables_use_qubit_zero_as_least_significant_bit():
    p = PBPoly.var(0, 1.0) + PBPoly.var(2, 10.0)
    table = binary_table(p, 3)
    for idx in range(8):
        bits = {q: (idx >> q) & 1 for q in range(3)}
        assert table[idx] == evaluate(p, bits)
    assert table[0b001] == 1.0 and table[0b100] == 10.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7))
def test_tables_match_pointwise_evaluation(seed, n):
    rng = np.random.default_rng(seed)
    p = random_pbpoly(rng, n, 8, 4)
    s = to_spin(p)
    bt = binary_table(p, n)
    st_ = spin_table(s, n)
    st0 = s.table(n, include_constant=False)
    for idx, bits in enumerate(all_bits(n)):
        bits = bits[::-1]  # product() yields the most significant bit first
        value = evaluate(p, dict(enumerate(bits)))
        assert bt[idx] == pytest.approx(value, abs=1e-9)
        assert st_[idx] == pytest.approx(value, abs=1e-9)
        assert st0[idx] == pytest.approx(value - s.constant, abs=1e-9)


def test_text_round_trip_with_named_variables():
    p = (PBPoly.var(VarId.node("1", 1)) * PBPoly.var(VarId.slack(2)) * 0.1
         + PBPoly.var(VarId.edge("A", "B", 1), -3.5) + 0.3)
    text = dumps(p)
    assert text.splitlines()[0] == "0.3"
    assert "-3.5 * x[A,B,1]" in text
    back = loads(text, VarId.parse)
    assert back == p


def test_loads_accepts_comments_and_rejects_empty_terms():
    assert loads("# header\n2.0\n1.5 * a b\n") == PBPoly({frozenset("ab"): 1.5}, 2.0)
    with pytest.raises(ValueError, match="without variables"):
        loads("1.0 *   \n")


def test_relabel_and_isclose():
    p = PBPoly({frozenset(["a", "b"]): 2.0}, 1.0)
    q = p.relabel({"a": 0, "b": 1})
    assert q.terms == {frozenset([0, 1]): 2.0}
    assert q.isclose(PBPoly({frozenset([0, 1]): 2.0 + 1e-12}, 1.0))


def test_spin_poly_merges_and_folds_empty_key():
    s = SpinPoly({(0, 1): 1.0, (1, 0): 2.0, (): 5.0})
    assert s.terms == {frozenset([0, 1]): 3.0}
    assert s.constant == 5.0 and s.num_qubits == 2
