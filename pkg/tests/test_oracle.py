import pytest

from arpqaoa.formulation import HUBO, QUBO, Formulation, Route, build, route_objective
from arpqaoa.generate import canonical_instances, random_instance
from arpqaoa.oracle import brute_force_min, enumerate_routes, feasible_routes
from arpqaoa.poly import PBPoly
from arpqaoa.problem import ProblemInstance, preprocess

from helpers import small_instances


def test_zero_polynomial_ties_everywhere():
    f = Formulation.from_poly(PBPoly(), registry=["a", "b", "c"])
    res = brute_force_min(f)
    assert res.value == 0.0 and res.tie_count == 8 and res.assignment == (0, 0, 0)


def test_brute_force_first_minimum_in_integer_order():
    f = Formulation.from_poly(PBPoly({frozenset([0]): -1.0, frozenset([1]): -1.0,
                                      frozenset([0, 1]): 1.0}), registry=[0, 1])
    res = brute_force_min(f)
    assert res.value == -1.0 and res.tie_count == 3 and res.assignment == (1, 0)


def test_brute_force_limit():
    f = Formulation.from_poly(PBPoly(), registry=list(range(5)))
    with pytest.raises(ValueError, match="limit"):
        brute_force_min(f, max_qubits=4)


def test_single_edge_instance_decodes_to_direct_route():
    inst = ProblemInstance("A", "B", ("1",), {"1": 5.0},
                           {frozenset(("A", "B")): 2, frozenset(("1", "B")): 5}, 2)
    full, _, mask = preprocess(inst)
    res = brute_force_min(build(full, mask, QUBO))
    assert res.feasible and res.route == Route(("A", "B", "B"))
    opt = enumerate_routes(full)
    assert opt.value == 0.0 and opt.route == Route(("A", "B", "B"))


def test_route_search_matches_exhaustive_listing():
    for inst in small_instances(max_internal=4, max_deadline=6, seeds=range(2)):
        full, _, _ = preprocess(inst)
        values = [route_objective(r, full) for r in feasible_routes(full)]
        best = min(values)
        res = enumerate_routes(full)
        assert res.feasible and res.value == best
        assert res.tie_count == sum(v == best for v in values)


def test_route_search_completes_sparse_graphs_itself():
    inst = random_instance(3, 6, seed=5, edge_probability=0.0)
    assert enumerate_routes(inst).value == enumerate_routes(preprocess(inst)[0]).value


def test_no_route_is_reported_not_raised():
    inst = ProblemInstance("A", "B", ("1",), {"1": 1.0},
                           {frozenset(("A", "1")): 3, frozenset(("1", "B")): 3}, 2)
    res = enumerate_routes(inst)
    assert not res.feasible and res.route is None


def test_more_time_never_hurts():
    for inst in small_instances(max_internal=3, max_deadline=4, seeds=range(3)):
        a = enumerate_routes(inst).value
        b = enumerate_routes(inst.with_deadline(inst.deadline + 1)).value
        assert b <= a


def test_tie_count_for_symmetric_instance():
    edges = {frozenset(("A", "1")): 1, frozenset(("A", "2")): 1,
             frozenset(("1", "B")): 1, frozenset(("2", "B")): 1}
    inst = ProblemInstance("A", "B", ("1", "2"), {"1": 4.0, "2": 4.0}, edges, 2)
    res = enumerate_routes(inst)
    assert res.value == -4.0 and res.tie_count == 2


def test_qubo_and_hubo_optima_agree_on_shipped_instances():
    for k, inst in canonical_instances().items():
        full, _, mask = preprocess(inst)
        opt = enumerate_routes(full)
        for kind in (QUBO, HUBO):
            f = build(full, mask, kind)
            if f.num_qubits > 20:
                continue
            res = brute_force_min(f)
            assert res.feasible, (k, kind)
            assert route_objective(res.route, full) == opt.value
            assert res.value + f.dropped_constant == pytest.approx(opt.value)
