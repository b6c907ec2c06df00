import pytest

from pivotcsp import (
    BudgetExceeded,
    ExtensionError,
    PivotPlan,
    RootSet,
    brute_force_solve,
    build_network,
    compute_pivot_plan,
    count_solutions,
    extend_backtrack_free,
    instantiate_root,
    is_consistent,
    minimum_root_set,
    pivot_filter,
    solve_decomposed,
)

from _instances import brute_solutions_by_product, unsupported_triangle, oracle_instances

TRAVEL_SOLUTIONS = {
    ("Alice", "Paris", "France", "FrF", "French"),
    ("Bob", "Paris", "France", "FrF", "French"),
    ("Bob", "London", "GB", "£", "English"),
    ("Bob", "Washington", "USA", "$", "English"),
    ("Bob", "New-York", "USA", "$", "English"),
}


def _filtered(net):
    plan = compute_pivot_plan(net, minimum_root_set(net))
    return pivot_filter(net, plan)[0], plan


def test_travel_solve_all(travel):
    rep = solve_decomposed(travel, "all")
    assert set(rep.solutions) == TRAVEL_SOLUTIONS and rep.count == 5
    assert rep.root_instantiations_found == 5
    assert rep.extension_backtracks == 0
    assert rep.extension_steps == 5 * 3


def test_travel_modes(travel):
    first = solve_decomposed(travel, "first")
    assert first.count == 1 and first.solutions[0] in TRAVEL_SOLUTIONS
    count = solve_decomposed(travel, "count")
    assert count.count == 5 and count.solutions == []
    with pytest.raises(ValueError):
        solve_decomposed(travel, "some")


def test_travel_phases(travel):
    netp, plan = _filtered(travel)
    insts = list(instantiate_root(netp, plan.roots))
    assert {(i["GUIDES"], i["CITIES"]) for i in insts} == {
        ("Alice", "Paris"), ("Bob", "Paris"), ("Bob", "London"), ("Bob", "Washington"),
        ("Bob", "New-York")}
    assert count_solutions(netp, plan.roots) == 5
    sol = extend_backtrack_free(netp, plan, {"GUIDES": "Alice", "CITIES": "Paris"})
    assert sol == dict(zip(travel.names, ["Alice", "Paris", "France", "FrF", "French"]))
    sol = extend_backtrack_free(netp, plan, {"GUIDES": "Bob", "CITIES": "New-York"})
    assert tuple(sol[x] for x in travel.names) == ("Bob", "New-York", "USA", "$", "English")


def test_brute_force_oracle(travel):
    assert brute_force_solve(travel) == TRAVEL_SOLUTIONS
    free = build_network({"variables": [{"name": "a", "domain": [0, 1, 2]},
                                        {"name": "b", "domain": [0, 1]}]})
    assert len(brute_force_solve(free)) == 6
    empty = build_network({"variables": [{"name": "a", "domain": []}, {"name": "b", "domain": [0]}]})
    assert brute_force_solve(empty) == set()
    with pytest.raises(BudgetExceeded):
        brute_force_solve(travel, budget=10)


def test_empty_relation_means_no_solution():
    net = build_network({"variables": [{"name": "a", "domain": [0, 1]}, {"name": "b", "domain": [0, 1]}],
                         "constraints": [{"scope": ["a", "b"], "pairs": []}]})
    rep = solve_decomposed(net)
    assert rep.count == 0 and not rep.soluble
    netp, plan = _filtered(net)
    assert list(instantiate_root(netp, plan.roots)) == []
    assert count_solutions(netp, plan.roots) == 0


def test_singleton_root_stream():
    net = build_network({"variables": [{"name": "a", "domain": [3, 4, 5]}]})
    assert [i["a"] for i in instantiate_root(net, RootSet(("a",)))] == [3, 4, 5]


def test_extension_error_on_unfiltered_network():
    net = unsupported_triangle()
    plan = PivotPlan(RootSet(("X1", "X2")), ("X1", "X2", "X3"), {"X3": "X2"})
    with pytest.raises(ExtensionError):
        extend_backtrack_free(net, plan, {"X1": "a1", "X2": "b2"})


def test_oracle_agreement_and_bijection():
    for seed, net in enumerate(oracle_instances(250, start=9000)):
        truth = brute_solutions_by_product(net)
        assert brute_force_solve(net) == truth
        rep = solve_decomposed(net, "all")
        assert set(rep.solutions) == truth
        assert len(rep.solutions) == len(truth)  # extension is injective
        assert rep.extension_backtracks == 0
        if rep.filter_report.wiped_out is None:
            assert rep.extension_steps == rep.root_instantiations_found * (net.n - rep.plan.r)
        assert solve_decomposed(net, "count").count == len(truth)
        first = solve_decomposed(net, "first")
        assert first.count == min(1, len(truth))
        assert set(first.solutions) <= truth


def test_every_extension_is_a_solution():
    for net in oracle_instances(150, start=9500):
        netp, plan = _filtered(net)
        for inst in instantiate_root(netp, plan.roots):
            sol = extend_backtrack_free(netp, plan, inst)
            assert is_consistent(net, sol) and len(sol) == net.n


def test_non_strict_mode_agrees():
    for net in oracle_instances(100, start=9700):
        a = solve_decomposed(net, "all", strict=True)
        b = solve_decomposed(net, "all", strict=False)
        assert set(a.solutions) == set(b.solutions)
        assert b.extension_backtracks == 0


def test_no_functional_constraints_reduces_to_search():
    net = build_network({
        "variables": [{"name": x, "domain": [0, 1, 2]} for x in "abc"],
        "constraints": [{"scope": ["a", "b"], "pairs": [[0, 1], [0, 2], [1, 2], [2, 0], [2, 1]]},
                        {"scope": ["b", "c"], "pairs": [[0, 0], [1, 1], [2, 2], [2, 0]]}],
    })
    rep = solve_decomposed(net)
    assert rep.plan.r == 3
    assert set(rep.solutions) == brute_solutions_by_product(net)
