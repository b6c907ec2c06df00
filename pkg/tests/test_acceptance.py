"""Exit criteria, one test each; every test prints a single PASS/FAIL line."""

import math
import random
import time
from itertools import combinations

import pytest

from conftest import ACCEPTANCE_LINES
from pivotcsp import (
    GeneratorParams,
    TieBreak,
    brute_force_solve,
    check_pivot_consistent,
    compatible_call_bound,
    compute_pivot_plan,
    count_solutions,
    generate_instance,
    is_root_set,
    minimum_root_set,
    path_consistency,
    pivot_filter,
    run_compare,
    solve_decomposed,
    travel_agency,
    union_networks,
)

from _instances import oracle_instances, tighten

pytestmark = pytest.mark.acceptance

ORACLE_COUNT = 600
TRAVEL_SOLUTIONS = {
    ("Alice", "Paris", "France", "FrF", "French"),
    ("Bob", "Paris", "France", "FrF", "French"),
    ("Bob", "London", "GB", "£", "English"),
    ("Bob", "Washington", "USA", "$", "English"),
    ("Bob", "New-York", "USA", "$", "English"),
}


def record(number, title, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


@pytest.fixture(scope="module")
def oracle_runs():
    """Solve the oracle family once; several criteria read the results."""
    start = time.perf_counter()
    runs = []
    for seed, net in enumerate(oracle_instances(ORACLE_COUNT)):
        truth = brute_force_solve(net)
        rep = solve_decomposed(net, "all")
        loose = solve_decomposed(net, "all", strict=False)
        netp, _ = pivot_filter(net, rep.plan)
        runs.append({
            "seed": seed, "net": net, "truth": truth, "report": rep, "loose": loose,
            "count": count_solutions(netp, rep.plan.roots) if rep.filter_report.wiped_out is None else 0,
            "filtered_truth": brute_force_solve(netp),
        })
    return runs, time.perf_counter() - start


def test_criterion_01_travel_golden_run():
    start = time.perf_counter()
    net = travel_agency()
    rep = solve_decomposed(net, "all")
    elapsed = time.perf_counter() - start
    fr = rep.filter_report
    checks = {
        "roots": set(rep.roots) == {"GUIDES", "CITIES"},
        "pivots": set(rep.plan.arcs()) == {("CITIES", "COUNTRIES"), ("COUNTRIES", "CURRENCIES"),
                                           ("COUNTRIES", "LANGUAGES")},
        "ordering": rep.plan.ordering == ("GUIDES", "CITIES", "COUNTRIES", "CURRENCIES", "LANGUAGES"),
        "calls": fr.calls == [("COUNTRIES", "LANGUAGES", "COUNTRIES"),
                              ("COUNTRIES", "LANGUAGES", "GUIDES"),
                              ("COUNTRIES", "CURRENCIES", "COUNTRIES"),
                              ("CITIES", "COUNTRIES", "CITIES"),
                              ("CITIES", "COUNTRIES", "GUIDES")],
        "created": fr.constraints_created == [("GUIDES", "COUNTRIES")],
        "modified": fr.constraints_modified == [("GUIDES", "CITIES")],
        "root instantiations": rep.root_instantiations_found == 5,
        "solutions": set(rep.solutions) == TRAVEL_SOLUTIONS and rep.count == 5,
        "runtime": elapsed < 1.0,
    }
    bad = [k for k, v in checks.items() if not v]
    record(1, "travel golden run", not bad,
           f"{len(checks) - len(bad)}/{len(checks)} checks, {elapsed * 1000:.1f} ms"
           + (f", failed: {', '.join(bad)}" if bad else ""))


def test_criterion_02_baseline_contrast():
    net = travel_agency()
    cmp = run_compare(net)
    pc, pv = cmp.reports["pc"], cmp.reports["pivot"]
    pc_net, _ = path_consistency(net)
    altered = len(pv.constraints_created) + len(pv.constraints_modified)
    ok = (pc_net.e == 10 and len(pc.constraints_created) == 5
          and len(pc.constraints_modified) == 5 and altered == 2)
    record(2, "baseline contrast", ok,
           f"pc e={pc_net.e} created={len(pc.constraints_created)} "
           f"modified={len(pc.constraints_modified)}; pivot altered={altered}")


def test_criterion_03_oracle_equivalence(oracle_runs):
    runs, elapsed = oracle_runs
    mismatches = [r["seed"] for r in runs if set(r["report"].solutions) != r["truth"]]
    densities = {round((r["seed"] % 11) / 10, 1) for r in runs}
    ok = len(runs) >= 500 and not mismatches and elapsed < 300 and densities >= {0.0, 1.0}
    record(3, "oracle equivalence", ok,
           f"{len(runs)} instances, {len(mismatches)} mismatches, {elapsed:.1f} s"
           + (f", first bad seed {mismatches[0]}" if mismatches else ""))


def test_criterion_04_backtrack_free(oracle_runs):
    runs, _ = oracle_runs
    total = sum(r["report"].extension_backtracks + r["loose"].extension_backtracks for r in runs)
    extended = sum(r["report"].root_instantiations_found for r in runs)
    record(4, "backtrack-free extension", total == 0,
           f"{extended} extensions over {len(runs)} instances, {total} backtracks")


def test_criterion_05_counting(oracle_runs):
    runs, _ = oracle_runs
    bad = [r["seed"] for r in runs if r["count"] != len(r["truth"])]
    record(5, "counting", not bad, f"{len(runs)} instances, {len(bad)} count mismatches")


def test_criterion_06_solution_preservation(oracle_runs):
    runs, _ = oracle_runs
    bad = [r["seed"] for r in runs if r["filtered_truth"] != r["truth"]]
    record(6, "solution preservation", not bad, f"{len(runs)} instances, {len(bad)} differ")


def test_criterion_07a_idempotence():
    bad = []
    for seed, net in enumerate(oracle_instances(100, start=20_000)):
        plan = compute_pivot_plan(net, minimum_root_set(net))
        once, _ = pivot_filter(net, plan)
        twice, _ = pivot_filter(once, plan)
        if twice != once:
            bad.append(seed)
    record("7a", "closure idempotence", not bad, f"100 instances, {len(bad)} not idempotent")


def test_criterion_07b_union_of_closures():
    failures = []
    for seed, base in enumerate(oracle_instances(100, start=30_000)):
        plan = compute_pivot_plan(base, minimum_root_set(base))
        a, _ = pivot_filter(tighten(base, 2 * seed), plan)
        b, _ = pivot_filter(tighten(base, 2 * seed + 1), plan)
        witness = check_pivot_consistent(union_networks(a, b, base), plan)
        if not witness:
            failures.append((seed, witness.counterexample))
    detail = f"100 instances, {len(failures)} unions not pivot consistent"
    if failures:
        detail += f" (first: instance {failures[0][0]}, witness {failures[0][1]})"
    record("7b", "union of closures", not failures, detail)


def test_criterion_08_root_set_minimality():
    rng = random.Random(8)
    bad, checked_subsets = [], 0
    for seed in range(100):
        n = rng.randint(1, 10)
        pairs = n * (n - 1) // 2
        arcs = rng.randint(0, min(pairs, 2 * n))
        params = GeneratorParams(n=n, d=rng.randint(1, 3), functional_arcs=arcs,
                                 cycle_fraction=rng.choice([0.0, 0.3, 0.6]),
                                 other_constraints=rng.randint(0, pairs - arcs), seed=40_000 + seed)
        net = generate_instance(params)
        roots = minimum_root_set(net)
        ok = is_root_set(net, roots)
        for size in range(roots.r):
            for subset in combinations(net.names, size):
                checked_subsets += 1
                if is_root_set(net, subset):
                    ok = False
        if not ok:
            bad.append(seed)
    record(8, "root-set minimality", not bad,
           f"100 instances (n <= 10), {checked_subsets} smaller subsets rejected, {len(bad)} failures")


def _slope(xs, ys):
    lx, ly = [math.log(x) for x in xs], [math.log(y) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    return sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sum((a - mx) ** 2 for a in lx)


def _sweep_instance(n, d, r):
    """First seed whose minimum root set has exactly r members."""
    pairs = n * (n - 1) // 2
    for seed in range(1000):
        net = generate_instance(GeneratorParams(
            n=n, d=d, functional_arcs=n - r, other_constraints=int(0.3 * pairs),
            tightness=0.15, seed=seed))
        if minimum_root_set(net).r == r:
            return net
    raise AssertionError(f"no instance with r={r} at n={n}")


def test_criterion_09_complexity_counters(oracle_runs):
    runs, _ = oracle_runs
    over = []
    for r in runs:
        fr, net = r["report"].filter_report, r["net"]
        if fr.compatible_calls > compatible_call_bound(net.n, r["report"].plan.r) \
                or fr.max_call_pair_checks > net.d ** 2:
            over.append(r["seed"])
    ns, calls, triangles = [], [], []
    for n in range(10, 61, 10):
        net = _sweep_instance(n, 4, 5)
        plan = compute_pivot_plan(net, minimum_root_set(net))
        _, pv = pivot_filter(net, plan)
        _, pc = path_consistency(net)
        if pv.compatible_calls > compatible_call_bound(n, plan.r) or pv.max_call_pair_checks > 16:
            over.append(f"sweep n={n}")
        ns.append(n)
        calls.append(pv.compatible_calls)
        triangles.append(pc.triangle_checks)
    ratios = [t / c for t, c in zip(triangles, calls)]
    grows = all(b > a for a, b in zip(ratios, ratios[1:]))
    s_pivot, s_pc = _slope(ns, calls), _slope(ns, triangles)
    record(9, "complexity counters", not over and grows and s_pc > s_pivot,
           f"bounds held on {len(runs) + len(ns) - len(over)}/{len(runs) + len(ns)} runs; "
           f"sweep n=10..60 d=4 r=5: pivot calls ~n^{s_pivot:.2f}, pc triangles ~n^{s_pc:.2f}, "
           f"ratio {ratios[0]:.1f} -> {ratios[-1]:.1f}")


def test_criterion_10_pc_implies_pivot_consistency():
    checked, bad, seed = 0, [], 50_000
    while checked < 100:
        net = oracle_instances(1, start=seed)[0]
        seed += 1
        pc, rep = path_consistency(net)
        if rep.wiped_out:
            continue
        checked += 1
        for tb in (TieBreak("lex"), TieBreak("seeded", seed), TieBreak("seeded", seed * 7 + 1)):
            plan = compute_pivot_plan(pc, minimum_root_set(pc, tb), tb)
            if not check_pivot_consistent(pc, plan):
                bad.append(seed - 1)
    record(10, "path consistency implies pivot consistency", not bad,
           f"{checked} non-wiped closures x 3 plans, {len(bad)} failures")
