"""Decomposed solving: root-set search followed by backtrack-free extension."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .filtering import FilterReport, pivot_filter
from .network import Network, Value, iter_bits, relation_view
from .structure import PivotPlan, RootSet, TieBreak, compute_pivot_plan, minimum_root_set

Solution = tuple  # values in network variable order


class ExtensionError(RuntimeError):
    """A pivot image was missing or clashed during extension.

    On a pivot-consistent network this cannot happen, so it marks a bug.
    """


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class SolveReport:
    mode: str
    roots: RootSet
    plan: PivotPlan
    filter_report: FilterReport
    timings: dict[str, float] = field(default_factory=dict)
    root_instantiations_found: int = 0
    extension_steps: int = 0
    extension_backtracks: int = 0
    solutions: list[Solution] = field(default_factory=list)
    count: int = 0

    @property
    def soluble(self) -> bool:
        return self.count > 0

    def to_dict(self, net: Network) -> dict:
        return {
            "mode": self.mode,
            "roots": list(self.roots.members),
            "ordering": list(self.plan.ordering),
            "pivots": [list(a) for a in self.plan.arcs()],
            "count": self.count,
            "root_instantiations_found": self.root_instantiations_found,
            "extension_steps": self.extension_steps,
            "extension_backtracks": self.extension_backtracks,
            "solutions": [dict(zip(net.names, s)) for s in self.solutions],
            "timings": self.timings,
            "filter": self.filter_report.summary(),
        }


def _root_search(net: Network, order: Sequence[int]) -> Iterator[list[int]]:
    """Chronological backtracking over ``order``; yields value indices."""
    m = len(order)
    if m == 0:
        yield []
        return
    if any(net.dom_mask(v) == 0 for v in order):
        return
    checks = [[(q, order[q]) for q in range(p) if net.is_constrained(order[q], order[p])]
              for p in range(m)]
    values = [0] * m
    candidates = [iter_bits(net.dom_mask(order[0]))]
    p = 0
    while p >= 0:
        a = next(candidates[p], None)
        if a is None:
            candidates.pop()
            p -= 1
            continue
        v = order[p]
        if all(net.rows(u, v)[values[q]] >> a & 1 for q, u in checks[p]):
            values[p] = a
            if p + 1 == m:
                yield list(values)
            else:
                p += 1
                candidates.append(iter_bits(net.dom_mask(order[p])))


def instantiate_root(netp: Network, roots: RootSet | Sequence[str]) -> Iterator[dict[str, Value]]:
    """Every consistent instantiation of the root variables."""
    order = [netp.index(x) for x in roots]
    for values in _root_search(netp, order):
        yield {netp.name(v): netp.value(v, a) for v, a in zip(order, values)}


def count_solutions(netp: Network, roots: RootSet | Sequence[str]) -> int:
    """Number of consistent root instantiations; no extension is performed."""
    order = [netp.index(x) for x in roots]
    return sum(1 for _ in _root_search(netp, order))


def extend_backtrack_free(netp: Network, plan: PivotPlan,
                          root_inst: dict[str, Value]) -> dict[str, Value]:
    """Assign each non-root variable the image of its pivot origin."""
    solution, _ = _extend(netp, plan, root_inst)
    return solution


def _extend(netp: Network, plan: PivotPlan, root_inst: dict[str, Value]) -> tuple[dict, int]:
    assigned: dict[int, int] = {}
    for x in plan.roots:
        i = netp.index(x)
        assigned[i] = netp.value_index(i, root_inst[x])
    steps = 0
    for target in plan.ordering[plan.r:]:
        k = netp.index(target)
        h = netp.index(plan.pivot_candidates[target])
        row = netp.rows(h, k)[assigned[h]]
        if not row:
            raise ExtensionError(f"pivot {netp.name(h)} -> {target} has no image for "
                                 f"{netp.value(h, assigned[h])!r}")
        b = row.bit_length() - 1
        for j in netp.neighbors(k):
            if j in assigned and not netp.rows(j, k)[assigned[j]] >> b & 1:
                raise ExtensionError(f"{target}={netp.value(k, b)!r} clashes with "
                                     f"{netp.name(j)}={netp.value(j, assigned[j])!r}")
        assigned[k] = b
        steps += 1
    return {netp.name(i): netp.value(i, a) for i, a in sorted(assigned.items())}, steps


def _extend_by_search(netp: Network, plan: PivotPlan,
                      root_inst: dict[str, Value]) -> tuple[list[dict], int, int]:
    """Fallback used by non-strict solving: plain search over the non-roots.

    Returns (solutions, assignment steps, backtracks).
    """
    order = [netp.index(x) for x in plan.ordering]
    r = plan.r
    values = [netp.value_index(v, root_inst[netp.name(v)]) for v in order[:r]]
    solutions, steps, backtracks = [], 0, 0

    def rec(p: int) -> None:
        nonlocal steps, backtracks
        if p == len(order):
            solutions.append({netp.name(v): netp.value(v, a) for v, a in zip(order, values)})
            return
        k = order[p]
        found = False
        for b in iter_bits(netp.dom_mask(k)):
            if all(not netp.is_constrained(order[q], k) or netp.rows(order[q], k)[values[q]] >> b & 1
                   for q in range(p)):
                steps += 1
                values.append(b)
                rec(p + 1)
                values.pop()
                found = True
        if not found:
            backtracks += 1

    rec(r)
    return solutions, steps, backtracks


def solve_decomposed(net: Network, mode: str = "all",
                     tie_break: TieBreak | str | None = None,
                     strict: bool = True) -> SolveReport:
    """Four phases: structure, pivot filtering, root search, extension.

    ``strict`` turns a failed extension into :class:`ExtensionError`; when
    False the extension falls back to search and counts its backtracks.
    """
    if mode not in ("first", "all", "count"):
        raise ValueError(f"unknown mode {mode!r}")
    tb = TieBreak.coerce(tie_break)
    t0 = time.perf_counter()
    roots = minimum_root_set(net, tb)
    plan = compute_pivot_plan(net, roots, tb)
    t1 = time.perf_counter()
    netp, freport = pivot_filter(net, plan)
    t2 = time.perf_counter()
    report = SolveReport(mode, roots, plan, freport)
    report.timings["structure"] = t1 - t0
    report.timings["filter"] = t2 - t1
    if freport.wiped_out is not None:
        report.timings["search"] = report.timings["extend"] = 0.0
        return report
    if mode == "count":
        report.count = report.root_instantiations_found = count_solutions(netp, plan.roots)
        report.timings["search"] = time.perf_counter() - t2
        report.timings["extend"] = 0.0
        return report
    extend_time = 0.0
    for root_inst in instantiate_root(netp, plan.roots):
        report.root_instantiations_found += 1
        t3 = time.perf_counter()
        try:
            solution, steps = _extend(netp, plan, root_inst)
            found = [solution]
        except ExtensionError:
            if strict:
                raise
            found, steps, backtracks = _extend_by_search(netp, plan, root_inst)
            report.extension_backtracks += max(backtracks, 1)
        extend_time += time.perf_counter() - t3
        report.extension_steps += steps
        for solution in found:
            report.solutions.append(tuple(solution[x] for x in net.names))
        if mode == "first" and report.solutions:
            break
    report.count = len(report.solutions)
    report.timings["extend"] = extend_time
    report.timings["search"] = time.perf_counter() - t2 - extend_time
    return report


def brute_force_solve(net: Network, budget: int = 10 ** 7) -> set[Solution]:
    """Every solution, by depth-first enumeration in variable order.

    Works on token-level relation sets so it shares no search code with the
    decomposed solver it is used to check.
    """
    if net.n and math.prod(max(net.domain_size(i), 1) for i in range(net.n)) > budget:
        raise BudgetExceeded(f"search space exceeds the enumeration budget of {budget}")
    names = net.names
    domains = [net.domain(x) for x in names]
    earlier = []
    for p, x in enumerate(names):
        earlier.append([(q, relation_view(net, names[q], x).pairs)
                        for q in range(p) if net.has_constraint(names[q], x)])
    out: set[Solution] = set()
    partial: list[Value] = []

    def dfs(p: int) -> None:
        if p == len(names):
            out.add(tuple(partial))
            return
        for v in domains[p]:
            if all((partial[q], v) in rel for q, rel in earlier[p]):
                partial.append(v)
                dfs(p + 1)
                partial.pop()

    dfs(0)
    return out


def solution_dicts(net: Network, solutions) -> list[dict[str, Value]]:
    return [dict(zip(net.names, s)) for s in solutions]
