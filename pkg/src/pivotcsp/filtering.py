"""Pivot-consistent filtering, its checkers, and the AC / PC / DPC baselines.

All filters work on a private copy and return it with a :class:`FilterReport`.
Emptied domains or relations do not stop a run: the first one is recorded in
``wiped_out`` and the network is then known to be insoluble.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Sequence

from .network import Network, NetworkError, Value, is_functional, iter_bits
from .structure import PivotPlan, functional_subgraph, r_compatibility_failure


@dataclass
class FilterReport:
    method: str
    pairs_removed: list[tuple[tuple[str, str], tuple[Value, Value], int]] = field(default_factory=list)
    domain_removals: list[tuple[str, Value]] = field(default_factory=list)
    constraints_created: list[tuple[str, str]] = field(default_factory=list)
    constraints_modified: list[tuple[str, str]] = field(default_factory=list)
    calls: list[tuple[str, str, str]] = field(default_factory=list)
    compatible_calls: int = 0
    pair_checks: int = 0
    max_call_pair_checks: int = 0
    triangle_checks: int = 0
    wiped_out: str | None = None
    wall_time: float = 0.0

    @property
    def step(self) -> int:
        return self.compatible_calls + self.triangle_checks

    def summary(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "constraints_created": len(self.constraints_created),
            "constraints_modified": len(self.constraints_modified),
            "pairs_removed": len(self.pairs_removed),
            "domain_values_removed": len(self.domain_removals),
            "compatible_calls": self.compatible_calls,
            "triangle_checks": self.triangle_checks,
            "pair_checks": self.pair_checks,
            "wiped_out": self.wiped_out,
            "wall_time": self.wall_time,
        }

    def to_dict(self) -> dict[str, Any]:
        out = self.summary()
        out.update(
            created=[list(s) for s in self.constraints_created],
            modified=[list(s) for s in self.constraints_modified],
            removed=[{"scope": list(s), "pair": list(p), "step": st}
                     for s, p, st in self.pairs_removed],
            domain_removals=[[x, v] for x, v in self.domain_removals],
            calls=[list(c) for c in self.calls],
            max_call_pair_checks=self.max_call_pair_checks,
        )
        return out


@dataclass
class ConsistencyWitness:
    verdict: bool
    counterexample: tuple[str, str, tuple[Value, Value] | Value, str] | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.verdict


class _Tracker:
    """Snapshot of the input so created and modified constraints can be diffed."""

    def __init__(self, net: Network, report: FilterReport) -> None:
        self.net = net
        self.report = report
        self.before = {key: list(net.rows(*key)) for key in net.constraint_indices()}
        self.start = time.perf_counter()

    def remove_pair(self, i: int, a: int, j: int, b: int) -> None:
        net = self.net
        if net.remove_pair(i, a, j, b):
            lo, hi, va, vb = (i, j, a, b) if i < j else (j, i, b, a)
            self.report.pairs_removed.append(
                ((net.name(lo), net.name(hi)), (net.value(lo, va), net.value(hi, vb)),
                 self.report.step))

    def remove_value(self, i: int, a: int) -> None:
        if self.net.remove_value(i, a):
            self.report.domain_removals.append((self.net.name(i), self.net.value(i, a)))

    def ensure_constraint(self, i: int, j: int) -> None:
        if not self.net.is_constrained(i, j):
            self.net.add_constraint(min(i, j), max(i, j))
            self.report.constraints_created.append(
                (self.net.name(min(i, j)), self.net.name(max(i, j))))

    def note_wipeout(self, i: int, j: int | None = None) -> None:
        if self.report.wiped_out is not None:
            return
        net = self.net
        if net.dom_mask(i) == 0:
            self.report.wiped_out = f"domain {net.name(i)}"
        elif j is not None and net.dom_mask(j) == 0:
            self.report.wiped_out = f"domain {net.name(j)}"
        elif j is not None and net.is_constrained(i, j) and not any(net.rows(i, j)):
            lo, hi = min(i, j), max(i, j)
            self.report.wiped_out = f"relation {net.name(lo)}-{net.name(hi)}"

    def finish(self) -> FilterReport:
        net = self.net
        self.report.constraints_modified = [
            (net.name(i), net.name(j)) for (i, j), rows in self.before.items()
            if net.rows(i, j) != rows
        ]
        self.report.wall_time = time.perf_counter() - self.start
        return self.report


# -- pivot consistency -------------------------------------------------------

def _compatible(t: _Tracker, h: int, k: int, j: int) -> None:
    net, report = t.net, t.report
    if not net.is_constrained(h, k) or not is_functional(net, h, k):
        raise NetworkError(f"{net.name(h)} -> {net.name(k)} is not a functional constraint")
    report.compatible_calls += 1
    report.calls.append((net.name(h), net.name(k), net.name(j)))
    f_hk = net.rows(h, k)
    checks = 0
    if j == h:
        # self-compatibility: every a_h needs an image in D_k
        for a in iter_bits(net.dom_mask(h)):
            checks += 1
            if not f_hk[a]:
                t.remove_value(h, a)
        t.note_wipeout(h)
    else:
        r_jk = net.rows(k, j)  # row of a_k: allowed a_j values
        r_hj = net.rows(h, j)
        doomed = []
        for a in iter_bits(net.dom_mask(h)):
            img = f_hk[a]
            ok = r_jk[img.bit_length() - 1] if img else 0
            row = r_hj[a]
            checks += row.bit_count()
            bad = row & ~ok
            if bad:
                doomed.append((a, bad))
        if doomed:
            t.ensure_constraint(h, j)
            for a, bad in doomed:
                for b in iter_bits(bad):
                    t.remove_pair(h, a, j, b)
            t.note_wipeout(h, j)
    report.pair_checks += checks
    report.max_call_pair_checks = max(report.max_call_pair_checks, checks)


def compatible(net: Network, h: str, k: str, j: str,
               report: FilterReport | None = None) -> FilterReport:
    """Make the arc h -> k and C_jk k-compatible, in place on ``net``."""
    report = report if report is not None else FilterReport("compatible")
    t = _Tracker(net, report)
    _compatible(t, net.index(h), net.index(k), net.index(j))
    return t.finish()


def _pivot(t: _Tracker, h: int, k: int, position: dict[int, int]) -> None:
    net = t.net
    _compatible(t, h, k, h)
    earlier = sorted((j for j in net.neighbors(k) if position[j] < position[k] and j != h),
                     key=position.__getitem__)
    for j in earlier:
        _compatible(t, h, k, j)


def pivot_step(net: Network, h: str, k: str, ordering: Sequence[str],
               report: FilterReport | None = None) -> FilterReport:
    """Make h -> k a pivot of the variables preceding k, in place on ``net``."""
    report = report if report is not None else FilterReport("pivot")
    position = {net.index(x): p for p, x in enumerate(ordering)}
    hi, ki = net.index(h), net.index(k)
    if position[hi] >= position[ki]:
        raise NetworkError(f"{h} must precede {k} in the ordering")
    t = _Tracker(net, report)
    _pivot(t, hi, ki, position)
    return t.finish()


def pivot_filter(net: Network, plan: PivotPlan) -> tuple[Network, FilterReport]:
    """Pivot-consistent closure of ``net`` for the given plan."""
    _check_plan_shape(net, plan)
    work = net.copy()
    t = _Tracker(work, FilterReport("pivot"))
    position = {work.index(x): p for p, x in enumerate(plan.ordering)}
    for target in reversed(plan.ordering[plan.r:]):
        _pivot(t, work.index(plan.pivot_candidates[target]), work.index(target), position)
    return work, t.finish()


def _check_plan_shape(net: Network, plan: PivotPlan) -> None:
    if sorted(plan.ordering) != sorted(net.names):
        raise NetworkError("plan ordering must list every variable exactly once")
    if set(plan.ordering[:plan.r]) != set(plan.roots):
        raise NetworkError("plan ordering must start with the root set")
    if set(plan.pivot_candidates) != set(plan.ordering[plan.r:]):
        raise NetworkError("plan needs exactly one pivot per non-root variable")
    pos = {x: p for p, x in enumerate(plan.ordering)}
    for target, origin in plan.pivot_candidates.items():
        if origin not in pos or pos[origin] >= pos[target]:
            raise NetworkError(f"pivot origin {origin} must precede {target}")


def _xk_witness(net: Network, i: int, j: int, k: int) -> ConsistencyWitness:
    ni, nj, nk = net.name(i), net.name(j), net.name(k)
    if not (net.is_constrained(i, k) and net.is_constrained(j, k)):
        raise NetworkError(f"{ni}-{nk} and {nj}-{nk} must both be constraints")
    r_ik = net.rows(i, k)
    if i == j:
        for a in iter_bits(net.dom_mask(i)):
            if not r_ik[a]:
                return ConsistencyWitness(False, (ni, nj, net.value(i, a), nk),
                                          f"{net.value(i, a)!r} of {ni} has no support in {nk}")
        return ConsistencyWitness(True)
    r_jk = net.rows(j, k)
    r_ij = net.rows(i, j)
    for a in iter_bits(net.dom_mask(i)):
        for b in iter_bits(r_ij[a]):
            if not r_ik[a] & r_jk[b]:
                pair = (net.value(i, a), net.value(j, b))
                return ConsistencyWitness(False, (ni, nj, pair, nk),
                                          f"{pair!r} of ({ni}, {nj}) has no support in {nk}")
    return ConsistencyWitness(True)


def check_xk_compatible(net: Network, x: str, y: str, z: str) -> ConsistencyWitness:
    """Does every pair of R_xy have a common support in D_z?"""
    return _xk_witness(net, net.index(x), net.index(y), net.index(z))


def check_pivot_consistent(net: Network, plan: PivotPlan) -> ConsistencyWitness:
    """Is the plan's candidate set a pivot set of ``net``?"""
    g = functional_subgraph(net)
    failure = r_compatibility_failure(plan.ordering, plan.roots, g)
    if failure:
        return ConsistencyWitness(False, reason=failure)
    rest = plan.ordering[plan.r:]
    if set(plan.pivot_candidates) != set(rest):
        return ConsistencyWitness(False, reason="every non-root variable needs exactly one pivot "
                                                "and no root may be a pivot target")
    position = {net.index(x): p for p, x in enumerate(plan.ordering)}
    for target in rest:
        origin = plan.pivot_candidates[target]
        h, k = net.index(origin), net.index(target)
        if position[h] >= position[k]:
            return ConsistencyWitness(False, reason=f"{origin} does not precede {target}")
        if not net.is_constrained(h, k) or not is_functional(net, h, k):
            return ConsistencyWitness(False, reason=f"{origin} -> {target} is not functional")
        for j in [h] + sorted(j for j in net.neighbors(k) if position[j] < position[k] and j != h):
            w = _xk_witness(net, h, j, k)
            if not w:
                return w
    return ConsistencyWitness(True)


# -- baselines -----------------------------------------------------------------

def _revise_domain(t: _Tracker, i: int, k: int) -> bool:
    """Drop values of D_i without support in D_k (needs C_ik)."""
    net = t.net
    rows = net.rows(i, k)
    changed = False
    for a in iter_bits(net.dom_mask(i)):
        t.report.pair_checks += 1
        if not rows[a]:
            t.remove_value(i, a)
            changed = True
    if changed:
        t.note_wipeout(i)
    return changed


def _revise_pair(t: _Tracker, i: int, j: int, k: int) -> bool:
    """Drop pairs of R_ij without a common support in D_k (needs C_ik, C_jk)."""
    net = t.net
    t.report.triangle_checks += 1
    r_ik, r_jk, r_ij = net.rows(i, k), net.rows(j, k), net.rows(i, j)
    doomed = []
    for a in iter_bits(net.dom_mask(i)):
        row = r_ij[a]
        sup = r_ik[a]
        for b in iter_bits(row):
            t.report.pair_checks += 1
            if not sup & r_jk[b]:
                doomed.append((a, b))
    if not doomed:
        return False
    t.ensure_constraint(i, j)
    for a, b in doomed:
        t.remove_pair(i, a, j, b)
    t.note_wipeout(i, j)
    return True


def _ac_loop(t: _Tracker) -> None:
    net = t.net
    queue = [(i, j) for i, j in net.constraint_indices()] + \
            [(j, i) for i, j in net.constraint_indices()]
    pending = set(queue)
    while queue:
        i, k = queue.pop(0)
        pending.discard((i, k))
        if _revise_domain(t, i, k):
            for j in net.neighbors(i):
                if j != k and (j, i) not in pending:
                    pending.add((j, i))
                    queue.append((j, i))


def arc_consistency(net: Network) -> tuple[Network, FilterReport]:
    work = net.copy()
    t = _Tracker(work, FilterReport("ac"))
    _ac_loop(t)
    return work, t.finish()


def path_consistency(net: Network) -> tuple[Network, FilterReport]:
    """Strong path consistency by repeated sweeps over all triangles."""
    work = net.copy()
    t = _Tracker(work, FilterReport("pc"))
    _ac_loop(t)
    changed = True
    while changed:
        changed = False
        for k in range(work.n):
            for i, j in combinations(sorted(work.neighbors(k)), 2):
                if _revise_pair(t, i, j, k):
                    changed = True
        if changed:
            _ac_loop(t)
    return work, t.finish()


def directional_path_consistency(net: Network, ordering: Sequence[str]) -> tuple[Network, FilterReport]:
    """One backward sweep: make every pair of earlier neighbours of x_k k-compatible."""
    work = net.copy()
    t = _Tracker(work, FilterReport("dpc"))
    position = {work.index(x): p for p, x in enumerate(ordering)}
    if len(position) != work.n:
        raise NetworkError("ordering must list every variable once")
    for x in reversed(ordering):
        k = work.index(x)
        earlier = sorted((j for j in work.neighbors(k) if position[j] < position[k]),
                         key=position.__getitem__)
        for i in earlier:
            _revise_domain(t, i, k)
        for i, j in combinations(earlier, 2):
            _revise_pair(t, i, j, k)
    return work, t.finish()


def compatible_call_bound(n: int, r: int) -> int:
    return sum(k - 1 for k in range(r + 1, n + 1))
