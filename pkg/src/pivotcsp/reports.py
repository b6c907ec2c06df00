"""Method comparison and property verification used by the command line."""

from __future__ import annotations

from dataclasses import dataclass, field

from .filtering import (
    FilterReport,
    arc_consistency,
    check_pivot_consistent,
    directional_path_consistency,
    path_consistency,
    pivot_filter,
)
from .network import Network
from .structure import (
    PivotPlan,
    TieBreak,
    compute_pivot_plan,
    functional_subgraph,
    is_root_set,
    minimum_root_set,
    r_compatibility_failure,
)


@dataclass
class CompareReport:
    plan: PivotPlan
    reports: dict[str, FilterReport] = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [self.reports[m].summary() for m in self.reports]

    def table(self) -> str:
        cols = ["method", "constraints_created", "constraints_modified", "pairs_removed",
                "domain_values_removed", "compatible_calls", "triangle_checks", "wall_time"]
        head = ["method", "created", "modified", "pairs", "values", "compat", "triangles", "time(s)"]
        lines = ["  ".join(f"{h:>9}" for h in head)]
        for row in self.rows():
            cells = [f"{row[c]:.4f}" if c == "wall_time" else str(row[c]) for c in cols]
            lines.append("  ".join(f"{c:>9}" for c in cells))
        return "\n".join(lines)


def run_compare(net: Network, plan: PivotPlan | None = None,
                tie_break: TieBreak | str | None = None) -> CompareReport:
    """Run pivot, AC, PC and DPC on independent copies of ``net``."""
    if plan is None:
        tb = TieBreak.coerce(tie_break)
        plan = compute_pivot_plan(net, minimum_root_set(net, tb), tb)
    out = CompareReport(plan)
    out.reports["pivot"] = pivot_filter(net, plan)[1]
    out.reports["ac"] = arc_consistency(net)[1]
    out.reports["pc"] = path_consistency(net)[1]
    out.reports["dpc"] = directional_path_consistency(net, plan.ordering)[1]
    return out


@dataclass
class Diagnostic:
    check: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.check}" + (f": {self.detail}" if self.detail else "")


def run_verify(net: Network, plan: PivotPlan | None = None,
               tie_break: TieBreak | str | None = None) -> list[Diagnostic]:
    """Check root set, ordering and pivot consistency of ``net`` under ``plan``."""
    g = functional_subgraph(net)
    if plan is None:
        tb = TieBreak.coerce(tie_break)
        plan = compute_pivot_plan(net, minimum_root_set(net, tb), tb)
    out = []
    root_ok = is_root_set(net, plan.roots, g)
    out.append(Diagnostic("root set", root_ok, ", ".join(plan.roots)))
    best = minimum_root_set(net).r
    out.append(Diagnostic("minimum root set", root_ok and plan.r == best,
                          f"r = {plan.r}, minimum = {best}"))
    failure = r_compatibility_failure(plan.ordering, plan.roots, g)
    out.append(Diagnostic("R-compatible ordering", failure is None,
                          failure or ", ".join(plan.ordering)))
    witness = check_pivot_consistent(net, plan)
    detail = witness.reason or ""
    if witness.counterexample:
        i, j, pair, k = witness.counterexample
        detail = f"{detail} (witness {i}, {j}, {pair!r}, target {k})"
    out.append(Diagnostic("pivot consistent", witness.verdict, detail))
    return out
