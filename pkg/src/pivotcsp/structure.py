"""Functional subgraph, strongly connected components, root sets and pivot plans."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .network import Network, NetworkError, is_functional


class StructureError(NetworkError):
    pass


class TieBreak:
    """Resolves the free choices of root and pivot selection.

    ``lex`` always takes the lowest variable index (first-in-first-out for
    the pending queue); ``seeded`` draws from a private RNG.
    """

    def __init__(self, policy: str = "lex", seed: int | None = None) -> None:
        if policy not in ("lex", "seeded"):
            raise ValueError(f"unknown tie-break policy {policy!r}")
        self.policy = policy
        self.seed = seed
        self._rng = random.Random(seed)

    @classmethod
    def coerce(cls, value: TieBreak | str | None, seed: int | None = None) -> TieBreak:
        if isinstance(value, TieBreak):
            return value
        return cls(value or "lex", seed)

    def pick(self, items: Sequence[int]) -> int:
        if self.policy == "lex":
            return min(items)
        return self._rng.choice(list(items))

    def order(self, items: Iterable[int]) -> list[int]:
        out = sorted(items)
        if self.policy == "seeded":
            self._rng.shuffle(out)
        return out

    def __repr__(self) -> str:
        return f"TieBreak({self.policy!r}, seed={self.seed!r})"


@dataclass
class FunctionalGraph:
    names: tuple[str, ...]
    arcs: list[tuple[int, int]]
    succ: list[list[int]] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.names)

    def named_arcs(self) -> list[tuple[str, str]]:
        return [(self.names[o], self.names[t]) for o, t in self.arcs]

    def has_arc(self, o: int, t: int) -> bool:
        return t in self.succ[o]


@dataclass
class SCCDecomposition:
    components: list[list[int]]
    component_of: list[int]
    steps: int = 0


@dataclass
class ReducedGraph:
    size: int
    arcs: set[tuple[int, int]]

    def sources(self) -> list[int]:
        has_pred = {t for _, t in self.arcs}
        return [c for c in range(self.size) if c not in has_pred]


@dataclass(frozen=True)
class RootSet:
    members: tuple[str, ...]

    @property
    def r(self) -> int:
        return len(self.members)

    def __contains__(self, name: object) -> bool:
        return name in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class PivotPlan:
    """Root set, R-compatible ordering and one pivot candidate per non-root."""

    roots: RootSet
    ordering: tuple[str, ...]
    pivot_candidates: dict[str, str]  # target -> origin
    steps: int = 0

    @property
    def r(self) -> int:
        return self.roots.r

    def arcs(self) -> list[tuple[str, str]]:
        """Candidate arcs (origin, target) in ordering order of their targets."""
        return [(self.pivot_candidates[t], t) for t in self.ordering[self.r:]]

    def to_dict(self) -> dict:
        return {
            "roots": list(self.roots.members),
            "ordering": list(self.ordering),
            "pivots": [{"origin": o, "target": t} for o, t in self.arcs()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> PivotPlan:
        try:
            roots = RootSet(tuple(data["roots"]))
            ordering = tuple(data["ordering"])
            pivots = {p["target"]: p["origin"] for p in data["pivots"]}
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed plan: missing {exc}") from None
        return cls(roots, ordering, pivots)


def functional_subgraph(net: Network) -> FunctionalGraph:
    arcs = []
    for i, j in net.constraint_indices():
        if is_functional(net, i, j):
            arcs.append((i, j))
        if is_functional(net, j, i):
            arcs.append((j, i))
    arcs.sort()
    succ: list[list[int]] = [[] for _ in range(net.n)]
    for o, t in arcs:
        succ[o].append(t)
    return FunctionalGraph(net.names, arcs, succ)


def tarjan_scc(g: FunctionalGraph) -> SCCDecomposition:
    """Tarjan's algorithm, iterative; components come out in reverse topological order."""
    n = g.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    component_of = [-1] * n
    counter = 0
    steps = 0
    for start in range(n):
        if index[start] >= 0:
            continue
        work = [(start, 0)]
        while work:
            v, pos = work.pop()
            steps += 1
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            succ = g.succ[v]
            while pos < len(succ):
                w = succ[pos]
                pos += 1
                steps += 1
                if index[w] < 0:
                    work.append((v, pos))
                    work.append((w, 0))
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        component_of[w] = len(components)
                        comp.append(w)
                        if w == v:
                            break
                    components.append(sorted(comp))
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
    return SCCDecomposition(components, component_of, steps)


def reduce(g: FunctionalGraph, scc: SCCDecomposition) -> ReducedGraph:
    arcs = set()
    for o, t in g.arcs:
        co, ct = scc.component_of[o], scc.component_of[t]
        if co != ct:
            arcs.add((co, ct))
    return ReducedGraph(len(scc.components), arcs)


def minimum_root_set(net: Network, tie_break: TieBreak | str | None = None) -> RootSet:
    """One representative per source component of the reduced functional graph."""
    tb = TieBreak.coerce(tie_break)
    g = functional_subgraph(net)
    scc = tarjan_scc(g)
    reduced = reduce(g, scc)
    reps = [tb.pick(scc.components[c]) for c in reduced.sources()]
    return RootSet(tuple(net.names[i] for i in tb.order(reps)))


def descendants(g: FunctionalGraph, x: str | int) -> set[str]:
    """Vertices reachable from ``x`` by a nonempty directed path."""
    start = x if isinstance(x, int) else g.names.index(x)
    seen: set[int] = set()
    todo = list(g.succ[start])
    while todo:
        v = todo.pop()
        if v in seen:
            continue
        seen.add(v)
        todo.extend(g.succ[v])
    return {g.names[v] for v in seen}


def _reachable(g: FunctionalGraph, starts: Iterable[int]) -> set[int]:
    seen = set(starts)
    todo = list(seen)
    while todo:
        v = todo.pop()
        for w in g.succ[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def is_root_set(net: Network, candidate: Iterable[str], g: FunctionalGraph | None = None) -> bool:
    g = g or functional_subgraph(net)
    starts = [net.index(x) for x in candidate]
    return len(_reachable(g, starts)) == net.n


def compute_pivot_plan(net: Network, roots: RootSet,
                       tie_break: TieBreak | str | None = None) -> PivotPlan:
    """Number the roots, then grow the ordering along functional arcs.

    Each newly numbered non-root variable receives exactly one candidate arc
    from an already numbered origin, so the candidates cannot form a circuit.
    """
    tb = TieBreak.coerce(tie_break)
    g = functional_subgraph(net)
    root_idx = [net.index(x) for x in roots]
    in_roots = set(root_idx)
    marked = [False] * net.n
    number = [0] * net.n
    origins: list[list[int]] = [[] for _ in range(net.n)]
    pending: deque[int] = deque()
    in_pending = [False] * net.n
    ordering: list[int] = []
    steps = 0

    def visit(v: int) -> None:
        nonlocal steps
        marked[v] = True
        number[v] = len(ordering)
        ordering.append(v)
        for w in g.succ[v]:
            steps += 1
            if not marked[w] and w not in in_roots:
                if not in_pending[w]:
                    in_pending[w] = True
                    pending.append(w)
                origins[w].append(v)

    for v in root_idx:
        steps += 1
        visit(v)
    candidates: dict[str, str] = {}
    while len(ordering) < net.n:
        steps += 1
        if not pending:
            missing = [net.names[v] for v in range(net.n) if not marked[v]]
            raise StructureError(f"not a root set: never reached {', '.join(missing)}")
        if tb.policy == "lex":
            k = pending.popleft()
        else:
            k = pending[tb._rng.randrange(len(pending))]
            pending.remove(k)
        in_pending[k] = False
        visit(k)
        # origins[k] is appended in numbering order, so lex takes the earliest.
        h = origins[k][0] if tb.policy == "lex" else tb._rng.choice(origins[k])
        candidates[net.names[k]] = net.names[h]
    return PivotPlan(roots, tuple(net.names[v] for v in ordering), candidates, steps)


def is_r_compatible(ordering: Sequence[str], roots: RootSet | Iterable[str],
                    g: FunctionalGraph) -> bool:
    return r_compatibility_failure(ordering, roots, g) is None


def r_compatibility_failure(ordering: Sequence[str], roots: RootSet | Iterable[str],
                            g: FunctionalGraph) -> str | None:
    """Describe why ``ordering`` is not R-compatible, or None if it is."""
    members = set(roots)
    if sorted(ordering) != sorted(g.names):
        return "ordering is not a permutation of the variables"
    r = len(members)
    prefix = set(ordering[:r])
    if prefix != members:
        outsider = next(x for x in ordering[:r] if x not in members)
        return f"not prefixed by the root set: {outsider} appears at position {ordering.index(outsider) + 1}"
    pos = {name: p for p, name in enumerate(ordering)}
    idx = {name: i for i, name in enumerate(g.names)}
    preds: list[list[int]] = [[] for _ in g.names]
    for o, t in g.arcs:
        preds[t].append(o)
    for p in range(r, len(ordering)):
        x = ordering[p]
        if not any(pos[g.names[o]] < p for o in preds[idx[x]]):
            return f"{x} has no earlier functional ancestor"
    return None
