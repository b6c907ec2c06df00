"""Random functional CSP instances.

The functional subgraph is drawn first (a random forest over a hidden
topological order, extra forward arcs, then back arcs closing cycles) and
the relations are sampled afterwards, so the number of roots is controlled
directly by the arc count.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from .network import Network


@dataclass(frozen=True)
class GeneratorParams:
    n: int
    d: int
    functional_arcs: int = 0
    cycle_fraction: float = 0.0
    other_constraints: int = 0
    tightness: float = 0.5
    partial_fraction: float = 0.0  # chance that a functional origin value has no image
    seed: int = 0

    def validate(self) -> None:
        if self.n < 1 or self.d < 1:
            raise ValueError("n and d must be positive")
        for name in ("cycle_fraction", "tightness", "partial_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.functional_arcs < 0 or self.other_constraints < 0:
            raise ValueError("constraint counts must be nonnegative")
        pairs = self.n * (self.n - 1) // 2
        if self.functional_arcs + self.other_constraints > pairs:
            raise ValueError(f"{self.functional_arcs + self.other_constraints} constraints "
                             f"requested but only {pairs} variable pairs exist")


def generate_instance(params: GeneratorParams) -> Network:
    params.validate()
    rng = random.Random(params.seed)
    n, d = params.n, params.d
    order = rng.sample(range(n), n)
    used: set[frozenset[int]] = set()
    arcs: list[tuple[int, int]] = []
    parents: dict[int, list[int]] = {v: [] for v in range(n)}

    def add_arc(o: int, t: int) -> None:
        used.add(frozenset((o, t)))
        arcs.append((o, t))
        parents[t].append(o)

    n_back = round(params.cycle_fraction * params.functional_arcs)
    n_fwd = params.functional_arcs - n_back
    n_tree = min(n_fwd, n - 1)
    for p in sorted(rng.sample(range(1, n), n_tree)):
        add_arc(order[rng.randrange(p)], order[p])
    free_fwd = [(order[p], order[q]) for p in range(n) for q in range(p + 1, n)
                if frozenset((order[p], order[q])) not in used]
    rng.shuffle(free_fwd)
    extra = n_fwd - n_tree
    for o, t in free_fwd:
        if extra == 0:
            break
        if frozenset((o, t)) not in used:
            add_arc(o, t)
            extra -= 1

    for _ in range(n_back):
        # close a cycle: from some node back to one of its ancestors
        arc = None
        for v in rng.sample(range(n), n):
            options = [a for a in _ancestors(parents, v) if a != v and frozenset((v, a)) not in used]
            if options:
                arc = (v, rng.choice(options))
                break
        if arc is None:
            options = [(t, o) for o, t in free_fwd if frozenset((o, t)) not in used]
            if not options:
                break
            arc = rng.choice(options)
        add_arc(*arc)

    free = [(i, j) for i in range(n) for j in range(i + 1, n) if frozenset((i, j)) not in used]
    others = rng.sample(free, min(params.other_constraints, len(free)))

    names = [f"x{i + 1}" for i in range(n)]
    net = Network(names, [list(range(d))] * n,
                  metadata={"generator": asdict(params),
                            "functional_arcs": [[names[o], names[t]] for o, t in arcs]})
    for o, t in arcs:
        rows = [0] * d
        for a in range(d):
            if rng.random() >= params.partial_fraction:
                rows[a] = 1 << rng.randrange(d)
        _add(net, o, t, rows, d)
    for i, j in sorted(others):
        rows = [0] * d
        for a in range(d):
            for b in range(d):
                if rng.random() >= params.tightness:
                    rows[a] |= 1 << b
        _add(net, i, j, rows, d)
    return net


def _ancestors(parents: dict[int, list[int]], v: int) -> list[int]:
    seen, todo = set(), list(parents[v])
    while todo:
        u = todo.pop()
        if u not in seen:
            seen.add(u)
            todo.extend(parents[u])
    return sorted(seen)


def _add(net: Network, i: int, j: int, rows: list[int], d: int) -> None:
    if i > j:
        flipped = [0] * d
        for a, r in enumerate(rows):
            for b in range(d):
                if r >> b & 1:
                    flipped[b] |= 1 << a
        i, j, rows = j, i, flipped
    net.add_constraint(i, j, rows)
