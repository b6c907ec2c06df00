"""Binary constraint networks with explicit relations.

Variables are addressed by name in the public API.  Internally every
variable has a dense index, every value a dense index within its
variable's original domain, and every relation is stored as a list of
row bitmasks (``rows[a]`` is the set of partner value indices of value
``a``).  Both orientations of a constraint are kept in sync so that
transposed lookups cost nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

Value = Hashable
Instantiation = dict  # variable name -> value


class NetworkError(ValueError):
    """Raised for malformed networks or invalid queries."""


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Network:
    """A binary CSP (X, D, C, R).

    Absent constraints are universal relations and are never stored.
    A constraint may also be declared universal explicitly; it then stays
    symbolic until a pair is removed from it.
    """

    def __init__(
        self,
        variables: Sequence[str],
        domains: Sequence[Sequence[Value]],
        metadata: Mapping[str, Any] | None = None,
    ) -> None:
        if len(variables) != len(domains):
            raise NetworkError("one domain per variable is required")
        self.names: tuple[str, ...] = tuple(variables)
        self._index: dict[str, int] = {}
        for i, name in enumerate(self.names):
            if name in self._index:
                raise NetworkError(f"duplicate variable name {name!r}")
            self._index[name] = i
        self._values: list[tuple[Value, ...]] = []
        self._value_index: list[dict[Value, int]] = []
        for name, dom in zip(self.names, domains):
            values = tuple(dom)
            lookup = {}
            for a, v in enumerate(values):
                if v in lookup:
                    raise NetworkError(f"duplicate value {v!r} in domain of {name!r}")
                lookup[v] = a
            self._values.append(values)
            self._value_index.append(lookup)
        self._dom: list[int] = [(1 << len(v)) - 1 for v in self._values]
        self._rows: dict[tuple[int, int], list[int]] = {}
        self._adj: list[set[int]] = [set() for _ in self.names]
        self._declared_universal: set[tuple[int, int]] = set()
        self.metadata: dict[str, Any] = dict(metadata or {})

    # -- basic queries -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.names

    def index(self, var: str | int) -> int:
        if isinstance(var, int) and not isinstance(var, bool):
            if not 0 <= var < self.n:
                raise NetworkError(f"unknown variable index {var}")
            return var
        try:
            return self._index[var]
        except KeyError:
            raise NetworkError(f"unknown variable {var!r}") from None

    def name(self, i: int) -> str:
        return self.names[i]

    def domain(self, var: str | int) -> tuple[Value, ...]:
        """Current domain of ``var`` in declaration order."""
        i = self.index(var)
        return tuple(self._values[i][a] for a in iter_bits(self._dom[i]))

    def original_values(self, var: str | int) -> tuple[Value, ...]:
        return self._values[self.index(var)]

    def value(self, i: int, a: int) -> Value:
        return self._values[i][a]

    def value_index(self, i: int, v: Value) -> int:
        try:
            return self._value_index[i][v]
        except (KeyError, TypeError):
            raise NetworkError(f"value {v!r} not in domain of {self.names[i]!r}") from None

    def dom_mask(self, i: int) -> int:
        return self._dom[i]

    def domain_size(self, i: int) -> int:
        return self._dom[i].bit_count()

    @property
    def d(self) -> int:
        return max((m.bit_count() for m in self._dom), default=0)

    @property
    def e(self) -> int:
        return len(self.constraint_indices())

    def constraint_indices(self) -> list[tuple[int, int]]:
        """Constraint scopes as sorted (lower, higher) index pairs."""
        return sorted(key for key in self._rows if key[0] < key[1])

    @property
    def constraints(self) -> list[tuple[str, str]]:
        return [(self.names[i], self.names[j]) for i, j in self.constraint_indices()]

    def is_constrained(self, i: int, j: int) -> bool:
        return (i, j) in self._rows

    def has_constraint(self, x: str | int, y: str | int) -> bool:
        return self.is_constrained(self.index(x), self.index(y))

    def neighbors(self, i: int) -> set[int]:
        return self._adj[i]

    def is_declared_universal(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self._declared_universal

    def rows(self, i: int, j: int) -> list[int]:
        """Row masks of R_ij; synthesized from the domains when absent.

        The returned list must not be mutated by callers.
        """
        rows = self._rows.get((i, j))
        if rows is not None:
            return rows
        full = self._dom[j]
        dom_i = self._dom[i]
        return [full if dom_i >> a & 1 else 0 for a in range(len(self._values[i]))]

    def allows(self, i: int, a: int, j: int, b: int) -> bool:
        rows = self._rows.get((i, j))
        if rows is None:
            return bool(self._dom[i] >> a & 1 and self._dom[j] >> b & 1)
        return bool(rows[a] >> b & 1)

    def relation_size(self, i: int, j: int) -> int:
        return sum(r.bit_count() for r in self.rows(i, j))

    # -- mutation (used by filtering on private copies) ------------------

    def add_constraint(self, i: int, j: int, rows: Sequence[int] | None = None,
                       universal: bool = False) -> None:
        """Add C_ij; ``rows=None`` materializes the universal relation."""
        if i == j:
            raise NetworkError("a constraint needs two distinct variables")
        if (i, j) in self._rows:
            raise NetworkError(
                f"duplicate constraint scope {{{self.names[i]}, {self.names[j]}}}")
        if rows is None:
            rows = self.rows(i, j)
        fwd = [r & self._dom[j] if self._dom[i] >> a & 1 else 0 for a, r in enumerate(rows)]
        bwd = [0] * len(self._values[j])
        for a, r in enumerate(fwd):
            for b in iter_bits(r):
                bwd[b] |= 1 << a
        self._rows[(i, j)] = fwd
        self._rows[(j, i)] = bwd
        self._adj[i].add(j)
        self._adj[j].add(i)
        if universal:
            self._declared_universal.add((min(i, j), max(i, j)))

    def remove_pair(self, i: int, a: int, j: int, b: int) -> bool:
        """Remove (a, b) from R_ij; returns False if it was not present."""
        fwd = self._rows[(i, j)]
        if not fwd[a] >> b & 1:
            return False
        fwd[a] &= ~(1 << b)
        self._rows[(j, i)][b] &= ~(1 << a)
        self._declared_universal.discard((min(i, j), max(i, j)))
        return True

    def remove_value(self, i: int, a: int) -> bool:
        """Drop value ``a`` from D_i together with every pair using it."""
        if not self._dom[i] >> a & 1:
            return False
        self._dom[i] &= ~(1 << a)
        clear = ~(1 << a)
        for j in self._adj[i]:
            fwd = self._rows[(i, j)]
            bwd = self._rows[(j, i)]
            for b in iter_bits(fwd[a]):
                bwd[b] &= clear
            fwd[a] = 0
        return True

    def copy(self) -> Network:
        other = Network.__new__(Network)
        other.names = self.names
        other._index = self._index
        other._values = self._values
        other._value_index = self._value_index
        other._dom = list(self._dom)
        other._rows = {key: list(rows) for key, rows in self._rows.items()}
        other._adj = [set(s) for s in self._adj]
        other._declared_universal = set(self._declared_universal)
        other.metadata = dict(self.metadata)
        return other

    # -- comparison helpers --------------------------------------------

    def canonical(self) -> tuple:
        """Hashable token-level form used for structural equality."""
        doms = tuple(frozenset(self.domain(i)) for i in range(self.n))
        rels = {}
        for i, j in self.constraint_indices():
            rels[(self.names[i], self.names[j])] = frozenset(_token_pairs(self, i, j))
        return (self.names, doms, frozenset(rels.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self.canonical() == other.canonical()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Network(n={self.n}, d={self.d}, e={self.e})"


def _token_pairs(net: Network, i: int, j: int) -> Iterator[tuple[Value, Value]]:
    vi, vj = net._values[i], net._values[j]
    for a, r in enumerate(net.rows(i, j)):
        for b in iter_bits(r):
            yield vi[a], vj[b]


@dataclass(frozen=True)
class Relation:
    """An oriented view of R_ij over the current domains."""

    first: str
    second: str
    pairs: frozenset
    universal: bool = False

    def transpose(self) -> Relation:
        return Relation(self.second, self.first,
                        frozenset((b, a) for a, b in self.pairs), self.universal)

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def __iter__(self) -> Iterator[tuple[Value, Value]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class FunctionalDirections:
    i_to_j: bool
    j_to_i: bool

    @property
    def functional(self) -> bool:
        return self.i_to_j or self.j_to_i

    @property
    def bijective(self) -> bool:
        return self.i_to_j and self.j_to_i


@dataclass(frozen=True)
class NetworkStats:
    n: int
    d: int
    e: int
    e_f: int
    e_R: int = 0


def build_network(spec: Mapping[str, Any]) -> Network:
    """Build a validated network from a declarative description.

    ``spec`` follows the instance document layout::

        {"variables": [{"name": ..., "domain": [...]}, ...],
         "constraints": [{"scope": [x, y], "pairs": [[a, b], ...]}
                         | {"scope": [x, y], "universal": true}, ...],
         "metadata": {...}}
    """
    try:
        var_specs = spec["variables"]
    except (KeyError, TypeError):
        raise NetworkError("variables: field is required") from None
    names, domains = [], []
    for pos, entry in enumerate(var_specs):
        try:
            names.append(entry["name"])
            domains.append(list(entry["domain"]))
        except (KeyError, TypeError):
            raise NetworkError(f"variables[{pos}]: needs 'name' and 'domain'") from None
    net = Network(names, domains, spec.get("metadata"))
    for pos, entry in enumerate(spec.get("constraints", [])):
        where = f"constraints[{pos}]"
        try:
            x, y = entry["scope"]
        except (KeyError, TypeError, ValueError):
            raise NetworkError(f"{where}.scope: expected a pair of variable names") from None
        try:
            i, j = net.index(x), net.index(y)
        except NetworkError as exc:
            raise NetworkError(f"{where}.scope: {exc}") from None
        if i == j:
            raise NetworkError(f"{where}.scope: self-constraint on {x!r}")
        if net.is_constrained(i, j):
            raise NetworkError(f"{where}.scope: duplicate constraint scope {{{x}, {y}}}")
        if entry.get("universal"):
            if "pairs" in entry:
                raise NetworkError(f"{where}: 'pairs' and 'universal' are exclusive")
            net.add_constraint(i, j, universal=True)
            continue
        if "pairs" not in entry:
            raise NetworkError(f"{where}: needs 'pairs' or 'universal: true'")
        rows = [0] * len(net.original_values(i))
        for k, pair in enumerate(entry["pairs"]):
            try:
                vx, vy = pair
            except (TypeError, ValueError):
                raise NetworkError(f"{where}.pairs[{k}]: expected a pair") from None
            try:
                a = net.value_index(i, _hashable(vx))
                b = net.value_index(j, _hashable(vy))
            except NetworkError as exc:
                raise NetworkError(f"{where}.pairs[{k}]: {exc}") from None
            rows[a] |= 1 << b
        lo, hi = min(i, j), max(i, j)
        if (lo, hi) != (i, j):
            rows = _transpose_rows(rows, len(net.original_values(j)))
        net.add_constraint(lo, hi, rows)
    return net


def _hashable(v: Any) -> Value:
    return tuple(v) if isinstance(v, list) else v


def _transpose_rows(rows: Sequence[int], width: int) -> list[int]:
    out = [0] * width
    for a, r in enumerate(rows):
        for b in iter_bits(r):
            out[b] |= 1 << a
    return out


def network_to_spec(net: Network) -> dict[str, Any]:
    """Inverse of :func:`build_network` over the current domains."""
    out: dict[str, Any] = {
        "variables": [{"name": name, "domain": list(net.domain(i))}
                      for i, name in enumerate(net.names)],
        "constraints": [],
    }
    for i, j in net.constraint_indices():
        scope = [net.names[i], net.names[j]]
        if net.is_declared_universal(i, j):
            out["constraints"].append({"scope": scope, "universal": True})
        else:
            out["constraints"].append(
                {"scope": scope, "pairs": [list(p) for p in _token_pairs(net, i, j)]})
    if net.metadata:
        out["metadata"] = dict(net.metadata)
    return out


def relation_view(net: Network, x: str, y: str) -> Relation:
    """The relation R_xy, universal when no constraint links x and y."""
    i, j = net.index(x), net.index(y)
    if i == j:
        raise NetworkError(f"relation of {x!r} with itself is not defined")
    universal = not net.is_constrained(i, j) or net.is_declared_universal(i, j)
    return Relation(net.names[i], net.names[j], frozenset(_token_pairs(net, i, j)), universal)


def is_functional(net: Network, i: int, j: int) -> bool:
    """True iff every value of D_i has at most one partner in D_j."""
    return all(r & (r - 1) == 0 for r in net.rows(i, j))


def functional_directions(net: Network, x: str, y: str) -> FunctionalDirections:
    i, j = net.index(x), net.index(y)
    if not net.is_constrained(i, j):
        raise NetworkError(f"no constraint between {x!r} and {y!r}")
    return FunctionalDirections(is_functional(net, i, j), is_functional(net, j, i))


def image_index(net: Network, i: int, k: int, a: int) -> int | None:
    r = net.rows(i, k)[a]
    if r & (r - 1):
        raise NetworkError(f"{net.names[i]} -> {net.names[k]} is not functional at this value")
    return r.bit_length() - 1 if r else None


def image(net: Network, x: str, y: str, value: Value) -> Value | None:
    """f_xy(value), or None when the value has no partner."""
    i, k = net.index(x), net.index(y)
    if not is_functional(net, i, k):
        raise NetworkError(f"{x} -> {y} is not functional")
    a = net.value_index(i, value)
    b = image_index(net, i, k, a)
    return None if b is None else net.value(k, b)


def supports(net: Network, x: str, value: Value, y: str) -> frozenset:
    i, k = net.index(x), net.index(y)
    a = net.value_index(i, value)
    if not net.dom_mask(i) >> a & 1:
        raise NetworkError(f"value {value!r} was removed from the domain of {x!r}")
    return frozenset(net.value(k, b) for b in iter_bits(net.rows(i, k)[a]))


def is_consistent(net: Network, inst: Mapping[str, Value]) -> bool:
    """True iff every constraint with both ends assigned is satisfied."""
    assigned: list[tuple[int, int]] = []
    for name, v in inst.items():
        i = net.index(name)
        try:
            a = net.value_index(i, v)
        except NetworkError:
            return False
        if not net.dom_mask(i) >> a & 1:
            return False
        assigned.append((i, a))
    for p, (i, a) in enumerate(assigned):
        for j, b in assigned[p + 1:]:
            if net.is_constrained(i, j) and not net.rows(i, j)[a] >> b & 1:
                return False
    return True


def _same_variables(a: Network, b: Network) -> None:
    if a.names != b.names:
        raise NetworkError("networks are defined over different variable sets")


def is_subproblem(sub: Network, sup: Network) -> bool:
    """``sub`` ⊴ ``sup``: domains shrink, constraints grow, relations shrink."""
    _same_variables(sub, sup)
    for i in range(sub.n):
        if not set(sub.domain(i)) <= set(sup.domain(i)):
            return False
    for i, j in sup.constraint_indices():
        if not sub.is_constrained(i, j):
            return False
        if not set(_token_pairs(sub, i, j)) <= set(_token_pairs(sup, i, j)):
            return False
    return True


def union_networks(a: Network, b: Network, base: Network) -> Network:
    """Least common relaxation: domain union, constraint intersection, relation union."""
    if not (is_subproblem(a, base) and is_subproblem(b, base)):
        raise NetworkError("both networks must be subproblems of the base")
    out = Network(base.names, [base.original_values(i) for i in range(base.n)], base.metadata)
    for i in range(out.n):
        keep = set(a.domain(i)) | set(b.domain(i))
        for v in base.original_values(i):
            if v not in keep:
                out.remove_value(i, out.value_index(i, v))
    for i, j in a.constraint_indices():
        if not b.is_constrained(i, j):
            continue
        rows = [0] * len(out.original_values(i))
        for src in (a, b):
            for vx, vy in _token_pairs(src, i, j):
                rows[out.value_index(i, vx)] |= 1 << out.value_index(j, vy)
        out.add_constraint(i, j, rows, universal=(a.is_declared_universal(i, j)
                                                   and b.is_declared_universal(i, j)))
    return out


def is_functional_constraint(net: Network, i: int, j: int) -> bool:
    return is_functional(net, i, j) or is_functional(net, j, i)


def network_stats(net: Network, roots: Iterable[str] = ()) -> NetworkStats:
    members = {net.index(x) for x in roots}
    scopes = net.constraint_indices()
    e_f = sum(1 for i, j in scopes if is_functional_constraint(net, i, j))
    e_r = sum(1 for i, j in scopes if i in members and j in members)
    return NetworkStats(n=net.n, d=net.d, e=len(scopes), e_f=e_f, e_R=e_r)
