"""Directed acyclic graphs, partially directed graphs, and equivalence-class machinery.

Nodes are integers 0..node_count-1.  A directed edge is an ordered pair
(parent, child); an undirected edge is stored as the sorted pair (min, max).
Both graph types are immutable value objects: equal graphs compare and hash
equal, so they can live in sets and dict keys.
"""

from __future__ import annotations

import itertools
from pathlib import Path

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised for malformed graphs, failed extensions, or orientation conflicts."""


def _sorted_pair(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def _check_nodes(node_count: int, pairs) -> None:
    if node_count < 0:
        raise GraphError(f"node_count must be non-negative, got {node_count}")
    for a, b in pairs:
        if a == b:
            raise GraphError(f"self loop at node {a}")
        if not (0 <= a < node_count and 0 <= b < node_count):
            raise GraphError(f"edge ({a}, {b}) outside 0..{node_count - 1}")


class Dag:
    """Immutable directed acyclic graph with optional edge weights."""

    __slots__ = ("node_count", "edges", "weights", "_parents", "_children", "_hash")

    def __init__(self, node_count: int, edges=(), weights=None):
        edges = frozenset((int(a), int(b)) for a, b in edges)
        _check_nodes(node_count, edges)
        weights = {} if weights is None else {(int(a), int(b)): float(w) for (a, b), w in weights.items()}
        for pair in weights:
            if pair not in edges:
                raise GraphError(f"weight given for missing edge {pair}")
        parents: dict[int, set[int]] = {v: set() for v in range(node_count)}
        children: dict[int, set[int]] = {v: set() for v in range(node_count)}
        for a, b in edges:
            if (b, a) in edges:
                raise GraphError(f"edges ({a}, {b}) and ({b}, {a}) both present")
            parents[b].add(a)
            children[a].add(b)
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", dict(weights))
        object.__setattr__(self, "_parents", {v: frozenset(s) for v, s in parents.items()})
        object.__setattr__(self, "_children", {v: frozenset(s) for v, s in children.items()})
        object.__setattr__(self, "_hash", hash((node_count, edges, tuple(sorted(weights.items())))))
        self.topological_order()  # raises on cycles

    def __setattr__(self, name, value):
        raise AttributeError("Dag is immutable")

    def __reduce__(self):
        return (Dag, (self.node_count, self.edges, self.weights))

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        return (self.node_count, self.edges, self.weights) == (other.node_count, other.edges, other.weights)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Dag(node_count={self.node_count}, edges={sorted(self.edges)})"

    def parents(self, v: int) -> frozenset[int]:
        return self._parents[v]

    def children(self, v: int) -> frozenset[int]:
        return self._children[v]

    def weight(self, a: int, b: int) -> float:
        return self.weights[(a, b)]

    def topological_order(self) -> list[int]:
        """Kahn's algorithm; smallest-index-first for determinism."""
        indeg = {v: len(self._parents[v]) for v in range(self.node_count)}
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order: list[int] = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in sorted(self._children[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
            ready.sort()
        if len(order) != self.node_count:
            raise GraphError("directed cycle detected")
        return order

    def with_weights(self, weights) -> Dag:
        return Dag(self.node_count, self.edges, weights)


class Pdag:
    """Immutable partially directed graph (directed plus undirected edges)."""

    __slots__ = ("node_count", "directed", "undirected", "_parents", "_children", "_neighbors", "_hash")

    def __init__(self, node_count: int, directed=(), undirected=()):
        directed = frozenset((int(a), int(b)) for a, b in directed)
        undirected = frozenset(_sorted_pair(int(a), int(b)) for a, b in undirected)
        _check_nodes(node_count, directed)
        _check_nodes(node_count, undirected)
        for a, b in directed:
            if (b, a) in directed:
                raise GraphError(f"edges ({a}, {b}) and ({b}, {a}) both directed")
            if _sorted_pair(a, b) in undirected:
                raise GraphError(f"edge ({a}, {b}) both directed and undirected")
        parents: dict[int, set[int]] = {v: set() for v in range(node_count)}
        children: dict[int, set[int]] = {v: set() for v in range(node_count)}
        neighbors: dict[int, set[int]] = {v: set() for v in range(node_count)}
        for a, b in directed:
            parents[b].add(a)
            children[a].add(b)
        for a, b in undirected:
            neighbors[a].add(b)
            neighbors[b].add(a)
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "undirected", undirected)
        object.__setattr__(self, "_parents", {v: frozenset(s) for v, s in parents.items()})
        object.__setattr__(self, "_children", {v: frozenset(s) for v, s in children.items()})
        object.__setattr__(self, "_neighbors", {v: frozenset(s) for v, s in neighbors.items()})
        object.__setattr__(self, "_hash", hash((node_count, directed, undirected)))

    def __setattr__(self, name, value):
        raise AttributeError("Pdag is immutable")

    def __reduce__(self):
        return (Pdag, (self.node_count, self.directed, self.undirected))

    def __eq__(self, other):
        if not isinstance(other, Pdag):
            return NotImplemented
        return (self.node_count, self.directed, self.undirected) == (
            other.node_count,
            other.directed,
            other.undirected,
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (
            f"Pdag(node_count={self.node_count}, directed={sorted(self.directed)}, "
            f"undirected={sorted(self.undirected)})"
        )

    @classmethod
    def from_dag(cls, dag: Dag) -> Pdag:
        return cls(dag.node_count, dag.edges, ())

    def parents(self, v: int) -> frozenset[int]:
        return self._parents[v]

    def children(self, v: int) -> frozenset[int]:
        return self._children[v]

    def neighbors(self, v: int) -> frozenset[int]:
        """Nodes joined to v by an undirected edge."""
        return self._neighbors[v]

    def adjacent(self, a: int, b: int) -> bool:
        return (
            (a, b) in self.directed
            or (b, a) in self.directed
            or _sorted_pair(a, b) in self.undirected
        )

    def adjacencies(self, v: int) -> frozenset[int]:
        return self._parents[v] | self._children[v] | self._neighbors[v]

    def edge_mark(self, a: int, b: int) -> str:
        """One of 'none', 'undirected', '->' (a to b), '<-' (b to a)."""
        if (a, b) in self.directed:
            return "->"
        if (b, a) in self.directed:
            return "<-"
        if _sorted_pair(a, b) in self.undirected:
            return "undirected"
        return "none"


def skeleton(graph: Dag | Pdag) -> frozenset[Edge]:
    """Unordered adjacency pairs of a Dag or Pdag."""
    if isinstance(graph, Dag):
        return frozenset(_sorted_pair(a, b) for a, b in graph.edges)
    pairs = {_sorted_pair(a, b) for a, b in graph.directed}
    return frozenset(pairs | graph.undirected)


def v_structures(dag: Dag) -> frozenset[tuple[int, int, int]]:
    """Colliders a -> b <- c with a, c non-adjacent, reported as (a, b, c), a < c."""
    found = set()
    adj = skeleton(dag)
    for b in range(dag.node_count):
        for a, c in itertools.combinations(sorted(dag.parents(b)), 2):
            if _sorted_pair(a, c) not in adj:
                found.add((a, b, c))
    return frozenset(found)


class _Mutable:
    """Working copy of a Pdag used by the orientation algorithms."""

    def __init__(self, pdag: Pdag):
        self.node_count = pdag.node_count
        self.parents = {v: set(pdag.parents(v)) for v in range(pdag.node_count)}
        self.children = {v: set(pdag.children(v)) for v in range(pdag.node_count)}
        self.neighbors = {v: set(pdag.neighbors(v)) for v in range(pdag.node_count)}

    def adjacent(self, a: int, b: int) -> bool:
        return b in self.parents[a] or b in self.children[a] or b in self.neighbors[a]

    def orient(self, a: int, b: int) -> None:
        """Turn the undirected edge a - b into a -> b."""
        self.neighbors[a].discard(b)
        self.neighbors[b].discard(a)
        self.children[a].add(b)
        self.parents[b].add(a)

    def to_pdag(self) -> Pdag:
        directed = [(a, b) for a in range(self.node_count) for b in self.children[a]]
        undirected = {_sorted_pair(a, b) for a in range(self.node_count) for b in self.neighbors[a]}
        return Pdag(self.node_count, directed, undirected)


def _directed_part_acyclic(g: _Mutable) -> bool:
    indeg = {v: len(g.parents[v]) for v in range(g.node_count)}
    ready = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for c in g.children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return seen == g.node_count


def meek_closure(pdag: Pdag) -> Pdag:
    """Apply the four orientation rules until no undirected edge can be oriented."""
    g = _Mutable(pdag)
    if not _directed_part_acyclic(g):
        raise GraphError("directed part of the input contains a cycle")

    def rule1(x: int, y: int) -> bool:
        """Rule 1: orient x - y as x -> y if some z -> x exists with z, y non-adjacent."""
        return any(not g.adjacent(z, y) for z in g.parents[x])

    def rule2(x: int, y: int) -> bool:
        """Rule 2: orient x - y as x -> y if a directed path x -> z -> y exists."""
        return bool(g.children[x] & g.parents[y])

    def rule3(x: int, y: int) -> bool:
        """Rule 3: orient x - y as x -> y if x - z -> y and x - w -> y with z, w non-adjacent."""
        zs = sorted(g.neighbors[x] & g.parents[y])
        return any(not g.adjacent(z, w) for z, w in itertools.combinations(zs, 2))

    def rule4(x: int, y: int) -> bool:
        """Rule 4: orient x - y as x -> y if u - x, u -> v -> y, u, y non-adjacent, v, x adjacent."""
        for v in g.parents[y]:
            if not g.adjacent(v, x):
                continue
            for u in g.parents[v] & g.neighbors[x]:
                if not g.adjacent(u, y):
                    return True
        return False

    changed = True
    while changed:
        changed = False
        pairs = sorted({p for v in range(g.node_count) for p in ((v, n) for n in g.neighbors[v])})
        for x, y in pairs:
            if y not in g.neighbors[x]:
                continue  # oriented earlier in this sweep
            if rule1(x, y) or rule2(x, y) or rule3(x, y) or rule4(x, y):
                g.orient(x, y)
                changed = True
    if not _directed_part_acyclic(g):
        raise GraphError("orientation rules produced a directed cycle")
    return g.to_pdag()


def dag_to_cpdag(dag: Dag) -> Pdag:
    """Completed partially directed graph of the Markov equivalence class of dag."""
    compelled = set()
    for a, b, c in v_structures(dag):
        compelled.add((a, b))
        compelled.add((c, b))
    undirected = [pair for pair in skeleton(dag) if pair not in compelled and pair[::-1] not in compelled]
    return meek_closure(Pdag(dag.node_count, compelled, undirected))


def consistent_extension(pdag: Pdag) -> Dag:
    """Orient the undirected edges into a DAG that keeps every existing orientation
    and creates no new collider; raises GraphError when no such DAG exists."""
    g = _Mutable(pdag)
    if not _directed_part_acyclic(g):
        raise GraphError("directed part of the input contains a cycle")
    oriented: list[Edge] = []
    remaining = set(range(pdag.node_count))
    while remaining:
        for v in sorted(remaining):
            if g.children[v] & remaining:
                continue
            nbrs = g.neighbors[v] & remaining
            adj = (g.parents[v] | g.children[v] | g.neighbors[v]) & remaining
            if all(g.adjacent(n, a) for n in nbrs for a in adj if a != n):
                for n in nbrs:
                    oriented.append((n, v))
                remaining.discard(v)
                break
        else:
            raise GraphError("no consistent extension exists")
    directed = {(a, b) for a in range(pdag.node_count) for b in pdag.children(a)}
    return Dag(pdag.node_count, directed | set(oriented))


def pdag_to_cpdag(pdag: Pdag) -> Pdag:
    """Complete a PDAG to the CPDAG of the class of any consistent extension."""
    return dag_to_cpdag(consistent_extension(pdag))


def is_cpdag(pdag: Pdag) -> bool:
    """True when pdag is exactly the completed graph of some equivalence class."""
    try:
        if meek_closure(pdag) != pdag:
            return False
        return dag_to_cpdag(consistent_extension(pdag)) == pdag
    except GraphError:
        return False


def format_graph(graph: Dag | Pdag) -> str:
    """Plain-text form: header line `nodes=<p>`, then one edge per line.

    Directed edges print as `a -> b` (with ` [w=<repr>]` when weighted), undirected
    edges as `a -- b`.  Weight text uses repr so reading the file back is bit-exact.
    """
    lines = [f"nodes={graph.node_count}"]
    if isinstance(graph, Dag):
        for a, b in sorted(graph.edges):
            if (a, b) in graph.weights:
                lines.append(f"{a} -> {b} [w={graph.weights[(a, b)]!r}]")
            else:
                lines.append(f"{a} -> {b}")
    else:
        for a, b in sorted(graph.directed):
            lines.append(f"{a} -> {b}")
        for a, b in sorted(graph.undirected):
            lines.append(f"{a} -- {b}")
    return "\n".join(lines) + "\n"


def _parse_lines(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("nodes="):
        raise GraphError("missing `nodes=<count>` header")
    try:
        node_count = int(lines[0][len("nodes="):])
    except ValueError as exc:
        raise GraphError(f"bad node count in header: {lines[0]!r}") from exc
    directed: list[Edge] = []
    undirected: list[Edge] = []
    weights: dict[Edge, float] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) == 3 and parts[1] == "--":
            undirected.append((int(parts[0]), int(parts[2])))
        elif len(parts) == 3 and parts[1] == "->":
            directed.append((int(parts[0]), int(parts[2])))
        elif len(parts) == 4 and parts[1] == "->" and parts[3].startswith("[w=") and parts[3].endswith("]"):
            a, b = int(parts[0]), int(parts[2])
            directed.append((a, b))
            weights[(a, b)] = float(parts[3][3:-1])
        else:
            raise GraphError(f"unparseable edge line: {ln!r}")
    return node_count, directed, undirected, weights


def parse_dag(text: str) -> Dag:
    node_count, directed, undirected, weights = _parse_lines(text)
    if undirected:
        raise GraphError("undirected edge in DAG file")
    return Dag(node_count, directed, weights)


def parse_pdag(text: str) -> Pdag:
    node_count, directed, undirected, weights = _parse_lines(text)
    if weights:
        raise GraphError("weights are not allowed in PDAG files")
    return Pdag(node_count, directed, undirected)


def write_graph(graph: Dag | Pdag, path: str | Path) -> None:
    Path(path).write_text(format_graph(graph))


def read_dag(path: str | Path) -> Dag:
    return parse_dag(Path(path).read_text())


def read_pdag(path: str | Path) -> Pdag:
    return parse_pdag(Path(path).read_text())
