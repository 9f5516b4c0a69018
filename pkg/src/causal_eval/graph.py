"""Directed and partially directed graphs over named variables.

Both graph types are immutable value objects. Equality ignores the order in
which variables were declared. Variables are strings; every operation that
must break ties does so lexicographically by identifier.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from typing import Iterable, Mapping

import numpy as np

from .errors import ExtensionError, GraphError, IdentifierError, ParameterError

__all__ = [
    "Dag",
    "Pdag",
    "random_dag",
    "d_separated",
    "cpdag_of",
    "consistent_extension",
    "extend_or_repair",
    "meek_orient",
    "graph_to_dict",
    "graph_from_dict",
    "dumps_graph",
    "loads_graph",
]


def _pair(a: str, b: str) -> frozenset:
    return frozenset((a, b))


class Dag:
    """Directed acyclic graph.

    Parameters
    ----------
    variables : iterable of str
        Declared variables. Order is kept for display and iteration but is
        irrelevant for equality.
    edges : iterable of (parent, child)
    """

    __slots__ = ("_variables", "_edges", "_parents", "_children", "_order")

    def __init__(self, variables: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise GraphError("duplicate variable identifiers")
        edge_list = [tuple(e) for e in edges]
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            raise GraphError("duplicate edges")
        declared = set(variables)
        parents: dict[str, set] = {v: set() for v in variables}
        children: dict[str, set] = {v: set() for v in variables}
        for a, b in edge_set:
            if a not in declared or b not in declared:
                raise IdentifierError(f"edge ({a!r}, {b!r}) references an undeclared variable")
            if a == b:
                raise GraphError(f"self-loop on {a!r}")
            parents[b].add(a)
            children[a].add(b)
        self._variables = variables
        self._edges = edge_set
        self._parents = {v: frozenset(p) for v, p in parents.items()}
        self._children = {v: frozenset(c) for v, c in children.items()}
        self._order = _topological_order(variables, self._parents, self._children)
        if self._order is None:
            raise GraphError("graph contains a directed cycle")

    @property
    def variables(self) -> tuple[str, ...]:
        return self._variables

    @property
    def edges(self) -> frozenset:
        return self._edges

    def parents(self, v: str) -> frozenset:
        self._check(v)
        return self._parents[v]

    def children(self, v: str) -> frozenset:
        self._check(v)
        return self._children[v]

    def topological_order(self) -> tuple[str, ...]:
        """Topological order; ties broken lexicographically."""
        return self._order

    def ancestors(self, nodes: Iterable[str]) -> set:
        """Ancestors of ``nodes``, including the nodes themselves."""
        return self._closure(nodes, self._parents)

    def descendants(self, nodes: Iterable[str]) -> set:
        """Descendants of ``nodes``, including the nodes themselves."""
        return self._closure(nodes, self._children)

    def adjacent(self, a: str, b: str) -> bool:
        return (a, b) in self._edges or (b, a) in self._edges

    def with_edges(self, add=(), remove=()) -> "Dag":
        edges = (set(self._edges) - set(map(tuple, remove))) | set(map(tuple, add))
        return Dag(self._variables, edges)

    def _closure(self, nodes, step):
        seen = set()
        stack = list(nodes)
        for v in stack:
            self._check(v)
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(step[v])
        return seen

    def _check(self, v):
        if v not in self._parents:
            raise IdentifierError(f"unknown variable {v!r}")

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        return set(self._variables) == set(other._variables) and self._edges == other._edges

    def __hash__(self):
        return hash((frozenset(self._variables), self._edges))

    def __repr__(self):
        edges = ", ".join(f"{a}->{b}" for a, b in sorted(self._edges))
        return f"Dag([{', '.join(self._variables)}], [{edges}])"


class Pdag:
    """Partially directed graph: directed edges plus undirected edges.

    A pair may carry directed edges in both directions (such a graph has no
    consistent extension) but never both a directed and an undirected edge.
    """

    __slots__ = ("_variables", "_directed", "_undirected")

    def __init__(
        self,
        variables: Iterable[str],
        directed_edges: Iterable[tuple[str, str]] = (),
        undirected_edges: Iterable[Iterable[str]] = (),
    ):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise GraphError("duplicate variable identifiers")
        declared = set(variables)
        directed = frozenset(tuple(e) for e in directed_edges)
        undirected = frozenset(frozenset(e) for e in undirected_edges)
        for a, b in directed:
            if a not in declared or b not in declared:
                raise IdentifierError(f"edge ({a!r}, {b!r}) references an undeclared variable")
            if a == b:
                raise GraphError(f"self-loop on {a!r}")
        for e in undirected:
            if len(e) != 2:
                raise GraphError(f"malformed undirected edge {sorted(e)}")
            if not e <= declared:
                raise IdentifierError(f"edge {sorted(e)} references an undeclared variable")
        for a, b in directed:
            if _pair(a, b) in undirected:
                raise GraphError(f"pair ({a!r}, {b!r}) is both directed and undirected")
        self._variables = variables
        self._directed = directed
        self._undirected = undirected

    @classmethod
    def from_dag(cls, dag: Dag) -> "Pdag":
        return cls(dag.variables, dag.edges, ())

    @property
    def variables(self) -> tuple[str, ...]:
        return self._variables

    @property
    def directed_edges(self) -> frozenset:
        return self._directed

    @property
    def undirected_edges(self) -> frozenset:
        return self._undirected

    def is_dag(self) -> bool:
        if self._undirected:
            return False
        try:
            Dag(self._variables, self._directed)
        except GraphError:
            return False
        return True

    def to_dag(self) -> Dag:
        """The graph as a Dag; fails unless fully directed and acyclic."""
        if self._undirected:
            raise GraphError("graph has undirected edges")
        return Dag(self._variables, self._directed)

    def adjacent(self, a: str, b: str) -> bool:
        return (a, b) in self._directed or (b, a) in self._directed or _pair(a, b) in self._undirected

    def edge_status(self, a: str, b: str) -> str:
        """One of ``none``, ``undirected``, ``->``, ``<-`` (``<->`` if both)."""
        fwd = (a, b) in self._directed
        back = (b, a) in self._directed
        if fwd and back:
            return "<->"
        if fwd:
            return "->"
        if back:
            return "<-"
        if _pair(a, b) in self._undirected:
            return "undirected"
        return "none"

    def __eq__(self, other):
        if not isinstance(other, Pdag):
            return NotImplemented
        return (
            set(self._variables) == set(other._variables)
            and self._directed == other._directed
            and self._undirected == other._undirected
        )

    def __hash__(self):
        return hash((frozenset(self._variables), self._directed, self._undirected))

    def __repr__(self):
        d = ", ".join(f"{a}->{b}" for a, b in sorted(self._directed))
        u = ", ".join("{}-{}".format(*sorted(e)) for e in sorted(self._undirected, key=sorted))
        return f"Pdag([{', '.join(self._variables)}], directed=[{d}], undirected=[{u}])"


def _topological_order(variables, parents, children):
    indegree = {v: len(parents[v]) for v in variables}
    ready = sorted(v for v in variables if indegree[v] == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        released = []
        for c in children[v]:
            indegree[c] -= 1
            if indegree[c] == 0:
                released.append(c)
        if released:
            ready = sorted(ready + released)
    if len(order) != len(variables):
        return None
    return tuple(order)


def random_dag(n_vars: int, expected_neighbors: float, seed: int) -> Dag:
    """Random DAG with a given expected number of neighbours per node.

    Draws a uniformly random variable ordering, then includes each forward
    pair independently with probability ``expected_neighbors / (n_vars - 1)``.
    Variables are named ``X0 .. X{n-1}``, zero-padded so that lexicographic
    and numeric order agree.
    """
    if n_vars < 1:
        raise ParameterError("n_vars must be positive")
    if expected_neighbors < 0:
        raise ParameterError("expected_neighbors must be nonnegative")
    if n_vars == 1:
        if expected_neighbors > 0:
            raise ParameterError("a single-variable graph cannot have neighbours")
        return Dag(["X0"], ())
    if expected_neighbors > n_vars - 1:
        raise ParameterError(
            f"expected_neighbors={expected_neighbors} exceeds n_vars - 1 = {n_vars - 1}"
        )
    width = len(str(n_vars - 1))
    names = [f"X{i:0{width}d}" for i in range(n_vars)]
    rng = np.random.default_rng(seed)
    order = rng.permutation(n_vars)
    p = expected_neighbors / (n_vars - 1)
    draws = rng.random((n_vars, n_vars))
    edges = [
        (names[order[i]], names[order[j]])
        for i in range(n_vars)
        for j in range(i + 1, n_vars)
        if draws[i, j] < p
    ]
    return Dag(names, edges)


def d_separated(g: Dag, x: str, y: str, z: Iterable[str] = ()) -> bool:
    """Whether ``x`` and ``y`` are d-separated by ``z`` in ``g``.

    Uses the reachable-trail search: a trail may pass a non-collider only if
    it is not conditioned on, and a collider only if it has a descendant in
    ``z``.
    """
    z = set(z)
    for v in (x, y, *z):
        g._check(v)
    if x == y:
        raise ParameterError("x and y must differ")
    if x in z or y in z:
        raise ParameterError("x and y must not be in the conditioning set")

    anc_z = g.ancestors(z)
    # direction "up": arrived from a child; "down": arrived from a parent
    visited = set()
    queue = deque([(x, "up")])
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node == y:
            return False
        if direction == "up":
            if node in z:
                continue
            queue.extend((p, "up") for p in g._parents[node])
            queue.extend((c, "down") for c in g._children[node])
        else:
            if node not in z:
                queue.extend((c, "down") for c in g._children[node])
            if node in anc_z:
                queue.extend((p, "up") for p in g._parents[node])
    return True


class _MixedState:
    """Mutable working copy of a PDAG used by orientation procedures."""

    def __init__(self, variables, directed, undirected):
        self.variables = tuple(variables)
        self.directed = set(directed)
        self.undirected = {frozenset(e) for e in undirected}
        self.adj = {v: set() for v in self.variables}
        for a, b in self.directed:
            self.adj[a].add(b)
            self.adj[b].add(a)
        for e in self.undirected:
            a, b = tuple(e)
            self.adj[a].add(b)
            self.adj[b].add(a)

    def undirected_nbrs(self, v):
        return {u for u in self.adj[v] if frozenset((u, v)) in self.undirected}

    def parents(self, v):
        return {u for u in self.adj[v] if (u, v) in self.directed}

    def children(self, v):
        return {u for u in self.adj[v] if (v, u) in self.directed}

    def orient(self, a, b):
        self.undirected.discard(frozenset((a, b)))
        self.directed.add((a, b))

    def remove_node(self, v):
        for u in self.adj.pop(v):
            self.adj[u].discard(v)
            self.undirected.discard(frozenset((u, v)))
            self.directed.discard((u, v))
            self.directed.discard((v, u))

    def to_pdag(self):
        return Pdag(self.variables, self.directed, self.undirected)


def _meek_pass(state: _MixedState) -> bool:
    """Apply the first applicable Meek rule; report whether anything changed."""
    for e in sorted(state.undirected, key=sorted):
        a, b = sorted(e)
        for x, y in ((a, b), (b, a)):
            # R1: w -> x - y, w and y nonadjacent  =>  x -> y
            for w in state.parents(x):
                if w != y and y not in state.adj[w]:
                    state.orient(x, y)
                    return True
            # R2: x -> w -> y with x - y  =>  x -> y
            if state.children(x) & state.parents(y):
                state.orient(x, y)
                return True
            # R3: x - c -> y, x - d -> y, c and d nonadjacent  =>  x -> y
            cands = sorted(state.undirected_nbrs(x) & state.parents(y))
            for c, d in itertools.combinations(cands, 2):
                if d not in state.adj[c]:
                    state.orient(x, y)
                    return True
            # R4: x - k -> l -> y, x adjacent l, k and y nonadjacent  =>  x -> y
            for k in state.undirected_nbrs(x):
                if k == y or y in state.adj[k]:
                    continue
                for l in state.children(k):
                    if l in state.adj[x] and (l, y) in state.directed:
                        state.orient(x, y)
                        return True
    return False


def meek_orient(p: Pdag) -> Pdag:
    """Close a PDAG under Meek's orientation rules R1-R4."""
    state = _MixedState(p.variables, p.directed_edges, p.undirected_edges)
    while _meek_pass(state):
        pass
    return state.to_pdag()


def cpdag_of(g: Dag) -> Pdag:
    """Completed PDAG of the Markov equivalence class of ``g``.

    Keeps the edges of unshielded colliders directed, leaves the rest of the
    skeleton undirected, then propagates compelled orientations.
    """
    compelled = set()
    for c in g.variables:
        pa = sorted(g.parents(c))
        for a, b in itertools.combinations(pa, 2):
            if not g.adjacent(a, b):
                compelled.add((a, c))
                compelled.add((b, c))
    undirected = [frozenset(e) for e in g.edges if e not in compelled]
    return meek_orient(Pdag(g.variables, compelled, undirected))


def consistent_extension(p: Pdag) -> Dag:
    """Orient every undirected edge without new cycles or v-structures.

    Repeatedly removes a sink whose undirected neighbours are adjacent to all
    of its other neighbours, directing its undirected edges inward. Among
    eligible sinks the lexicographically smallest is taken.
    """
    state = _MixedState(p.variables, p.directed_edges, p.undirected_edges)
    oriented = set(p.directed_edges)
    remaining = set(p.variables)
    while remaining:
        chosen = None
        for x in sorted(remaining):
            if state.children(x):
                continue
            nbrs = state.adj[x]
            if all(nbrs - {y} <= state.adj[y] | {y} for y in state.undirected_nbrs(x)):
                chosen = x
                break
        if chosen is None:
            raise ExtensionError("partially directed graph admits no consistent extension")
        for y in state.undirected_nbrs(chosen):
            oriented.add((y, chosen))
        state.remove_node(chosen)
        remaining.discard(chosen)
    return Dag(p.variables, oriented)


def extend_or_repair(p: Pdag) -> tuple[Dag, bool]:
    """Consistent extension, falling back to a minimal acyclic re-orientation.

    Returns ``(dag, repaired)``. The fallback keeps directed edges in
    lexicographic order while they stay acyclic, then orients the remaining
    edges along the resulting topological order. It may introduce new
    v-structures; callers record the ``repaired`` flag.
    """
    try:
        return consistent_extension(p), False
    except ExtensionError:
        pass
    kept: set = set()
    for a, b in sorted(p.directed_edges):
        if (b, a) in kept:
            continue
        try:
            Dag(p.variables, kept | {(a, b)})
        except GraphError:
            continue
        kept.add((a, b))
    order = {v: i for i, v in enumerate(Dag(p.variables, kept).topological_order())}
    for a, b in sorted(p.directed_edges):
        if (a, b) not in kept and (b, a) not in kept:
            kept.add((a, b) if order[a] < order[b] else (b, a))
    for e in p.undirected_edges:
        a, b = sorted(e)
        kept.add((a, b) if order[a] < order[b] else (b, a))
    return Dag(p.variables, kept), True


def graph_to_dict(g) -> dict:
    """JSON-ready document; ``undirected_edges`` is omitted for DAGs."""
    if isinstance(g, Dag):
        return {
            "variables": list(g.variables),
            "directed_edges": [list(e) for e in sorted(g.edges)],
        }
    return {
        "variables": list(g.variables),
        "directed_edges": [list(e) for e in sorted(g.directed_edges)],
        "undirected_edges": sorted(sorted(e) for e in g.undirected_edges),
    }


def graph_from_dict(doc: Mapping):
    variables = doc["variables"]
    directed = [tuple(e) for e in doc.get("directed_edges", [])]
    if "undirected_edges" in doc:
        return Pdag(variables, directed, doc["undirected_edges"])
    return Dag(variables, directed)


def dumps_graph(g) -> str:
    return json.dumps(graph_to_dict(g), indent=2) + "\n"


def loads_graph(text: str):
    return graph_from_dict(json.loads(text))
