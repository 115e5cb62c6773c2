"""Social network graphs: construction, validation, metrics and edge-list I/O.

Nodes are the integers ``0..n-1``. Graphs are immutable values.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import GenerationError, GraphValidationError, ParameterError

FAMILIES = ("clique", "path", "cycle", "star", "balanced_binary_tree", "regular_random")
FAMILY_ALIASES = {"btree": "balanced_binary_tree", "complete": "clique"}

MAX_REGULAR_ATTEMPTS = 10_000


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        adj: list[set[int]] = [set() for _ in range(max(self.n, 0))]
        for u, v in self.edges:
            if 0 <= u < self.n and 0 <= v < self.n:
                adj[u].add(v)
                adj[v].add(u)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph, normalizing each edge to ``(min, max)`` and sorting.

        Duplicates and self-loops are kept so that :func:`validate` can report them.
        """
        norm = sorted((min(u, v), max(u, v)) for u, v in edges)
        return cls(n, tuple(norm))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


@dataclass(frozen=True)
class GraphMetrics:
    diameter: int
    min_degree: int
    degree_sequence: tuple[int, ...]


def _bfs_distances(g: Graph, source: int) -> list[int]:
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return min(_bfs_distances(g, 0)) >= 0


def validate(g: Graph) -> list[str]:
    """Return the list of violated graph invariants; empty means the graph is valid."""
    violations = []
    if g.n < 1:
        return [f"node count must be positive, got {g.n}"]
    seen = set()
    for u, v in g.edges:
        if not (0 <= u < g.n and 0 <= v < g.n):
            violations.append(f"edge ({u},{v}) references a node outside 0..{g.n - 1}")
            continue
        if u == v:
            violations.append(f"self-loop at node {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            violations.append(f"duplicate edge {key}")
        seen.add(key)
    for u, nbrs in enumerate(g.adjacency):
        for w in nbrs:
            if u not in g.adjacency[w]:
                violations.append(f"asymmetric adjacency between {u} and {w}")
    if not violations and not is_connected(g):
        reach = sum(1 for x in _bfs_distances(g, 0) if x >= 0)
        violations.append(f"disconnected: only {reach} of {g.n} nodes reachable from node 0")
    return violations


def check_valid(g: Graph) -> Graph:
    violations = validate(g)
    if violations:
        raise GraphValidationError(violations)
    return g


def metrics(g: Graph) -> GraphMetrics:
    """Diameter by BFS from every node, plus the degree sequence."""
    diameter = 0
    for s in range(g.n):
        diameter = max(diameter, max(_bfs_distances(g, s)))
    degrees = tuple(len(a) for a in g.adjacency)
    return GraphMetrics(diameter=diameter, min_degree=min(degrees) if degrees else 0,
                        degree_sequence=degrees)


def _regular_random(n: int, degree: int, seed: int) -> Graph:
    # Pairing model: shuffle n*degree stubs, pair consecutive ones, reject the
    # whole attempt on a self-loop, a repeated pair or a disconnected result.
    rng = np.random.Generator(np.random.Philox(seed))
    stubs = np.repeat(np.arange(n), degree)
    for _ in range(MAX_REGULAR_ATTEMPTS):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        edges = set()
        for a, b in pairs.tolist():
            if a == b:
                break
            key = (a, b) if a < b else (b, a)
            if key in edges:
                break
            edges.add(key)
        else:
            g = Graph.from_edges(n, edges)
            if is_connected(g):
                return g
    raise GenerationError(
        f"no simple connected {degree}-regular graph on {n} nodes after "
        f"{MAX_REGULAR_ATTEMPTS} attempts")


def canonical_family(kind: str) -> str:
    kind = FAMILY_ALIASES.get(kind, kind)
    if kind not in FAMILIES:
        raise ParameterError(f"unknown graph family {kind!r}; expected one of {FAMILIES}")
    return kind


def make_family(kind: str, n: int, degree: int | None = None, seed: int = 0) -> Graph:
    """Build a member of a named graph family.

    ``cycle`` with ``n < 3`` degenerates to the path on ``n`` nodes. The
    balanced binary tree fills levels left to right (node ``i`` has parent
    ``(i - 1) // 2``). ``regular_random`` needs ``degree`` and uses ``seed``;
    the other families ignore both.
    """
    kind = canonical_family(kind)
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if kind == "clique":
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif kind == "path" or (kind == "cycle" and n < 3):
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "star":
        edges = [(0, i) for i in range(1, n)]
    elif kind == "balanced_binary_tree":
        edges = [((i - 1) // 2, i) for i in range(1, n)]
    else:
        if degree is None:
            raise ParameterError("regular_random requires a degree")
        if degree < 2 or degree >= n:
            raise ParameterError(f"regular_random needs 2 <= degree < n, got degree={degree}, n={n}")
        if (n * degree) % 2:
            raise ParameterError(f"n * degree must be even, got n={n}, degree={degree}")
        return _regular_random(n, int(degree), seed)
    return Graph.from_edges(n, edges)


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {len(g.edges)}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Parse the ``n m`` / ``u v`` edge-list format and validate the result."""
    tokens = [line.split() for line in text.splitlines() if line.strip()]
    if not tokens or len(tokens[0]) != 2:
        raise GraphValidationError(["header must be 'n m'"])
    try:
        n, m = int(tokens[0][0]), int(tokens[0][1])
        edges = []
        for row in tokens[1:]:
            if len(row) != 2:
                raise ValueError(row)
            edges.append((int(row[0]), int(row[1])))
    except ValueError as exc:
        raise GraphValidationError([f"malformed edge list: {exc}"]) from None
    if len(edges) != m:
        raise GraphValidationError([f"header declares {m} edges, found {len(edges)}"])
    return check_valid(Graph.from_edges(n, edges))


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g), newline="\n")


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())
