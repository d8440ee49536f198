from __future__ import annotations

from collections import deque
from typing import Any, Hashable, Iterable, Iterator, Mapping

Node = Hashable


class GraphError(ValueError):
    pass


class Graph:
    """Simple attributed graph: no self-loops, no parallel edges.

    Edges keep insertion order so that edge-list files round-trip.  Treat
    instances as immutable once built; measures never mutate them.
    """

    def __init__(self, directed: bool = False):
        self.directed = directed
        self._nodes: dict[Node, dict[str, Any]] = {}
        self._succ: dict[Node, dict[Node, float | None]] = {}
        self._pred: dict[Node, dict[Node, float | None]] = {}
        self._edges: list[tuple[Node, Node]] = []

    # -- construction ---------------------------------------------------
    def add_node(self, v: Node, **attrs) -> None:
        if v not in self._nodes:
            self._nodes[v] = {}
            self._succ[v] = {}
            self._pred[v] = {}
        self._nodes[v].update(attrs)

    def add_edge(self, u: Node, v: Node, weight: float | None = None) -> bool:
        """Add ``u -> v``; returns False if the edge already existed."""
        if u == v:
            raise GraphError(f"self-loop on {u!r} not allowed")
        self.add_node(u)
        self.add_node(v)
        if v in self._succ[u]:
            return False
        self._succ[u][v] = weight
        if self.directed:
            self._pred[v][u] = weight
        else:
            self._succ[v][u] = weight
        self._edges.append((u, v))
        return True

    @classmethod
    def from_edges(cls, edges: Iterable, directed: bool = False) -> "Graph":
        g = cls(directed)
        for e in edges:
            g.add_edge(*e)
        return g

    # -- queries --------------------------------------------------------
    def __contains__(self, v: Node) -> bool:
        return v in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self) -> Iterator[Node]:
        return iter(self._nodes)

    @property
    def nodes(self) -> list[Node]:
        return list(self._nodes)

    @property
    def edges(self) -> list[tuple[Node, Node]]:
        return list(self._edges)

    def number_of_edges(self) -> int:
        return len(self._edges)

    def attrs(self, v: Node) -> Mapping[str, Any]:
        self._check(v)
        return self._nodes[v]

    def weight(self, u: Node, v: Node) -> float | None:
        return self._succ[u][v]

    def has_edge(self, u: Node, v: Node) -> bool:
        return u in self._succ and v in self._succ[u]

    def neighbors(self, v: Node) -> set[Node]:
        """Out-neighbors for directed graphs, all neighbors otherwise."""
        self._check(v)
        return set(self._succ[v])

    def predecessors(self, v: Node) -> set[Node]:
        self._check(v)
        return set(self._pred[v]) if self.directed else set(self._succ[v])

    def undirected_neighbors(self, v: Node) -> set[Node]:
        return self.neighbors(v) | self.predecessors(v)

    def to_undirected(self) -> "Graph":
        if not self.directed:
            return self
        g = Graph(False)
        for v, a in self._nodes.items():
            g.add_node(v, **a)
        for u, v in self._edges:
            g.add_edge(u, v, self._succ[u][v])
        return g

    def bfs_distances(self, source: Node) -> dict[Node, int]:
        """Unweighted hop distances from ``source`` following edge direction."""
        self._check(source)
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in self._succ[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def is_connected(self) -> bool:
        if not self._nodes:
            return True
        g = self.to_undirected()
        return len(g.bfs_distances(next(iter(self._nodes)))) == len(self._nodes)

    def _check(self, v: Node) -> None:
        if v not in self._nodes:
            raise KeyError(f"unknown node {v!r}")

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"<Graph {kind} |V|={len(self)} |E|={len(self._edges)}>"
