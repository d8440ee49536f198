"""Node-level network measures.

Closeness here is the harmonic sum of reciprocal distances, not the
reciprocal of the distance sum.  Unreachable nodes contribute nothing to
closeness and are ignored by eccentricity.
"""
from __future__ import annotations

from collections import deque

from .graph import Graph, GraphError, Node


def degree_centrality(g: Graph, v: Node):
    """Edge count at ``v``; ``(in_degree, out_degree)`` for directed graphs."""
    if g.directed:
        return (len(g.predecessors(v)), len(g.neighbors(v)))
    return len(g.neighbors(v))


def _require_undirected(g: Graph, what: str) -> None:
    if g.directed:
        raise GraphError(f"{what} is defined for undirected graphs")


def clustering_coefficient(g: Graph, v: Node) -> float:
    _require_undirected(g, "clustering coefficient")
    nbrs = list(g.neighbors(v))
    k = len(nbrs)
    if k < 2:
        return 0.0
    links = sum(1 for i in range(k) for j in range(i + 1, k) if g.has_edge(nbrs[i], nbrs[j]))
    return 2.0 * links / (k * (k - 1))


def mean_clustering(g: Graph) -> float:
    if len(g) == 0:
        return 0.0
    return sum(clustering_coefficient(g, v) for v in g) / len(g)


def matching_index(g: Graph, u: Node, v: Node) -> float:
    """Share of common neighbors among all neighbors of ``u`` and ``v``.

    Both endpoints are removed from the neighbor sets, so adjacency between
    ``u`` and ``v`` does not count toward the overlap.
    """
    _require_undirected(g, "matching index")
    if u == v:
        raise ValueError("matching index needs two distinct nodes")
    nu = g.neighbors(u) - {u, v}
    nv = g.neighbors(v) - {u, v}
    union = nu | nv
    if not union:
        return 0.0
    return len(nu & nv) / len(union)


def eccentricity_centrality(g: Graph, v: Node) -> float:
    """``1 / max distance`` to any reachable node; 0 when nothing is reachable."""
    dist = g.bfs_distances(v)
    far = max(dist.values())
    return 0.0 if far == 0 else 1.0 / far


def closeness_centrality(g: Graph, v: Node) -> float:
    dist = g.bfs_distances(v)
    return float(sum(1.0 / d for u, d in dist.items() if u != v))


def betweenness_centrality(g: Graph) -> dict[Node, float]:
    """Shortest-path betweenness (Brandes accumulation, no normalization).

    Undirected graphs sum over unordered pairs; directed graphs over ordered
    pairs.
    """
    bc = {v: 0.0 for v in g}
    for s in g:
        stack = []
        preds: dict[Node, list[Node]] = {v: [] for v in g}
        sigma = dict.fromkeys(g, 0)
        sigma[s] = 1
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            stack.append(u)
            for w in g.neighbors(u):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
                if dist[w] == dist[u] + 1:
                    sigma[w] += sigma[u]
                    preds[w].append(u)
        delta = dict.fromkeys(g, 0.0)
        while stack:
            w = stack.pop()
            for u in preds[w]:
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    if not g.directed:
        for v in bc:
            bc[v] /= 2.0
    return bc
