from __future__ import annotations

import numpy as np

from .graph import Graph


def generate_qudg(positions, rho: float, p_link: float, rng: np.random.Generator) -> Graph:
    """Quasi unit disk graph over ``positions`` (unit = maximum radio range).

    Pairs closer than ``rho`` are always linked, pairs in ``(rho, 1]`` are
    linked independently with probability ``p_link``, farther pairs never.
    One uniform draw is consumed per pair in the uncertain band, in
    ``(i, j)`` lexicographic order.
    """
    if not (0.0 < rho <= 1.0):
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    if not (0.0 <= p_link <= 1.0):
        raise ValueError(f"p_link must lie in [0, 1], got {p_link}")
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    g = Graph()
    for i, p in enumerate(pts):
        g.add_node(i, pos=(float(p[0]), float(p[1])))
    n = len(pts)
    if n < 2:
        return g
    ii, jj = np.triu_indices(n, k=1)
    d = np.hypot(*(pts[jj] - pts[ii]).T)
    sure = d <= rho
    band = (d > rho) & (d <= 1.0)
    keep = sure.copy()
    if band.any():
        keep[band] = rng.random(int(band.sum())) < p_link
    for i, j in zip(ii[keep], jj[keep]):
        g.add_edge(int(i), int(j))
    return g


def unit_disk_graph(positions) -> Graph:
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    g = Graph()
    for i, p in enumerate(pts):
        g.add_node(i, pos=(float(p[0]), float(p[1])))
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.hypot(*(pts[j] - pts[i])) <= 1.0:
                g.add_edge(i, j)
    return g
