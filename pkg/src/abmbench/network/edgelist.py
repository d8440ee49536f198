from __future__ import annotations

from .graph import Graph, GraphError


class EdgeListError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def read_edge_list(text: str, directed: bool = False) -> Graph:
    """Parse tab-separated ``source target [weight]`` lines.

    Blank lines and ``#`` comments are skipped.  For undirected graphs an
    edge listed in both directions collapses to one edge.
    """
    g = Graph(directed)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip("\r\n")
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) not in (2, 3) or not parts[0] or not parts[1]:
            raise EdgeListError(lineno, f"expected 2 or 3 tab-separated fields, got {raw!r}")
        weight = None
        if len(parts) == 3:
            try:
                weight = float(parts[2])
            except ValueError:
                raise EdgeListError(lineno, f"weight {parts[2]!r} is not a number") from None
        try:
            g.add_edge(parts[0], parts[1], weight)
        except GraphError as exc:
            raise EdgeListError(lineno, str(exc)) from None
    return g


def write_edge_list(g: Graph) -> str:
    lines = []
    for u, v in g.edges:
        w = g.weight(u, v)
        lines.append(f"{u}\t{v}" if w is None else f"{u}\t{v}\t{w!r}")
    return "".join(line + "\n" for line in lines)
