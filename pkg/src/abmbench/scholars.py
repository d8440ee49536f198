"""Researchers, papers, citation accrual, Hirsch index and temporal citation networks.

A temporal citation network (TCN) keeps researchers and one node per
(author, paper) incidence, links each paper instance to its author only,
and places every researcher at a height proportional to their h-index.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .engine import ConfigurationError, World, create_world
from .experiment import Model
from .network import Graph, write_edge_list


class HistoryError(ValueError):
    pass


def h_index(citations: Iterable[int]) -> int:
    """Largest h such that h of the counts are at least h."""
    counts = sorted((int(c) for c in citations), reverse=True)
    if counts and counts[-1] < 0:
        raise ValueError("citation counts must be non-negative")
    # in descending order the qualifying ranks form a prefix
    return sum(1 for i, c in enumerate(counts, start=1) if c >= i)


# -- population model ----------------------------------------------------

def researchers(world: World) -> list:
    return sorted(world.breed("researcher"), key=lambda a: a.id)


def papers(world: World) -> list:
    return sorted(world.breed("paper"), key=lambda a: a.id)


def researcher_h(world: World, res) -> int:
    return h_index(world.agents[p].attributes["num_cites"] for p in res.attributes["my_papers"])


def setup_population(n_res: int, max_init_papers: int, seed: int,
                     width: int = 100, height: int = 100) -> World:
    """``n_res`` researchers with 0..max_init_papers solo papers each."""
    if n_res < 1:
        raise ConfigurationError("n_res must be at least 1")
    if max_init_papers < 0:
        raise ConfigurationError("max_init_papers must be non-negative")
    world = create_world(width, height, seed, wrap=False)
    rng = world.rng
    for _ in range(n_res):
        res = world.spawn("researcher", (0.0, 0.0), my_papers=[], num_papers=0, h=0)
        for _ in range(int(rng.integers(0, max_init_papers + 1))):
            paper = world.spawn("paper", (0.0, 0.0), tend_to_be_cited=float(rng.random()),
                                num_cites=0, my_res=res.id, authors=(res.id,), year=0)
            res.attributes["my_papers"].append(paper.id)
        res.attributes["num_papers"] = len(res.attributes["my_papers"])
    place_researchers(world)
    return world


def place_researchers(world: World) -> None:
    """Height proportional to h (top of the view for the largest h), x by id order."""
    res = researchers(world)
    if not res:
        return
    max_h = max(r.attributes["h"] for r in res)
    top = world.height - 1e-9
    for rank, r in enumerate(res):
        x = (rank + 0.5) * world.width / len(res)
        y = 0.0 if max_h == 0 else r.attributes["h"] * top / max_h
        r.position = (x, y)


def step_citations(world: World, rate: float) -> None:
    """Each paper gains a citation with probability ``rate * tend_to_be_cited``."""
    if not 0.0 <= rate <= 1.0:
        raise ConfigurationError("citation rate must lie in [0, 1]")
    ps = papers(world)
    if not ps:
        return
    tend = np.array([p.attributes["tend_to_be_cited"] for p in ps])
    cited = world.rng.random(len(ps)) < rate * tend
    touched = set()
    for p, hit in zip(ps, cited):
        if hit:
            p.attributes["num_cites"] += 1
            touched.update(p.attributes["authors"])
    for rid in touched:
        res = world.agents[rid]
        res.attributes["h"] = researcher_h(world, res)
    if touched:
        place_researchers(world)


@dataclass
class ScholarParams:
    n_res: int = 60
    max_init_papers: int = 10
    rate: float = 0.1
    width: int = 100
    height: int = 100


class ScholarsModel(Model):
    def __init__(self, params: ScholarParams, seed: int):
        self.params = params
        self.world = setup_population(params.n_res, params.max_init_papers, seed,
                                      params.width, params.height)
        self.behaviors = [lambda w: step_citations(w, params.rate)]
        self.reporters = {
            "mean_h": lambda: float(np.mean([r.attributes["h"] for r in researchers(self.world)])),
            "max_h": lambda: max(r.attributes["h"] for r in researchers(self.world)),
            "total_citations": lambda: sum(p.attributes["num_cites"] for p in papers(self.world)),
        }


# -- citation histories --------------------------------------------------

History = list[tuple[int, list[int]]]


def load_history(records: Sequence[tuple[int, Sequence[int]]]) -> list[tuple[int, int]]:
    """Per-year h from cumulative per-year citation snapshots."""
    out = []
    prev = None
    for year, counts in records:
        year = int(year)
        if prev is not None and year <= prev:
            raise HistoryError(f"years must increase strictly: {year} follows {prev}")
        prev = year
        out.append((year, h_index(counts)))
    return out


def read_history_csv(text: str) -> History:
    """Parse ``year,paper_id,cumulative_citations`` rows into per-year snapshots."""
    rows = [r for r in csv.reader(line for line in io.StringIO(text) if not line.startswith("#"))
            if r and any(cell.strip() for cell in r)]
    if rows and rows[0][0].strip().lower() == "year":
        rows = rows[1:]
    history: History = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != 3:
            raise HistoryError(f"row {lineno}: expected year,paper_id,cumulative_citations")
        try:
            year, count = int(row[0]), int(row[2])
        except ValueError:
            raise HistoryError(f"row {lineno}: year and citations must be integers") from None
        if count < 0:
            raise HistoryError(f"row {lineno}: negative citation count")
        if history and year < history[-1][0]:
            raise HistoryError(f"row {lineno}: year {year} follows {history[-1][0]}")
        if not history or history[-1][0] != year:
            history.append((year, []))
        history[-1][1].append(count)
    return history


def read_citation_table(text: str) -> tuple[History, list]:
    """Parse a yearly table with a bracketed citation list per row.

    Columns are located by header name: ``year``, ``citations`` (e.g.
    ``[20 6 3]`` or a bare count) and optionally an expected ``h-index``.
    Returns the history and the expected h per year (None when absent).
    """
    rows = [r for r in csv.reader(line for line in io.StringIO(text) if not line.startswith("#"))
            if r and any(cell.strip() for cell in r)]
    if not rows:
        return [], []
    header = [c.strip().lower() for c in rows[0]]

    def find(*names):
        for i, h in enumerate(header):
            if any(n in h for n in names):
                return i
        return None

    iy, ic, ih = find("year"), find("citation"), find("h-index", "h_index", "expected")
    if iy is None or ic is None:
        raise HistoryError("table needs 'year' and 'citations' columns")
    history: History = []
    expected = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            year = int(row[iy])
            cell = row[ic].strip().strip("[]").replace(",", " ")
            counts = [int(x) for x in cell.split()]
            exp = int(row[ih]) if ih is not None and row[ih].strip() else None
        except (ValueError, IndexError):
            raise HistoryError(f"row {lineno}: malformed year, citation list or h value") from None
        if any(c < 0 for c in counts):
            raise HistoryError(f"row {lineno}: negative citation count")
        history.append((year, counts))
        expected.append(exp)
    return history, expected


def timeline_csv(history: History, expected: Sequence | None = None, header: str | None = None) -> str:
    """``year,papers,h`` per snapshot, plus ``expected_h,match`` when given."""
    hs = load_history(history)
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    with_exp = expected is not None and any(e is not None for e in expected)
    w.writerow(["year", "papers", "h"] + (["expected_h", "match"] if with_exp else []))
    for k, ((year, h), (_, counts)) in enumerate(zip(hs, history)):
        row = [year, len(counts), h]
        if with_exp:
            e = expected[k]
            row += ["" if e is None else e, "" if e is None else str(e == h).lower()]
        w.writerow(row)
    return buf.getvalue()


def write_history_csv(history: History) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["year", "paper_id", "cumulative_citations"])
    for year, counts in history:
        for i, c in enumerate(counts, start=1):
            w.writerow([year, f"p{i}", c])
    return buf.getvalue()


# -- temporal citation networks -----------------------------------------

@dataclass
class Tcn:
    graph: Graph
    positions: dict = field(default_factory=dict)
    kinds: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def researcher_nodes(self) -> list:
        return [n for n, k in self.kinds.items() if k == "researcher"]

    def paper_nodes(self) -> list:
        return [n for n, k in self.kinds.items() if k == "paper"]

    def nodes_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "kind", "value", "x", "y"])
        for n in self.graph:
            x, y = self.positions[n]
            w.writerow([n, self.kinds[n], self.values[n], repr(float(x)), repr(float(y))])
        return buf.getvalue()

    def edges_text(self) -> str:
        return write_edge_list(self.graph)


def tcn_from_authorship(authorship: dict, citations: dict, view_height: float = 100.0,
                        view_width: float = 100.0) -> Tcn:
    """TCN from ``paper -> authors`` and ``paper -> citation count`` maps."""
    author_papers: dict = {}
    for paper, authors in authorship.items():
        for a in authors:
            author_papers.setdefault(a, []).append(paper)
    hs = {a: h_index(citations.get(p, 0) for p in ps) for a, ps in author_papers.items()}
    max_h = max(hs.values(), default=0)
    g = Graph()
    tcn = Tcn(g)
    ordered = sorted(author_papers, key=str)
    for rank, a in enumerate(ordered):
        node = f"R:{a}"
        x = (rank + 0.5) * view_width / len(ordered)
        y = 0.0 if max_h == 0 else hs[a] * view_height / max_h
        g.add_node(node)
        tcn.positions[node] = (x, y)
        tcn.kinds[node] = "researcher"
        tcn.values[node] = hs[a]
        for j, p in enumerate(author_papers[a]):
            inst = f"P:{p}@{a}"
            g.add_edge(node, inst)
            tcn.positions[inst] = (x, y - (j + 1) * view_height * 0.01)
            tcn.kinds[inst] = "paper"
            tcn.values[inst] = int(citations.get(p, 0))
    return tcn


def build_tcn(source, view_height: float = 100.0, view_width: float = 100.0,
              author: str = "author") -> Tcn:
    """TCN of a population world, or of the last snapshot of a single-author history."""
    if isinstance(source, World):
        authorship = {p.id: p.attributes["authors"] for p in papers(source)}
        cites = {p.id: p.attributes["num_cites"] for p in papers(source)}
        return tcn_from_authorship(authorship, cites, view_height, view_width)
    history = list(source)
    if not history:
        return Tcn(Graph())
    counts = history[-1][1]
    authorship = {f"p{i}": (author,) for i in range(1, len(counts) + 1)}
    cites = {f"p{i}": c for i, c in enumerate(counts, start=1)}
    return tcn_from_authorship(authorship, cites, view_height, view_width)


def citation_network_size(authorship: dict, citations: dict) -> tuple[int, int]:
    """Nodes and edges of the author-paper network with citing-paper links kept.

    Every citation contributes one citing-paper node and one paper-paper edge.
    """
    authors = {a for aa in authorship.values() for a in aa}
    n_cites = sum(int(citations.get(p, 0)) for p in authorship)
    nodes = len(authors) + len(authorship) + n_cites
    edges = sum(len(aa) for aa in authorship.values()) + n_cites
    return nodes, edges


def tcn_invariants():
    """Per-researcher checks: stored h is the recomputed h, height tracks h."""
    from .vomas import Invariant

    def contexts(world):
        return [r.id for r in researchers(world)]

    def h_consistent(world, rid):
        res = world.agents[rid]
        return res.attributes["h"] == researcher_h(world, res) <= res.attributes["num_papers"]

    def height_monotone(world, rid):
        me = world.agents[rid]
        for other in researchers(world):
            dh = other.attributes["h"] - me.attributes["h"]
            dy = other.position[1] - me.position[1]
            if (dh > 0 and dy <= 0) or (dh == 0 and dy != 0):
                return False
        return True

    return [
        Invariant("h-matches-citations", h_consistent, contexts=contexts),
        Invariant("height-tracks-h", height_monotone, contexts=contexts, sample=10),
    ]
