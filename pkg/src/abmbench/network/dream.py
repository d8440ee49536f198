"""Template network of an agent-based model and its centrality footprint.

A model is described by a :class:`ModelManifest` (globals, breeds, patch and
link attributes, classified procedures, experiments).  Expansion hangs each
item under its parent in the 18-node baseline tree; the footprint lists, per
node, eccentricity, betweenness and degree centrality as percentages of the
largest value each measure can take on a graph of that size.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .graph import Graph
from .measures import betweenness_centrality, eccentricity_centrality

BASELINE_EDGES = [
    ("ABM", "BS-Expts"),
    ("ABM", "Globals"),
    ("Globals", "InputGlobals"),
    ("Globals", "OutputGlobals"),
    ("Procedures", "Reporter-Argumented"),
    ("ABM", "Agents"),
    ("Agents", "Agent-Breeds"),
    ("Agents", "Agent-Attributes"),
    ("ABM", "Procedures"),
    ("Procedures", "Forever"),
    ("Procedures", "Reporter"),
    ("Procedures", "Argumented"),
    ("ABM", "Patches"),
    ("Patches", "Patch-Attributes"),
    ("ABM", "Links"),
    ("Links", "Link-Breeds"),
    ("Links", "Link-Attributes"),
]

PROCEDURE_PARENTS = {
    "plain": "Procedures",
    "forever": "Forever",
    "reporter": "Reporter",
    "argumented": "Argumented",
    "reporter-argumented": "Reporter-Argumented",
}


class ManifestError(ValueError):
    pass


@dataclass
class ModelManifest:
    input_globals: list[str] = field(default_factory=list)
    output_globals: list[str] = field(default_factory=list)
    agent_breeds: dict[str, list[str]] = field(default_factory=dict)
    agent_attributes: list[str] = field(default_factory=list)
    link_breeds: dict[str, list[str]] = field(default_factory=dict)
    link_attributes: list[str] = field(default_factory=list)
    patch_attributes: list[str] = field(default_factory=list)
    procedures: dict[str, str] = field(default_factory=dict)
    experiments: list[str] = field(default_factory=list)

    def validate(self) -> None:
        for name, kind in self.procedures.items():
            if kind not in PROCEDURE_PARENTS:
                raise ManifestError(f"procedure {name!r} has unknown class {kind!r}; "
                                    f"expected one of {sorted(PROCEDURE_PARENTS)}")

    def procedure_classes(self) -> dict[str, list[str]]:
        out = {k: [] for k in PROCEDURE_PARENTS}
        for name, kind in self.procedures.items():
            out[kind].append(name)
        return out


@dataclass
class Footprint:
    model_name: str
    rows: list[tuple[str, float, float, float]]

    def column(self, name: str) -> dict[str, float]:
        i = {"eccentricity": 1, "betweenness": 2, "degree": 3}[name]
        return {r[0]: r[i] for r in self.rows}

    def argmax(self, name: str) -> str:
        col = self.column(name)
        return max(col, key=col.get)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "eccentricity_pct", "betweenness_pct", "degree_pct"])
        for node, e, b, d in self.rows:
            w.writerow([node, f"{e:.2f}", f"{b:.2f}", f"{d:.2f}"])
        return buf.getvalue()


def dream_baseline() -> Graph:
    return Graph.from_edges(BASELINE_EDGES)


def _attach(g: Graph, parent: str, name: str) -> str:
    node = name if name not in g else f"{name} ({parent})"
    g.add_edge(parent, node)
    return node


def _attach_with_attributes(g: Graph, parent: str, name: str, attributes: list[str]) -> None:
    node = _attach(g, parent, name)
    if attributes:
        holder = _attach(g, node, f"{node}-Attributes")
        for a in attributes:
            _attach(g, holder, a)


OPTIONAL_SECTIONS = {
    "Patches": ("Patches", "Patch-Attributes"),
    "Links": ("Links", "Link-Breeds", "Link-Attributes"),
}


def dream_expand(manifest: ModelManifest, prune_unused: bool = False) -> Graph:
    """Baseline tree with every manifest item attached under its template parent.

    With ``prune_unused`` the Patches and Links branches are left out when
    the manifest declares nothing under them.
    """
    manifest.validate()
    drop: set[str] = set()
    if prune_unused:
        if not manifest.patch_attributes:
            drop.update(OPTIONAL_SECTIONS["Patches"])
        if not (manifest.link_breeds or manifest.link_attributes):
            drop.update(OPTIONAL_SECTIONS["Links"])
    g = Graph.from_edges((u, v) for u, v in BASELINE_EDGES if v not in drop)
    for name in manifest.input_globals:
        _attach(g, "InputGlobals", name)
    for name in manifest.output_globals:
        _attach(g, "OutputGlobals", name)
    for breed, attrs in manifest.agent_breeds.items():
        _attach_with_attributes(g, "Agent-Breeds", breed, attrs)
    for name in manifest.agent_attributes:
        _attach(g, "Agent-Attributes", name)
    for breed, attrs in manifest.link_breeds.items():
        _attach_with_attributes(g, "Link-Breeds", breed, attrs)
    for name in manifest.link_attributes:
        _attach(g, "Link-Attributes", name)
    for name in manifest.patch_attributes:
        _attach(g, "Patch-Attributes", name)
    for name, kind in manifest.procedures.items():
        _attach(g, PROCEDURE_PARENTS[kind], name)
    for name in manifest.experiments:
        _attach(g, "BS-Expts", name)
    return g


def dream_footprint(manifest: ModelManifest, model_name: str = "model",
                    prune_unused: bool = True) -> Footprint:
    g = dream_expand(manifest, prune_unused)
    n = len(g)
    bc = betweenness_centrality(g)
    max_degree = n - 1
    max_betweenness = (n - 1) * (n - 2) / 2
    rows = []
    for v in g:
        ecc = 100.0 * eccentricity_centrality(g, v)  # largest possible value is 1
        btw = 100.0 * bc[v] / max_betweenness if max_betweenness else 0.0
        deg = 100.0 * len(g.neighbors(v)) / max_degree if max_degree else 0.0
        rows.append((str(v), ecc, btw, deg))
    return Footprint(model_name, rows)
