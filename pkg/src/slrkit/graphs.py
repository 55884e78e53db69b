"""Concrete hypergraphs with ordered attachments and numbered sources.

A c-graph of type n has labeled edges, each attached to an ordered, nonempty
sequence of vertices, plus an injective mapping from source positions 1..n to
vertices.  All values are immutable after construction; every operation below
is a pure function returning fresh graphs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    ArityMismatch,
    GraphError,
    NotComposable,
    NotDisjoint,
    TypeMismatch,
)

#: Reserved binary label recording disequalities.  It may appear in graphs and
#: grammar rule graphs but is rejected in user-declared definition alphabets.
DISEQ_LABEL = "d__"


@dataclass(frozen=True, order=True)
class Label:
    """An edge label with a fixed arity (>= 1)."""

    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 1:
            raise GraphError(f"label {self.name!r} must have arity >= 1")


def diseq_label() -> Label:
    return Label(DISEQ_LABEL, 2)


def with_disequality(alphabet: Iterable[Label]) -> dict[str, Label]:
    """Alphabet extended with the reserved disequality label."""
    out = {lab.name: lab for lab in alphabet}
    out[DISEQ_LABEL] = diseq_label()
    return out


@dataclass(frozen=True, order=True)
class Edge:
    id: str
    label: Label
    attach: tuple[str, ...]

    def __post_init__(self):
        if len(self.attach) != self.label.arity:
            raise ArityMismatch(
                f"edge {self.id!r}: {len(self.attach)} attachments for "
                f"label {self.label.name}/{self.label.arity}"
            )


@dataclass(frozen=True)
class CGraph:
    """A concrete hypergraph of type ``type_n`` with ``type_n`` sources."""

    type_n: int
    vertices: frozenset[str]
    edges: tuple[Edge, ...]
    sources: tuple[str, ...] = ()

    def __post_init__(self):
        if self.type_n != len(self.sources):
            raise TypeMismatch(
                f"type {self.type_n} but {len(self.sources)} sources"
            )
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate edge ids")
        if self.vertices & set(ids):
            raise GraphError("vertex ids and edge ids must be disjoint")
        for e in self.edges:
            for v in e.attach:
                if v not in self.vertices:
                    raise GraphError(f"edge {e.id!r} attached to unknown vertex {v!r}")
        for s in self.sources:
            if s not in self.vertices:
                raise GraphError(f"source {s!r} is not a vertex")
        if len(set(self.sources)) != len(self.sources):
            raise GraphError("sources mapping must be injective")
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))

    # -- construction helpers ------------------------------------------

    @staticmethod
    def build(
        vertices: Iterable[str],
        edges: Iterable[tuple[str, Label, Sequence[str]]],
        sources: Sequence[str] = (),
    ) -> "CGraph":
        es = tuple(Edge(eid, lab, tuple(att)) for eid, lab, att in edges)
        return CGraph(len(tuple(sources)), frozenset(vertices), es, tuple(sources))

    @staticmethod
    def empty() -> "CGraph":
        return CGraph(0, frozenset(), ())

    # -- basic accessors -------------------------------------------------

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise GraphError(f"no edge {eid!r}")

    def labels(self) -> dict[str, Label]:
        return {e.label.name: e.label for e in self.edges}

    def internal_vertices(self) -> frozenset[str]:
        return self.vertices - set(self.sources)

    def is_tree_shaped(self) -> bool:
        """True for a nonempty connected graph of binary edges with |E| = |V|-1."""
        if not self.vertices:
            return False
        if any(e.label.arity != 2 for e in self.edges):
            return False
        if len(self.edges) != len(self.vertices) - 1:
            return False
        seen = {min(self.vertices)}
        frontier = [min(self.vertices)]
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            a, b = e.attach
            adj[a].append(b)
            adj[b].append(a)
        while frontier:
            v = frontier.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return seen == self.vertices

    def rename(self, prefix: str) -> "CGraph":
        """Copy with every vertex and edge id prefixed (keeps structure)."""
        vmap = {v: prefix + v for v in self.vertices}
        return CGraph(
            self.type_n,
            frozenset(vmap.values()),
            tuple(
                Edge(prefix + e.id, e.label, tuple(vmap[v] for v in e.attach))
                for e in self.edges
            ),
            tuple(vmap[s] for s in self.sources),
        )

    def __repr__(self):
        es = ", ".join(
            f"{e.label.name}({','.join(e.attach)})" for e in self.edges
        )
        return (
            f"CGraph(type={self.type_n}, V={sorted(self.vertices)}, "
            f"E=[{es}], src={list(self.sources)})"
        )


# -- predicates and algebra ---------------------------------------------


def is_simple(g: CGraph) -> bool:
    """No two distinct edges share both label and attachment sequence."""
    seen = set()
    for e in g.edges:
        key = (e.label, e.attach)
        if key in seen:
            return False
        seen.add(key)
    return True


def disjoint(g1: CGraph, g2: CGraph) -> bool:
    ids1 = g1.vertices | {e.id for e in g1.edges}
    ids2 = g2.vertices | {e.id for e in g2.edges}
    return not (ids1 & ids2)


def compose(g1: CGraph, g2: CGraph) -> CGraph:
    """Union of two type-0 c-graphs sharing no edges and no duplicate atoms."""
    if g1.type_n != 0 or g2.type_n != 0:
        raise TypeMismatch("composition is defined for type-0 graphs only")
    ids1 = {e.id for e in g1.edges}
    ids2 = {e.id for e in g2.edges}
    if ids1 & ids2:
        raise NotComposable(f"shared edge ids {sorted(ids1 & ids2)}")
    if (g1.vertices & ids2) or (g2.vertices & ids1):
        raise NotComposable("vertex ids collide with edge ids of the other graph")
    atoms1 = {(e.label, e.attach) for e in g1.edges}
    for e in g2.edges:
        if (e.label, e.attach) in atoms1:
            raise NotComposable(
                f"edges with label {e.label.name} share attachment {e.attach}"
            )
    return CGraph(0, g1.vertices | g2.vertices, g1.edges + g2.edges, ())


def parallel(g1: CGraph, g2: CGraph, n: int) -> CGraph:
    """Disjoint union joining the i-th sources pairwise, for i in 1..n."""
    if g1.type_n != n or g2.type_n != n:
        raise TypeMismatch(f"both operands must have type {n}")
    if not disjoint(g1, g2):
        raise NotDisjoint("parallel composition needs disjoint operands")
    vmap = dict(zip(g2.sources, g1.sources))
    vertices = g1.vertices | {vmap.get(v, v) for v in g2.vertices}
    edges2 = tuple(
        Edge(e.id, e.label, tuple(vmap.get(v, v) for v in e.attach))
        for e in g2.edges
    )
    return CGraph(n, vertices, g1.edges + edges2, g1.sources)


def substitute(g: CGraph, eid: str, h: CGraph) -> CGraph:
    """Replace edge ``eid`` by ``h``, joining attachments with sources of h."""
    e = g.edge(eid)
    if h.type_n != e.label.arity:
        raise ArityMismatch(
            f"substituting type-{h.type_n} graph for edge of arity {e.label.arity}"
        )
    if not disjoint(g, h):
        raise NotDisjoint("substitution needs disjoint graphs")
    vmap = dict(zip(h.sources, e.attach))
    vertices = g.vertices | {vmap.get(v, v) for v in h.vertices}
    new_edges = tuple(x for x in g.edges if x.id != eid) + tuple(
        Edge(f.id, f.label, tuple(vmap.get(v, v) for v in f.attach))
        for f in h.edges
    )
    return CGraph(g.type_n, vertices, new_edges, g.sources)


def substitute_many(g: CGraph, repl: Mapping[str, CGraph]) -> CGraph:
    """Simultaneous substitution on pairwise distinct edges (order-free)."""
    out = g
    for eid in sorted(repl):
        out = substitute(out, eid, repl[eid])
    return out


def project(g: CGraph, alphabet: Iterable[Label] | Iterable[str]) -> CGraph:
    """Drop edges whose label is outside ``alphabet``; keep all vertices."""
    names = {a.name if isinstance(a, Label) else a for a in alphabet}
    return CGraph(
        g.type_n,
        g.vertices,
        tuple(e for e in g.edges if e.label.name in names),
        g.sources,
    )


# -- interchange format ----------------------------------------------------


def to_json(g: CGraph) -> str:
    doc = {
        "type": g.type_n,
        "vertices": sorted(g.vertices),
        "edges": [
            {"id": e.id, "label": e.label.name, "attach": list(e.attach)}
            for e in g.edges
        ],
        "sources": list(g.sources),
    }
    return json.dumps(doc, indent=2, sort_keys=False)


def from_json(text: str, alphabet: Optional[Mapping[str, Label]] = None) -> CGraph:
    """Parse the interchange format; label arities come from attach lengths."""
    doc = json.loads(text)
    labels: dict[str, Label] = dict(alphabet or {})
    edges = []
    for rec in doc.get("edges", []):
        name, attach = rec["label"], tuple(rec["attach"])
        if name in labels:
            if labels[name].arity != len(attach):
                raise ArityMismatch(
                    f"label {name} used with arities {labels[name].arity} "
                    f"and {len(attach)}"
                )
        else:
            labels[name] = Label(name, len(attach))
        edges.append(Edge(rec["id"], labels[name], attach))
    return CGraph(
        doc.get("type", len(doc.get("sources", []))),
        frozenset(doc.get("vertices", [])),
        tuple(edges),
        tuple(doc.get("sources", [])),
    )


def to_dot(g: CGraph) -> str:
    """Render for inspection; edges of arity > 2 become box nodes."""
    lines = ["digraph G {"]
    src_pos = {v: i + 1 for i, v in enumerate(g.sources)}
    for v in sorted(g.vertices):
        extra = f' xlabel="{src_pos[v]}"' if v in src_pos else ""
        lines.append(f'  "{v}" [shape=circle{extra}];')
    for e in g.edges:
        if e.label.arity == 2:
            a, b = e.attach
            lines.append(f'  "{a}" -> "{b}" [label="{e.label.name}"];')
        else:
            lines.append(f'  "{e.id}" [shape=box, label="{e.label.name}"];')
            for i, v in enumerate(e.attach, start=1):
                lines.append(f'  "{e.id}" -> "{v}" [label="{i}", dir=none];')
    lines.append("}")
    return "\n".join(lines)
