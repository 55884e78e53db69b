"""Isomorphism tests and canonical forms for small c-graphs.

Canonicalization uses iterative color refinement plus individualization
backtracking, taking the minimum encoding over the leaves of the search
tree.  Inputs are desk-scale, so no attempt is made at asymptotic cleverness;
fully symmetric isolated vertices are factored out to avoid the one factorial
blow-up that actually occurs in practice (fusion of sparse graphs).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import CGraph

Encoding = tuple


@dataclass(frozen=True)
class Isomorphism:
    """Witness bijections between two c-graphs."""

    vertex_map: dict[str, str]
    edge_map: dict[str, str]


def _incidences(g: CGraph) -> dict[str, list[tuple[str, int, tuple[str, ...]]]]:
    inc: dict[str, list] = {v: [] for v in g.vertices}
    for e in g.edges:
        for pos, v in enumerate(e.attach):
            inc[v].append((e.label.name, pos, e.attach))
    return inc


def _refine(g: CGraph, colors: dict[str, tuple], inc) -> dict[str, tuple]:
    while True:
        sigs = {}
        for v in colors:
            local = sorted(
                (lab, pos, tuple(colors[w] for w in attach))
                for lab, pos, attach in inc[v]
            )
            sigs[v] = (colors[v], tuple(local))
        ranked = {s: (i,) for i, s in enumerate(sorted(set(sigs.values())))}
        new = {v: ranked[sigs[v]] for v in colors}
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new


def _initial_colors(g: CGraph, active: frozenset[str]) -> dict[str, tuple]:
    pos = {v: i for i, v in enumerate(g.sources)}
    return {v: (0, pos[v]) if v in pos else (1,) for v in active}


def _encode(g: CGraph, order: list[str], n_isolated: int) -> Encoding:
    idx = {v: i for i, v in enumerate(order)}
    edges = sorted(
        (e.label.name, tuple(idx[v] for v in e.attach)) for e in g.edges
    )
    return (
        g.type_n,
        len(order),
        n_isolated,
        tuple(idx[s] for s in g.sources),
        tuple(edges),
    )


def _canonical(g: CGraph) -> tuple[Encoding, list[str]]:
    touched = {v for e in g.edges for v in e.attach} | set(g.sources)
    isolated = sorted(g.vertices - touched)
    active = frozenset(g.vertices - set(isolated))
    inc = _incidences(g)
    best: list = [None, None]

    def search(colors: dict[str, tuple]):
        cells: dict[tuple, list[str]] = {}
        for v, c in colors.items():
            cells.setdefault(c, []).append(v)
        multi = sorted(c for c, vs in cells.items() if len(vs) > 1)
        if not multi:
            order = sorted(colors, key=colors.get)
            enc = _encode(g, order, len(isolated))
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, order
            return
        cell = multi[0]
        for v in sorted(cells[cell]):
            split = dict(colors)
            split[v] = (*cell, -1)
            search(_refine(g, split, inc))

    if active:
        search(_refine(g, _initial_colors(g, active), inc))
        enc, order = best
    else:
        enc, order = _encode(g, [], len(isolated)), []
    return enc, order + isolated


def canonical_form(g: CGraph) -> Encoding:
    """Hashable encoding equal for exactly the isomorphic c-graphs."""
    return _canonical(g)[0]


def canonical_order(g: CGraph) -> list[str]:
    return _canonical(g)[1]


def dedupe(graphs) -> list[CGraph]:
    """One representative per isomorphism class, in canonical-form order."""
    by_key: dict[Encoding, CGraph] = {}
    for g in graphs:
        by_key.setdefault(canonical_form(g), g)
    return [by_key[k] for k in sorted(by_key)]


def isomorphic(g: CGraph, h: CGraph) -> Optional[Isomorphism]:
    """A witness isomorphism, or None.  Deterministic given input ordering."""
    if (
        g.type_n != h.type_n
        or len(g.vertices) != len(h.vertices)
        or len(g.edges) != len(h.edges)
    ):
        return None
    if sorted(e.label for e in g.edges) != sorted(e.label for e in h.edges):
        return None
    enc_g, order_g = _canonical(g)
    enc_h, order_h = _canonical(h)
    if enc_g != enc_h:
        return None
    vmap = dict(zip(order_g, order_h))
    # Pair up edges with equal (label, attachment) images; duplicates (in
    # non-simple graphs) may be matched in any consistent order.
    pool: dict[tuple, list[str]] = {}
    for e in sorted(h.edges, key=lambda e: e.id):
        pool.setdefault((e.label.name, e.attach), []).append(e.id)
    emap = {}
    for e in sorted(g.edges, key=lambda e: e.id):
        key = (e.label.name, tuple(vmap[v] for v in e.attach))
        emap[e.id] = pool[key].pop(0)
    return Isomorphism(vmap, emap)
