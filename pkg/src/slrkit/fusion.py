"""Vertex equivalences, quotients, fusion and fission of simple c-graphs.

An equivalence is k-generated when k is the minimal cardinality of a set of
vertex pairs generating it, i.e. the sum of (|class| - 1) over its classes.
Fusion quotients a graph by compatible equivalences; fission is the inverse
splitting operation, realized directly by redistributing the edge-endpoint
occurrences of one vertex over two copies.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import Incompatible
from .graphs import DISEQ_LABEL, CGraph, Edge
from .graph_iso import canonical_form, dedupe


@dataclass(frozen=True)
class VertexEquivalence:
    """A partition of a graph's vertices with a generating pair set."""

    graph: CGraph
    classes: tuple[frozenset[str], ...]
    generators: frozenset[tuple[str, str]]

    def __post_init__(self):
        blocks = [set(c) for c in self.classes]
        flat = [v for c in blocks for v in c]
        if len(flat) != len(set(flat)) or set(flat) != self.graph.vertices:
            raise Incompatible("classes must partition the vertex set")
        closure = _closure(self.graph.vertices, self.generators)
        if sorted(map(sorted, closure)) != sorted(map(sorted, blocks)):
            raise Incompatible("generators do not generate the given partition")

    @property
    def generator_count(self) -> int:
        """Minimal number of generating pairs: sum of (|class| - 1)."""
        return sum(len(c) - 1 for c in self.classes)

    def class_of(self, v: str) -> frozenset[str]:
        for c in self.classes:
            if v in c:
                return c
        raise KeyError(v)

    @staticmethod
    def identity(g: CGraph) -> "VertexEquivalence":
        return VertexEquivalence(
            g, tuple(frozenset([v]) for v in sorted(g.vertices)), frozenset()
        )

    @staticmethod
    def from_pairs(g: CGraph, pairs: Iterable[tuple[str, str]]) -> "VertexEquivalence":
        pairs = frozenset(tuple(p) for p in pairs)
        blocks = _closure(g.vertices, pairs)
        spanning = frozenset(
            (c[i], c[i + 1])
            for c in (sorted(b) for b in blocks)
            for i in range(len(c) - 1)
            if len(c) > 1
        )
        return VertexEquivalence(g, tuple(frozenset(b) for b in blocks), spanning)

    @staticmethod
    def from_partition(g: CGraph, blocks: Iterable[Iterable[str]]) -> "VertexEquivalence":
        spanning = set()
        for b in blocks:
            b = sorted(b)
            spanning.update((b[i], b[i + 1]) for i in range(len(b) - 1))
        return VertexEquivalence.from_pairs(g, spanning)


def _closure(vertices: frozenset[str], pairs) -> list[list[str]]:
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        parent[find(a)] = find(b)
    blocks: dict[str, list[str]] = {}
    for v in vertices:
        blocks.setdefault(find(v), []).append(v)
    return [sorted(b) for b in blocks.values()]


def _block_index(eq: VertexEquivalence) -> dict[str, int]:
    idx = {}
    for i, c in enumerate(eq.classes):
        for v in c:
            idx[v] = i
    return idx


def compatible(g: CGraph, eq: VertexEquivalence) -> bool:
    """No same-label edges collide classwise; no disequality edge collapses."""
    idx = _block_index(eq)
    seen = set()
    for e in g.edges:
        key = (e.label.name, tuple(idx[v] for v in e.attach))
        if key in seen:
            return False
        seen.add(key)
        if e.label.name == DISEQ_LABEL and idx[e.attach[0]] == idx[e.attach[1]]:
            return False
    return True


def quotient(g: CGraph, eq: VertexEquivalence) -> CGraph:
    """Collapse each class to one vertex (named by its least member)."""
    if not compatible(g, eq):
        raise Incompatible("equivalence is not compatible with the graph")
    name = {}
    for c in eq.classes:
        rep = min(c)
        for v in c:
            name[v] = rep
    return CGraph(
        g.type_n,
        frozenset(name[v] for v in g.vertices),
        tuple(
            Edge(e.id, e.label, tuple(name[v] for v in e.attach)) for e in g.edges
        ),
        tuple(name[s] for s in g.sources),
    )


def compatible_partitions(g: CGraph) -> Iterator[VertexEquivalence]:
    """All compatible equivalences, enumerated via restricted growth strings.

    Assignments are pruned as soon as two same-label edges collide classwise
    or a disequality edge becomes internal to a block.
    """
    vs = sorted(g.vertices)
    n = len(vs)
    if n == 0:
        yield VertexEquivalence.identity(g)
        return
    position = {v: i for i, v in enumerate(vs)}
    completed_at: list[list[Edge]] = [[] for _ in range(n)]
    for e in g.edges:
        completed_at[max(position[v] for v in e.attach)].append(e)
    assignment = [0] * n
    seen_keys: list[set] = [set() for _ in range(n + 1)]

    def extend(i: int, nblocks: int) -> Iterator[list[int]]:
        if i == n:
            yield assignment
            return
        for b in range(nblocks + 1):
            assignment[i] = b
            keys = []
            ok = True
            for e in completed_at[i]:
                key = (e.label.name, tuple(assignment[position[v]] for v in e.attach))
                if key in seen_keys[i] or key in keys:
                    ok = False
                    break
                if e.label.name == DISEQ_LABEL and key[1][0] == key[1][1]:
                    ok = False
                    break
                keys.append(key)
            if ok:
                seen_keys[i + 1] = seen_keys[i] | set(keys)
                yield from extend(i + 1, max(nblocks, b + 1))

    for a in extend(0, 0):
        blocks: dict[int, list[str]] = {}
        for i, b in enumerate(a):
            blocks.setdefault(b, []).append(vs[i])
        yield VertexEquivalence.from_partition(g, blocks.values())


def fusion_all(g: CGraph) -> list[CGraph]:
    """One representative per isomorphism class of compatible quotients."""
    return dedupe(quotient(g, eq) for eq in compatible_partitions(g))


def fusion_k(g: CGraph, k: int) -> list[CGraph]:
    """Quotients by compatible equivalences generated by exactly k pairs."""
    return dedupe(
        quotient(g, eq)
        for eq in compatible_partitions(g)
        if eq.generator_count == k
    )


def fb_of_graph(g: CGraph) -> int:
    """Largest k for which a compatible k-generated equivalence exists."""
    best = 0
    for eq in compatible_partitions(g):
        best = max(best, eq.generator_count)
    return best


def _fresh_pair(g: CGraph, base: str) -> tuple[str, str]:
    taken = g.vertices | {e.id for e in g.edges}
    suffix = ""
    while f"{base}{suffix}.1" in taken or f"{base}{suffix}.2" in taken:
        suffix += "_"
    return f"{base}{suffix}.1", f"{base}{suffix}.2"


def fission_1(g: CGraph) -> list[CGraph]:
    """All splits of one vertex into two copies that fuse back to ``g``.

    Every endpoint occurrence of the chosen vertex is routed to one of the
    two copies; a split survives iff joining the copies back is a compatible
    equivalence of the split graph.
    """
    if g.type_n != 0:
        raise Incompatible("fission is defined for type-0 graphs")
    out = []
    for u in sorted(g.vertices):
        occurrences = [
            (e.id, pos) for e in g.edges for pos, v in enumerate(e.attach) if v == u
        ]
        u1, u2 = _fresh_pair(g, u)
        for take in range(2 ** len(occurrences)):
            routed = {
                occ: (u1 if take >> i & 1 else u2)
                for i, occ in enumerate(occurrences)
            }
            edges = tuple(
                Edge(
                    e.id,
                    e.label,
                    tuple(
                        routed.get((e.id, pos), v) if v == u else v
                        for pos, v in enumerate(e.attach)
                    ),
                )
                for e in g.edges
            )
            split = CGraph(0, (g.vertices - {u}) | {u1, u2}, edges, ())
            join = VertexEquivalence.from_pairs(split, [(u1, u2)])
            if compatible(split, join):
                out.append(split)
    return dedupe(out)


def fission_k(g: CGraph, k: int) -> list[CGraph]:
    """k-fold iteration of single-vertex fission, up to isomorphism."""
    layer = [g]
    for _ in range(k):
        layer = dedupe(h for f in layer for h in fission_1(f))
    return layer


def pairwise_incompatible(g: CGraph, u: str, v: str) -> bool:
    """True when no compatible equivalence may place u and v in one class."""
    return not compatible(g, VertexEquivalence.from_pairs(g, [(u, v)]))


def min_fusion_vertices_lb(g: CGraph) -> int:
    """Lower bound on the vertex count of any compatible quotient of ``g``.

    Vertices that are pairwise incompatible can never share a class, so a
    clique in the incompatibility graph bounds the class count from below.
    """
    vs = sorted(g.vertices)
    incompat = {
        (u, v)
        for u, v in itertools.combinations(vs, 2)
        if pairwise_incompatible(g, u, v)
    }
    degree = {v: 0 for v in vs}
    for u, v in incompat:
        degree[u] += 1
        degree[v] += 1
    clique: list[str] = []
    for v in sorted(vs, key=lambda x: -degree[x]):
        if all((min(v, w), max(v, w)) in incompat for w in clique):
            clique.append(v)
    return max(len(clique), 1) if vs else 0
