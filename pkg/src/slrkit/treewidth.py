"""Tree decompositions and exact tree-width of small c-graphs.

The exact computation runs dynamic programming over vertex subsets, where
eliminating a vertex connects its neighbors reachable through the eliminated
set.  This is exponential by design; a documented soft limit guards it.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import TooLarge
from .graphs import CGraph, Edge, Label

TREE_EDGE = Label("t__", 2)


@dataclass(frozen=True)
class TreeDecomposition:
    """A tree (c-graph over one binary label) plus a bag per tree vertex."""

    tree: CGraph
    bags: dict[str, frozenset[str]]

    def width(self) -> int:
        if not self.bags:
            return -1
        return max(len(b) for b in self.bags.values()) - 1


def _primal_adjacency(g: CGraph) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        att = set(e.attach)
        for v in att:
            adj[v] |= att - {v}
    return adj


def _tree_adjacency(t: CGraph) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in t.vertices}
    for e in t.edges:
        a, b = e.attach
        adj[a].add(b)
        adj[b].add(a)
    return adj


def verify_tree_decomposition(g: CGraph, td: TreeDecomposition) -> bool:
    """Both defining conditions: edge coverage and connected occurrence sets."""
    if not td.tree.is_tree_shaped():
        return False
    if set(td.bags) != set(td.tree.vertices):
        return False
    for e in g.edges:
        need = set(e.attach)
        if not any(need <= bag for bag in td.bags.values()):
            return False
    adj = _tree_adjacency(td.tree)
    for v in g.vertices:
        nodes = {n for n, bag in td.bags.items() if v in bag}
        if not nodes:
            return False
        start = next(iter(nodes))
        seen = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for y in adj[x]:
                if y in nodes and y not in seen:
                    seen.add(y)
                    frontier.append(y)
        if seen != nodes:
            return False
    return True


def _reach_through(adj, bits_of, eliminated: int, v: str) -> int:
    """Bitmask of vertices outside ``eliminated`` adjacent to v through it."""
    seen = bits_of[v]
    frontier = [v]
    out = 0
    while frontier:
        x = frontier.pop()
        for y in adj[x]:
            b = bits_of[y]
            if seen & b:
                continue
            seen |= b
            if eliminated & b:
                frontier.append(y)
            else:
                out |= b
    return out


def treewidth_exact(g: CGraph, max_vertices: int = 12) -> int:
    return treewidth_with_witness(g, max_vertices)[0]


def treewidth_with_witness(
    g: CGraph, max_vertices: int = 12
) -> tuple[int, TreeDecomposition]:
    """Exact tree-width with a verifying decomposition, via elimination orders."""
    vs = sorted(g.vertices)
    n = len(vs)
    if n > max_vertices:
        raise TooLarge(f"{n} vertices exceeds the soft limit {max_vertices}")
    if n == 0:
        tree = CGraph.build(["n0"], [])
        return -1, TreeDecomposition(tree, {"n0": frozenset()})
    adj = _primal_adjacency(g)
    bits_of = {v: 1 << i for i, v in enumerate(vs)}
    memo: dict[int, int] = {0: -1}
    choice: dict[int, str] = {}

    def tw(mask: int) -> int:
        if mask in memo:
            return memo[mask]
        best, best_v = n, None
        for i, v in enumerate(vs):
            if not mask >> i & 1:
                continue
            rest = mask & ~(1 << i)
            degree = bin(_reach_through(adj, bits_of, rest, v)).count("1")
            if degree >= best:
                continue
            val = max(tw(rest), degree)
            if val < best:
                best, best_v = val, v
        memo[mask] = best
        choice[mask] = best_v
        return best

    width = tw((1 << n) - 1)

    order = []
    mask = (1 << n) - 1
    while mask:
        v = choice.get(mask)
        if v is None:
            tw(mask)
            v = choice[mask]
        order.append(v)
        mask &= ~bits_of[v]
    order.reverse()  # elimination order: order[0] eliminated first

    index = {v: i for i, v in enumerate(order)}
    bags: dict[str, frozenset[str]] = {}
    later_neighbors: dict[str, list[str]] = {}
    for i, v in enumerate(order):
        eliminated = 0
        for w in order[:i]:
            eliminated |= bits_of[w]
        reach = _reach_through(adj, bits_of, eliminated, v)
        nbrs = [w for w in order if bits_of[w] & reach]
        bags[f"n{i}"] = frozenset([v] + nbrs)
        later_neighbors[v] = nbrs
    edges = []
    for i, v in enumerate(order):
        nbrs = later_neighbors[v]
        if nbrs:
            j = min(index[w] for w in nbrs)
        elif i + 1 < n:
            j = i + 1
        else:
            continue
        edges.append((f"te{i}", TREE_EDGE, (f"n{j}", f"n{i}")))
    tree = CGraph.build([f"n{i}" for i in range(n)], edges)
    return width, TreeDecomposition(tree, bags)
