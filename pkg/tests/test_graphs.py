import itertools
import random

import pytest

from slrkit.errors import ArityMismatch, Incompatible, NotComposable, TooLarge, TypeMismatch
from slrkit.graphs import (
    CGraph,
    DISEQ_LABEL,
    Label,
    compose,
    diseq_label,
    from_json,
    is_simple,
    parallel,
    project,
    substitute,
    substitute_many,
    to_dot,
    to_json,
)
from slrkit.graph_iso import canonical_form, dedupe, isomorphic
from slrkit.fusion import (
    VertexEquivalence,
    compatible,
    compatible_partitions,
    fb_of_graph,
    fission_1,
    fission_k,
    fusion_all,
    fusion_k,
    min_fusion_vertices_lb,
    quotient,
)
from slrkit.treewidth import (
    TreeDecomposition,
    treewidth_exact,
    treewidth_with_witness,
    verify_tree_decomposition,
)

A = Label("a", 1)
B = Label("b", 2)
C = Label("c", 2)
D = diseq_label()


def g_of(edges, extra_vertices=(), sources=()):
    """Small helper: edges as (label, attach...) tuples, auto ids/vertices."""
    vs = set(extra_vertices) | set(sources)
    recs = []
    for i, (lab, *att) in enumerate(edges):
        vs.update(att)
        recs.append((f"e{i}", lab, att))
    return CGraph.build(sorted(vs), recs, sources)


# -- simplicity and composition --------------------------------------------

def test_empty_graph_is_simple():
    assert is_simple(CGraph.empty())


def test_distinct_labels_same_attach_is_simple():
    assert is_simple(g_of([(B, "u", "v"), (C, "u", "v")]))


def test_duplicate_atom_not_simple():
    assert not is_simple(g_of([(B, "u", "v"), (B, "u", "v")]))


def test_compose_empty_is_identity():
    g = g_of([(B, "u", "v")])
    assert isomorphic(compose(CGraph.empty(), g), g)


def test_compose_shares_vertices():
    g = compose(g_of([(B, "u", "v")]), CGraph.build(["v", "w"], [("f0", C, ("v", "w"))]))
    assert g.vertices == {"u", "v", "w"}
    assert len(g.edges) == 2


def test_compose_rejects_duplicate_atom():
    g1 = g_of([(B, "u", "v")])
    g2 = CGraph.build(["u", "v"], [("f0", B, ("u", "v"))])
    with pytest.raises(NotComposable):
        compose(g1, g2)


def test_compose_rejects_shared_edge_ids():
    with pytest.raises(NotComposable):
        compose(g_of([(B, "u", "v")]), g_of([(C, "x", "y")]))


def test_compose_requires_type_zero():
    with pytest.raises(TypeMismatch):
        compose(g_of([(B, "u", "v")], sources=("u",)), CGraph.empty())


def test_compose_commutative_associative_where_defined():
    g1 = g_of([(B, "u", "v")])
    g2 = CGraph.build(["v", "w"], [("f0", C, ("v", "w"))])
    g3 = CGraph.build(["x"], [("h0", A, ("x",))])
    lhs = compose(compose(g1, g2), g3)
    rhs = compose(g1, compose(g2, g3))
    assert isomorphic(lhs, rhs)
    assert isomorphic(compose(g2, g1), compose(g1, g2))


def test_compose_preserves_simplicity():
    rng = random.Random(7)
    for _ in range(50):
        g1 = random_simple_graph(rng, 4, 4, prefix="l")
        g2 = random_simple_graph(rng, 4, 4, prefix="r")
        try:
            g = compose(g1, g2)
        except NotComposable:
            continue
        assert is_simple(g)


# -- parallel composition ---------------------------------------------------

def test_parallel_single_sources():
    g1 = CGraph.build(["u"], [], sources=("u",))
    g2 = CGraph.build(["v"], [], sources=("v",))
    joined = parallel(g1, g2, 1)
    assert len(joined.vertices) == 1 and not joined.edges


def test_parallel_duplicates_edges():
    g1 = CGraph.build(["u1", "u2"], [("e0", B, ("u1", "u2"))], sources=("u1", "u2"))
    g2 = CGraph.build(["v1", "v2"], [("f0", B, ("v1", "v2"))], sources=("v1", "v2"))
    joined = parallel(g1, g2, 2)
    assert len(joined.vertices) == 2
    assert len(joined.edges) == 2
    assert not is_simple(joined)


def test_parallel_unit_up_to_iso():
    g = CGraph.build(["u1", "u2", "w"], [("e0", B, ("u1", "w"))], sources=("u1", "u2"))
    unit = CGraph.build(["s1", "s2"], [], sources=("s1", "s2"))
    assert isomorphic(parallel(g, unit, 2), g)


def test_parallel_type_mismatch():
    with pytest.raises(TypeMismatch):
        parallel(CGraph.empty(), CGraph.build(["v"], [], sources=("v",)), 1)


# -- substitution -----------------------------------------------------------

def test_substitute_degenerate_host():
    nt = Label("N", 2)
    host = CGraph.build(["p", "q"], [("e0", nt, ("p", "q"))])
    h = CGraph.build(["s1", "s2", "m"], [("f0", B, ("s1", "m")), ("f1", C, ("m", "s2"))],
                     sources=("s1", "s2"))
    res = substitute(host, "e0", h)
    assert res.type_n == 0
    assert len(res.vertices) == 3
    assert sorted(e.label.name for e in res.edges) == ["b", "c"]


def test_substitute_merges_arity_many_attachments():
    nt = Label("N", 3)
    host = CGraph.build(["x", "y", "z", "o"],
                        [("e0", nt, ("x", "y", "z")), ("e1", B, ("o", "x"))])
    h = CGraph.build(["s1", "s2", "s3", "i"],
                     [("f0", B, ("s1", "i")), ("f1", B, ("i", "s2")), ("f2", C, ("i", "s3"))],
                     sources=("s1", "s2", "s3"))
    res = substitute(host, "e0", h)
    assert len(res.vertices) == 5  # x,y,z,o + internal i
    assert len(res.edges) == 4


def test_substitution_order_independent():
    n1, n2 = Label("N", 1), Label("M", 1)
    host = CGraph.build(["x", "y"], [("e0", n1, ("x",)), ("e1", n2, ("y",))])
    h1 = CGraph.build(["s", "t"], [("f0", B, ("s", "t"))], sources=("s",))
    h2 = CGraph.build(["p"], [("g0", A, ("p",))], sources=("p",))
    one = substitute(substitute(host, "e0", h1), "e1", h2)
    other = substitute(substitute(host, "e1", h2), "e0", h1)
    both = substitute_many(host, {"e0": h1, "e1": h2})
    assert isomorphic(one, other) and isomorphic(one, both)


def test_substitute_arity_mismatch():
    host = g_of([(B, "u", "v")])
    with pytest.raises(ArityMismatch):
        substitute(host, "e0", CGraph.build(["s"], [], sources=("s",)))


# -- compatibility and quotient ---------------------------------------------

def test_identity_compatible():
    g = g_of([(B, "u", "v"), (C, "v", "w")])
    assert compatible(g, VertexEquivalence.identity(g))


def test_unary_collision_incompatible():
    g = g_of([(A, "u"), (A, "v")])
    assert not compatible(g, VertexEquivalence.from_pairs(g, [("u", "v")]))


def test_diseq_edge_incompatible():
    g = g_of([(D, "u", "v")])
    assert not compatible(g, VertexEquivalence.from_pairs(g, [("u", "v")]))


def test_quotient_identity_isomorphic():
    g = g_of([(B, "u", "v"), (C, "v", "w")])
    assert isomorphic(quotient(g, VertexEquivalence.identity(g)), g)


def test_quotient_two_isolated():
    g = CGraph.build(["u", "v"], [])
    q = quotient(g, VertexEquivalence.from_pairs(g, [("u", "v")]))
    assert len(q.vertices) == 1 and not q.edges


def test_quotient_merges_classwise():
    g = g_of([(B, "u", "v"), (C, "w", "v")])
    q = quotient(g, VertexEquivalence.from_pairs(g, [("u", "w")]))
    assert len(q.vertices) == 2
    expected = g_of([(B, "x", "v"), (C, "x", "v")])
    assert isomorphic(q, expected)


def test_quotient_incompatible_raises():
    g = g_of([(A, "u"), (A, "v")])
    with pytest.raises(Incompatible):
        quotient(g, VertexEquivalence.from_pairs(g, [("u", "v")]))


def test_quotient_of_simple_is_simple():
    rng = random.Random(11)
    for _ in range(40):
        g = random_simple_graph(rng, 5, 5)
        for eq in compatible_partitions(g):
            assert is_simple(quotient(g, eq))


# -- fusion and fission -----------------------------------------------------

def test_fusion_all_single_vertex():
    g = CGraph.build(["u"], [])
    out = fusion_all(g)
    assert len(out) == 1 and isomorphic(out[0], g)


def test_fusion_all_two_isolated():
    g = CGraph.build(["u", "v"], [])
    out = fusion_all(g)
    assert sorted(len(h.vertices) for h in out) == [1, 2]


def test_fusion_all_diseq_edge_only_itself():
    g = g_of([(D, "u", "v")])
    out = fusion_all(g)
    assert len(out) == 1 and isomorphic(out[0], g)


def test_fission_1_unary_loop():
    g = g_of([(A, "v")])
    out = fission_1(g)
    assert len(out) == 1
    split = out[0]
    assert len(split.vertices) == 2 and len(split.edges) == 1
    # one copy keeps the edge, the other is isolated
    assert any(isomorphic(back, g) for back in fusion_k(split, 1))


def test_fission_0_is_identity():
    g = g_of([(B, "u", "v")])
    out = fission_k(g, 0)
    assert len(out) == 1 and isomorphic(out[0], g)


def test_fission_fusion_inverse_exhaustive():
    # h in fission_k(g)  iff  g in fusion_k(h), both directions
    rng = random.Random(3)
    graphs = [random_simple_graph(rng, 4, 3) for _ in range(12)]
    graphs += [CGraph.empty(), g_of([(A, "v")]), g_of([(D, "u", "v")])]
    for g in graphs:
        for k in (1, 2):
            for h in fission_k(g, k):
                assert any(isomorphic(q, g) for q in fusion_k(h, k))


def test_fusion_fission_inverse_from_parent_side():
    # quotient a random graph by an exactly-k-generated equivalence and
    # check the parent reappears among the fissions of the child
    rng = random.Random(5)
    for _ in range(12):
        h = random_simple_graph(rng, 5, 4)
        for eq in compatible_partitions(h):
            k = eq.generator_count
            if k == 0 or k > 2:
                continue
            g = quotient(h, eq)
            assert any(isomorphic(h, cand) for cand in fission_k(g, k))


def test_fb_of_graph_examples():
    assert fb_of_graph(CGraph.build(["u"], [])) == 0
    assert fb_of_graph(CGraph.build(["u", "v"], [])) == 1
    for n in range(1, 6):
        g = CGraph.build([f"v{i}" for i in range(n)], [])
        assert fb_of_graph(g) == n - 1


def test_min_fusion_vertices_lower_bound_sound():
    rng = random.Random(13)
    for _ in range(25):
        g = random_simple_graph(rng, 5, 5)
        lb = min_fusion_vertices_lb(g)
        sizes = [len(h.vertices) for h in fusion_all(g)]
        if sizes:
            assert lb <= min(sizes)


# -- projection --------------------------------------------------------------

def test_project_drops_diseq_keeps_vertices():
    g = g_of([(B, "u", "v"), (D, "u", "v")])
    p = project(g, [B])
    assert p.vertices == {"u", "v"}
    assert [e.label.name for e in p.edges] == ["b"]


def test_project_full_alphabet_identity():
    g = g_of([(B, "u", "v"), (C, "v", "w")])
    assert isomorphic(project(g, [B, C]), g)


def test_project_to_empty_edge_set():
    g = g_of([(D, "u", "v")])
    p = project(g, [B])
    assert p.vertices == {"u", "v"} and not p.edges


# -- isomorphism -------------------------------------------------------------

def test_isomorphic_identity_witness():
    g = g_of([(B, "u", "v"), (C, "v", "w")])
    iso = isomorphic(g, g)
    assert iso and iso.vertex_map == {v: v for v in g.vertices}


def test_isomorphic_relabeled_copy():
    g = g_of([(B, "u", "v"), (C, "v", "w")])
    h = g.rename("q_")
    iso = isomorphic(g, h)
    assert iso is not None
    for e in g.edges:
        img = h.edge(iso.edge_map[e.id])
        assert img.label == e.label
        assert tuple(iso.vertex_map[v] for v in e.attach) == img.attach


def test_isomorphic_distinguishes_label_multisets():
    assert isomorphic(g_of([(B, "u", "v")]), g_of([(C, "u", "v")])) is None


def test_isomorphism_respects_sources():
    g = CGraph.build(["u", "v"], [("e0", B, ("u", "v"))], sources=("u", "v"))
    h = CGraph.build(["u", "v"], [("e0", B, ("u", "v"))], sources=("v", "u"))
    assert isomorphic(g, h) is None


def test_canonical_form_invariance_random():
    rng = random.Random(17)
    for _ in range(40):
        g = random_simple_graph(rng, 5, 6)
        names = sorted(g.vertices)
        perm = names[:]
        rng.shuffle(perm)
        vmap = dict(zip(names, perm))
        h = CGraph(
            g.type_n,
            g.vertices,
            tuple(
                type(e)(e.id, e.label, tuple(vmap[v] for v in e.attach))
                for e in g.edges
            ),
            tuple(vmap[s] for s in g.sources),
        )
        assert canonical_form(g) == canonical_form(h)


def test_fusion_closed_under_isomorphism_of_input():
    rng = random.Random(23)
    for _ in range(10):
        g = random_simple_graph(rng, 4, 4)
        h = g.rename("z_")
        keys_g = {canonical_form(x) for x in fusion_all(g)}
        keys_h = {canonical_form(x) for x in fusion_all(h)}
        assert keys_g == keys_h


# -- tree decompositions ------------------------------------------------------

def path_graph(n):
    return g_of([(B, f"v{i}", f"v{i+1}") for i in range(n - 1)])


def grid_graph(n):
    edges = []
    for i in range(n):
        for j in range(n):
            if i + 1 < n:
                edges.append((B, f"v{i}_{j}", f"v{i+1}_{j}"))
            if j + 1 < n:
                edges.append((B, f"v{i}_{j}", f"v{i}_{j+1}"))
    return g_of(edges)


def test_verify_path_decomposition():
    g = path_graph(3)
    tree = CGraph.build(["n0", "n1"], [("t0", Label("t__", 2), ("n0", "n1"))])
    td = TreeDecomposition(tree, {"n0": frozenset({"v0", "v1"}),
                                  "n1": frozenset({"v1", "v2"})})
    assert verify_tree_decomposition(g, td)
    assert td.width() == 1


def test_verify_rejects_uncovered_edge():
    g = path_graph(3)
    tree = CGraph.build(["n0", "n1"], [("t0", Label("t__", 2), ("n0", "n1"))])
    td = TreeDecomposition(tree, {"n0": frozenset({"v0", "v1"}),
                                  "n1": frozenset({"v2"})})
    assert not verify_tree_decomposition(g, td)


def test_verify_rejects_disconnected_occurrence():
    g = path_graph(3)
    tree = CGraph.build(
        ["n0", "n1", "n2"],
        [("t0", Label("t__", 2), ("n0", "n1")), ("t1", Label("t__", 2), ("n1", "n2"))],
    )
    td = TreeDecomposition(tree, {"n0": frozenset({"v0", "v1"}),
                                  "n1": frozenset({"v2"}),
                                  "n2": frozenset({"v0", "v1", "v2"})})
    assert not verify_tree_decomposition(g, td)


def test_treewidth_of_tree_is_one():
    g = g_of([(B, "r", "a"), (B, "r", "b"), (B, "a", "c"), (B, "a", "d")])
    assert treewidth_exact(g) == 1


def test_treewidth_of_grid():
    assert treewidth_exact(grid_graph(3)) == 3


def test_treewidth_single_vertex():
    assert treewidth_exact(CGraph.build(["v"], [])) == 0


def test_treewidth_limit():
    g = CGraph.build([f"v{i}" for i in range(13)], [])
    with pytest.raises(TooLarge):
        treewidth_exact(g)
    assert treewidth_exact(g, max_vertices=13) == 0


def test_treewidth_witness_always_verifies():
    rng = random.Random(29)
    for _ in range(30):
        g = random_simple_graph(rng, 6, 7)
        width, td = treewidth_with_witness(g)
        assert verify_tree_decomposition(g, td)
        assert td.width() == width


def test_quotient_treewidth_inequality_random():
    rng = random.Random(31)
    for _ in range(30):
        g = random_simple_graph(rng, 6, 6)
        base = treewidth_exact(g)
        for eq in compatible_partitions(g):
            k = eq.generator_count
            if k == 0 or k > 2:
                continue
            assert treewidth_exact(quotient(g, eq)) <= base + k


# -- interchange --------------------------------------------------------------

def test_json_round_trip():
    g = CGraph.build(
        ["u", "v", "w"],
        [("e0", B, ("u", "v")), ("e1", A, ("w",))],
        sources=("u",),
    )
    h = from_json(to_json(g))
    assert h == g


def test_dot_export_smoke():
    g = g_of([(B, "u", "v"), (A, "u")])
    text = to_dot(g)
    assert "digraph" in text and '"u" -> "v"' in text


# -- helpers ------------------------------------------------------------------

def random_simple_graph(rng, max_vertices, max_edges, prefix=""):
    """Random simple type-0 c-graph over labels a/1, b/2, c/2 and d__."""
    n = rng.randint(1, max_vertices)
    vs = [f"{prefix}v{i}" for i in range(n)]
    labels = [A, B, C, D]
    pool = set()
    edges = []
    for k in range(rng.randint(0, max_edges)):
        lab = rng.choice(labels)
        att = tuple(rng.choice(vs) for _ in range(lab.arity))
        if lab.name == DISEQ_LABEL and att[0] == att[1]:
            continue  # keep the identity equivalence compatible
        if (lab.name, att) in pool:
            continue
        pool.add((lab.name, att))
        edges.append((f"{prefix}e{k}", lab, att))
    return CGraph.build(vs, edges)
