import pathlib

import pytest

from slrkit.errors import (
    ArityError,
    ReservedLabel,
    SidError,
    SidSyntaxError,
    UndeclaredSymbol,
)
from slrkit.eqfree import equality_eliminate, is_equality_free
from slrkit.graphs import CGraph, Label
from slrkit.graph_iso import canonical_form, isomorphic
from slrkit.sid_parser import parse_sid
from slrkit.slr import (
    Emp,
    Eq,
    Exists,
    ModelVerdict,
    Neq,
    PredAtom,
    RelAtom,
    enumerate_models_bruteforce,
    holds,
    sat_qpf,
    sep,
    slr_models,
)

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
B = Label("b", 2)
C = Label("c", 2)


def load(name):
    return parse_sid((FIXTURES / name).read_text())


# -- parsing ------------------------------------------------------------------

def test_parse_fan():
    sid = load("fan.sid")
    assert len(sid.rules) == 3
    assert sid.predicates() == {"A": 0, "B": 2}
    assert {lab.name for lab in sid.alphabet} == {"b", "c"}


def test_parse_single_emp_rule():
    sid = parse_sid("alphabet b/2 ; A() <= emp ;")
    assert len(sid.rules) == 1
    assert isinstance(sid.rules[0].body, Emp)


def test_parse_rejects_free_variable():
    with pytest.raises(SidError):
        parse_sid("alphabet b/1 ; A() <= b(x) ;")


def test_parse_rejects_reserved_label():
    with pytest.raises(ReservedLabel):
        parse_sid("alphabet d__/2 ; A() <= emp ;")


def test_parse_rejects_arity_misuse():
    with pytest.raises(ArityError):
        parse_sid("alphabet b/2 ; A() <= exists x . b(x) ;")


def test_parse_rejects_undeclared_atom():
    with pytest.raises(UndeclaredSymbol):
        parse_sid("alphabet b/2 ; A() <= exists x y . q(x,y) ;")


def test_parse_syntax_error_carries_position():
    with pytest.raises(SidSyntaxError) as err:
        parse_sid("alphabet b/2 ;\nA() <= exists . b ;")
    assert err.value.line == 2


def test_parse_disequality_and_equality():
    sid = parse_sid(
        "alphabet b/2 ;\nA() <= exists x y . b(x,y) * x != y * x = x ;"
    )
    body = sid.rules[0].body
    assert isinstance(body, Exists)


# -- qpf satisfiability --------------------------------------------------------

def test_sat_qpf_duplicate_atom_unsat():
    phi = sep(RelAtom(B, ("x", "y")), RelAtom(B, ("x", "y")))
    assert sat_qpf(phi) is None


def test_sat_qpf_with_disequality():
    phi = sep(RelAtom(B, ("x", "y")), Neq("x", "y"))
    model, store = sat_qpf(phi)
    assert len(model.vertices) == 2
    assert store["x"] != store["y"]


def test_sat_qpf_equality_collapses():
    phi = sep(Eq("x", "y"), RelAtom(B, ("x", "y")))
    model, store = sat_qpf(phi)
    assert len(model.vertices) == 1
    assert model.edges[0].attach == (store["x"], store["x"])


def test_sat_qpf_contradictory_diseq():
    phi = sep(Eq("x", "y"), Neq("x", "y"))
    assert sat_qpf(phi) is None


def test_sat_qpf_store_injective_when_equality_free():
    phi = sep(RelAtom(B, ("x", "y")), RelAtom(C, ("y", "z")))
    model, store = sat_qpf(phi)
    assert len(set(store.values())) == 3


# -- model checking -------------------------------------------------------------

def edge_graph():
    return CGraph.build(["u", "v"], [("e0", B, ("u", "v"))])


def test_models_direct_atom():
    phi = Exists(("x", "y"), RelAtom(B, ("x", "y")))
    assert holds(edge_graph(), phi)


def test_models_emp_on_empty():
    assert holds(CGraph.empty(), Emp())
    assert not holds(CGraph.empty(), Exists(("x", "y"), RelAtom(B, ("x", "y"))))


def test_exists_ranges_over_vertices_only():
    # on the empty graph, any existential formula fails
    assert not holds(CGraph.empty(), Exists(("x",), Eq("x", "x")))


def test_models_respects_edge_bijection():
    # one atom cannot describe a two-edge graph
    g = CGraph.build(["u", "v", "w"],
                     [("e0", B, ("u", "v")), ("e1", B, ("v", "w"))])
    assert not holds(g, Exists(("x", "y"), RelAtom(B, ("x", "y"))))


def test_models_fan_canonical():
    sid = load("fan.sid")
    g = CGraph.build(
        ["y1", "y2", "y3"],
        [("e0", B, ("y1", "y2")), ("e1", C, ("y3", "y2")), ("e2", B, ("y1", "y3"))],
    )
    assert holds(g, PredAtom("A", ()), sid)


def test_models_fan_rejects_wrong_graph():
    sid = load("fan.sid")
    g = CGraph.build(["u", "v"], [("e0", C, ("u", "v"))])
    assert slr_models(g, {}, PredAtom("A", ()), sid) is ModelVerdict.FALSE_AT_FUEL


def test_models_star_accepts_two_tails():
    sid = load("star.sid")
    g = CGraph.build(
        ["h", "p1", "q1", "p2", "q2"],
        [
            ("e0", B, ("h", "p1")),
            ("e1", C, ("p1", "q1")),
            ("e2", B, ("h", "p2")),
            ("e3", C, ("p2", "q2")),
        ],
    )
    assert holds(g, PredAtom("A", ()), sid)


def test_models_isomorphism_invariant():
    sid = load("fan.sid")
    g = CGraph.build(
        ["y1", "y2", "y3"],
        [("e0", B, ("y1", "y2")), ("e1", C, ("y3", "y2")), ("e2", B, ("y1", "y3"))],
    )
    assert holds(g.rename("zz_"), PredAtom("A", ()), sid)


def test_models_every_accepted_graph_is_simple():
    # non-simple graphs are rejected outright: two equal atoms never split
    g = CGraph.build(["u", "v"],
                     [("e0", B, ("u", "v")), ("e1", B, ("u", "v"))])
    sid = load("fan.sid")
    phi = Exists(("x", "y"), sep(RelAtom(B, ("x", "y")), RelAtom(B, ("x", "y"))))
    assert not holds(g, phi, sid)


def test_models_diseq_fixture():
    sid = load("distinct_pair.sid")
    good = CGraph.build(["u", "v"], [("e0", B, ("u", "v"))])
    loop = CGraph.build(["u"], [("e0", B, ("u", "u"))])
    assert holds(good, PredAtom("D", ()), sid)
    assert not holds(loop, PredAtom("D", ()), sid)


def test_store_must_cover_free_variables():
    with pytest.raises(SidError):
        slr_models(edge_graph(), {}, RelAtom(B, ("x", "y")))


# -- brute-force enumeration ----------------------------------------------------

def test_enumerate_emp_only():
    sid = parse_sid("alphabet b/2 ; A() <= emp ;")
    out = enumerate_models_bruteforce(sid, "A", 3)
    assert len(out) == 1 and out[0].vertices == frozenset()


def test_enumerate_unsat_definition():
    sid = parse_sid("alphabet b/2 ; A() <= exists x . b(x,x) * b(x,x) ;")
    assert enumerate_models_bruteforce(sid, "A", 3) == []


def test_enumerate_fan_contains_base_model():
    sid = load("fan.sid")
    out = enumerate_models_bruteforce(sid, "A", 3, max_edges=6)
    base = CGraph.build(
        ["y1", "y2", "y3"],
        [("e0", B, ("y1", "y2")), ("e1", C, ("y3", "y2")), ("e2", B, ("y1", "y3"))],
    )
    assert any(isomorphic(g, base) for g in out)


def test_enumerate_requires_nullary_root():
    sid = load("fan.sid")
    with pytest.raises(SidError):
        enumerate_models_bruteforce(sid, "B", 3)


# -- equality elimination ---------------------------------------------------------

def test_eliminate_substitutes_equality():
    sid = parse_sid("alphabet b/2 ; A() <= exists y z . y = z * b(y,z) ;")
    out = equality_eliminate(sid)
    assert is_equality_free(out)
    rules = out.rules_for("A")
    assert len(rules) == 1
    body = rules[0].body
    assert isinstance(body, Exists) and len(body.vars) == 1
    assert isinstance(body.body, RelAtom) and body.body.args[0] == body.body.args[1]


def test_eliminate_keeps_equality_free_sid():
    sid = load("fan.sid")
    out = equality_eliminate(sid)
    assert is_equality_free(out)
    assert out.predicates() == sid.predicates()
    assert len(out.rules) == len(sid.rules)


def test_eliminate_splits_on_parameter_aliasing():
    text = """
    alphabet b/2, c/1 ;
    A() <= exists u w . b(u,w) * B(u,w) ;
    B(x1,x2) <= x1 = x2 * c(x1) ;
    B(x1,x2) <= b(x1,x2) ;
    """
    sid = parse_sid(text)
    out = equality_eliminate(sid)
    assert is_equality_free(out)
    preds = out.predicates()
    assert preds["A"] == 0 and preds["B"] == 2
    assert any(p != "A" and p != "B" and preds[p] == 1 for p in preds)


@pytest.mark.parametrize(
    "text",
    [
        "alphabet b/2 ; A() <= exists y z . y = z * b(y,z) ;",
        """
        alphabet b/2, c/1 ;
        A() <= exists u w . b(u,w) * B(u,w) ;
        B(x1,x2) <= x1 = x2 * c(x1) ;
        B(x1,x2) <= b(x1,x2) ;
        """,
        """
        alphabet b/2 ;
        A() <= exists x y . b(x,y) * E(x,y) ;
        A() <= exists x y . x = y * b(x,y) ;
        E(x1,x2) <= x2 = x1 * b(x1,x1) ;
        """,
    ],
)
def test_eliminate_preserves_models(text):
    sid = parse_sid(text)
    out = equality_eliminate(sid)
    before = {canonical_form(g) for g in enumerate_models_bruteforce(sid, "A", 3, max_edges=4)}
    after = {canonical_form(g) for g in enumerate_models_bruteforce(out, "A", 3, max_edges=4)}
    assert before == after
