"""Hyperedge-replacement grammars, parse trees of inductive definitions,
characteristic formulas, and canonical model construction.

A parse tree records which productive rules build a model and how their
predicate calls nest.  Unfolding the tree yields its characteristic formula,
a quantifier- and predicate-free formula over variables annotated with the
tree edge that introduced them; instantiating that formula with a store that
identifies only explicitly equated variables yields the canonical model, and
disequality occurrences become edges with the reserved label.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Optional, Union

from .errors import NotEqualityFree, NotRegular, SidError
from .eqfree import is_equality_free
from .graphs import CGraph, DISEQ_LABEL, Label, diseq_label, project
from .graph_iso import canonical_form
from .graphs import substitute_many, parallel
from .regularity import check_regular, require_regular
from .slr import (
    Emp,
    Eq,
    Exists,
    Formula,
    Neq,
    PredAtom,
    RelAtom,
    Rule,
    Sep,
    Sid,
    flatten_prenex,
    rule_shape,
    sep,
    unproductive_form,
)

# -- parse trees ---------------------------------------------------------------


@dataclass(frozen=True)
class ParseEdge:
    rule: str
    children: tuple["ParseNode", ...]


@dataclass(frozen=True)
class ParseNode:
    edges: tuple[ParseEdge, ...]


@dataclass(frozen=True)
class ParseTree:
    root: ParseNode
    pred: str

    def size(self) -> int:
        return _count_edges(self.root)

    def encoding(self):
        return (self.pred, _encode_node(self.root))

    def to_json(self) -> str:
        nodes: list[dict] = []
        edges: list[dict] = []

        def visit(node: ParseNode) -> int:
            nid = len(nodes)
            nodes.append({"id": nid})
            for e in node.edges:
                edges.append(
                    {
                        "id": len(edges),
                        "rule": e.rule,
                        "parent": nid,
                        "children": [visit(c) for c in e.children],
                    }
                )
            return nid

        visit(self.root)
        return json.dumps({"pred": self.pred, "nodes": nodes, "edges": edges}, indent=2)


def _count_edges(node: ParseNode) -> int:
    return sum(1 + sum(_count_edges(c) for c in e.children) for e in node.edges)


def _encode_node(node: ParseNode):
    return tuple(
        sorted((e.rule, tuple(_encode_node(c) for c in e.children)) for e in node.edges)
    )


def _normalize_node(edges: list[ParseEdge]) -> ParseNode:
    return ParseNode(
        tuple(sorted(edges, key=lambda e: (e.rule, tuple(_encode_node(c) for c in e.children))))
    )


def parse_tree(pred: str, node: ParseNode) -> ParseTree:
    return ParseTree(node, pred)


# -- enumeration ----------------------------------------------------------------


def enumerate_parse_trees(sid: Sid, pred: str, max_productive_edges: int) -> list[ParseTree]:
    """Every parse tree with at most the given number of productive edges,
    once per tree isomorphism class, ordered by size then encoding."""
    report = require_regular(sid)
    productive = report.productive
    memo: dict[tuple[str, int], list[tuple[int, ParseNode]]] = {}

    def for_pred(p: str, budget: int) -> list[tuple[int, ParseNode]]:
        if budget <= 0:
            return []
        key = (p, budget)
        if key in memo:
            return memo[key]
        out: dict = {}
        if p in productive:
            for rule in sid.rules_for(p):
                shape = rule_shape(rule)
                callees = [c.pred for c in shape.pred_atoms]
                for combo in _child_combos(callees, budget - 1, for_pred):
                    size = 1 + sum(s for s, _ in combo)
                    node = _normalize_node(
                        [ParseEdge(rule.name, tuple(n for _, n in combo))]
                    )
                    out.setdefault(_encode_node(node), (size, node))
        else:
            base_rules = [r for r in sid.rules_for(p) if unproductive_form(r) == "4"]
            ext_rules = [r for r in sid.rules_for(p) if unproductive_form(r) == "3"]
            ext_preds = sorted(
                {
                    next(a.pred for a in rule_shape(r).pred_atoms if a.pred != p)
                    for r in ext_rules
                }
            )
            for rule in base_rules:
                callees = [c.pred for c in rule_shape(rule).pred_atoms]
                for combo in _child_combos(callees, budget, for_pred):
                    base_size = sum(s for s, _ in combo)
                    base_edges = [e for _, n in combo for e in n.edges]
                    for ext_size, ext_edges in _extensions(
                        ext_preds, budget - base_size, for_pred
                    ):
                        node = _normalize_node(base_edges + ext_edges)
                        size = base_size + ext_size
                        out.setdefault(_encode_node(node), (size, node))
        memo[key] = sorted(
            out.values(), key=lambda sn: (sn[0], _encode_node(sn[1]))
        )
        return memo[key]

    result = [
        parse_tree(pred, node) for _, node in for_pred(pred, max_productive_edges)
    ]
    result.sort(key=lambda t: (t.size(), t.encoding()))
    return result


def _child_combos(callees, budget, for_pred):
    """All tuples of child trees for the given callees within the budget."""
    if not callees:
        return [()] if budget >= 0 else []
    out = []
    first, rest = callees[0], callees[1:]
    min_rest = len(rest)  # every subtree takes at least one productive edge
    for size, node in for_pred(first, budget - min_rest):
        for combo in _child_combos(rest, budget - size, for_pred):
            out.append(((size, node),) + combo)
    return out


def _extensions(ext_preds, budget, for_pred):
    """Multisets of extra subtrees reachable through parameter-passing
    recursion, as flattened edge lists."""
    candidates = []
    for q in ext_preds:
        for size, node in for_pred(q, budget):
            candidates.append((size, node))
    candidates.sort(key=lambda sn: (sn[0], _encode_node(sn[1])))
    out = [(0, [])]

    def extend(start: int, used: int, edges: list[ParseEdge]):
        for i in range(start, len(candidates)):
            size, node = candidates[i]
            if used + size > budget:
                continue
            new_edges = edges + list(node.edges)
            out.append((used + size, new_edges))
            extend(i, used + size, new_edges)

    extend(0, 0, [])
    return out


# -- characteristic formulas -----------------------------------------------------

_PARAM = "#p{}"  # positional placeholder for a subtree's free parameters


@dataclass(frozen=True)
class CharFormula:
    formula: Formula
    annotations: tuple[str, ...]  # annotated variable names, in introduction order

    def __str__(self):
        return str(self.formula)


def char_formula(sid: Sid, tree: ParseTree) -> CharFormula:
    """Quantifier- and predicate-free unfolding of a parse tree, each variable
    annotated with the edge that introduced it (edges numbered in DFS order)."""
    counter = itertools.count(1)
    annotated: list[str] = []

    def ann(var: str, tag: int) -> str:
        return f"{var}@e{tag}"

    def build(node: ParseNode, arity: int) -> Formula:
        parts: list[Formula] = []
        for edge in node.edges:
            rule = sid.rule_by_name(edge.rule)
            tag = next(counter)
            flat = flatten_prenex(rule.body)
            if flat is None:
                raise SidError(f"rule {rule.name} has no prenex body")
            _, atoms = flat
            for j in range(arity):
                parts.append(Eq(_PARAM.format(j + 1), ann(rule.params[j], tag)))
            for var in rule.params:
                annotated.append(ann(var, tag))
            for y in flat[0]:
                annotated.append(ann(y, tag))
            calls = []
            for atom in atoms:
                if isinstance(atom, RelAtom):
                    parts.append(
                        RelAtom(atom.label, tuple(ann(a, tag) for a in atom.args))
                    )
                elif isinstance(atom, Eq):
                    parts.append(Eq(ann(atom.left, tag), ann(atom.right, tag)))
                elif isinstance(atom, Neq):
                    parts.append(Neq(ann(atom.left, tag), ann(atom.right, tag)))
                elif isinstance(atom, Emp):
                    parts.append(Emp())
                else:
                    calls.append(atom)
            for call, child in zip(calls, edge.children):
                child_formula = build(child, len(call.args))
                mapping = {
                    _PARAM.format(k + 1): ann(arg, tag)
                    for k, arg in enumerate(call.args)
                }
                parts.append(_substitute_placeholders(child_formula, mapping))
        return sep(*parts)

    arity = sid.predicates()[tree.pred]
    formula = build(tree.root, arity)
    if arity:
        formula = _substitute_placeholders(
            formula, {_PARAM.format(j + 1): f"x{j + 1}" for j in range(arity)}
        )
    return CharFormula(formula, tuple(dict.fromkeys(annotated)))


def _substitute_placeholders(phi: Formula, mapping: dict[str, str]) -> Formula:
    if isinstance(phi, Emp):
        return phi
    if isinstance(phi, Eq):
        return Eq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, Neq):
        return Neq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, RelAtom):
        return RelAtom(phi.label, tuple(mapping.get(a, a) for a in phi.args))
    if isinstance(phi, Sep):
        return Sep(tuple(_substitute_placeholders(p, mapping) for p in phi.parts))
    raise SidError("characteristic formulas are quantifier-free")


# -- canonical models -------------------------------------------------------------


@dataclass(frozen=True)
class RichCanonicalModel:
    graph: CGraph  # over the alphabet extended with the disequality label
    tree: ParseTree
    store: dict[str, str]
    formula: CharFormula

    def projected(self, alphabet) -> CGraph:
        return project(self.graph, alphabet)


def rich_canonical_model(sid: Sid, tree: ParseTree) -> Optional[RichCanonicalModel]:
    """Canonical-store model of a parse tree's characteristic formula, with a
    disequality edge per forced-apart vertex pair; None when unsatisfiable."""
    if not is_equality_free(sid):
        raise NotEqualityFree("canonical models need an equality-free system")
    require_regular(sid)
    phi = char_formula(sid, tree)
    parts = _flatten_qpf(phi.formula)
    variables = sorted(
        {v for p in parts for v in _part_vars(p)} | set(phi.annotations)
    )
    parent = {v: v for v in variables}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in parts:
        if isinstance(p, Eq):
            a, b = find(p.left), find(p.right)
            if a != b:
                parent[max(a, b)] = min(a, b)
    rel_keys: dict[tuple, Label] = {}
    for p in parts:
        if isinstance(p, Neq) and find(p.left) == find(p.right):
            return None
        if isinstance(p, RelAtom):
            key = (p.label.name, tuple(find(a) for a in p.args))
            if key in rel_keys:
                return None
            rel_keys[key] = p.label
    reps = sorted({find(v) for v in variables})
    vertex = {rep: rep for rep in reps}
    edges = []
    k = 0
    for p in parts:
        if isinstance(p, RelAtom):
            edges.append((f"e{k}", p.label, tuple(vertex[find(a)] for a in p.args)))
            k += 1
    seen_pairs = set()
    d = 0
    for p in parts:
        if isinstance(p, Neq):
            pair = (vertex[find(p.left)], vertex[find(p.right)])
            if pair not in seen_pairs:
                seen_pairs.add(pair)
                edges.append((f"d{d}", diseq_label(), pair))
                d += 1
    graph = CGraph.build(vertex.values(), edges)
    store = {v: vertex[find(v)] for v in variables}
    return RichCanonicalModel(graph, tree, store, phi)


def _flatten_qpf(phi: Formula) -> list[Formula]:
    if isinstance(phi, Sep):
        return [q for p in phi.parts for q in _flatten_qpf(p)]
    if isinstance(phi, (Emp, Eq, Neq, RelAtom)):
        return [phi]
    raise SidError("characteristic formulas are quantifier- and predicate-free")


def _part_vars(p: Formula) -> tuple[str, ...]:
    if isinstance(p, (Eq, Neq)):
        return (p.left, p.right)
    if isinstance(p, RelAtom):
        return p.args
    return ()


@dataclass(frozen=True)
class CanonicalModelSet:
    rich: tuple[RichCanonicalModel, ...]
    projected: tuple[CGraph, ...]


def canonical_models(sid: Sid, pred: str, max_productive_edges: int) -> CanonicalModelSet:
    """Rich canonical models over all parse trees within the size bound,
    deduplicated up to isomorphism, with their projections to the base
    alphabet."""
    rich: list[RichCanonicalModel] = []
    seen = set()
    for tree in enumerate_parse_trees(sid, pred, max_productive_edges):
        model = rich_canonical_model(sid, tree)
        if model is None:
            continue
        key = canonical_form(model.graph)
        if key not in seen:
            seen.add(key)
            rich.append(model)
    projected = []
    seen_proj = set()
    for m in rich:
        g = m.projected(sid.alphabet)
        key = canonical_form(g)
        if key not in seen_proj:
            seen_proj.add(key)
            projected.append(g)
    return CanonicalModelSet(tuple(rich), tuple(projected))


# -- hyperedge-replacement grammars ------------------------------------------------


@dataclass(frozen=True)
class ProductiveRule:
    name: str
    head: str
    graph: CGraph
    nt_edges: tuple[str, ...]  # nonterminal edge ids, in child-position order


@dataclass(frozen=True)
class UnproductiveRule:
    name: str
    head: str
    rhs: tuple[str, ...]


GrammarRule = Union[ProductiveRule, UnproductiveRule]


@dataclass(frozen=True)
class HrGrammar:
    terminals: tuple[Label, ...]
    nonterminals: tuple[tuple[str, int], ...]  # (name, arity)
    rules: tuple[GrammarRule, ...]

    def arity(self, nt: str) -> int:
        for name, ar in self.nonterminals:
            if name == nt:
                return ar
        raise SidError(f"unknown nonterminal {nt!r}")

    def rule_by_name(self, name: str) -> GrammarRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise SidError(f"no grammar rule named {name!r}")

    def __post_init__(self):
        arities = dict(self.nonterminals)
        for r in self.rules:
            if isinstance(r, ProductiveRule):
                if r.graph.type_n != arities[r.head]:
                    raise SidError(f"rule {r.name}: graph type != head arity")
                for eid in r.nt_edges:
                    lab = r.graph.edge(eid).label
                    if arities.get(lab.name) != lab.arity:
                        raise SidError(f"rule {r.name}: bad nonterminal edge {eid}")
            else:
                n = arities[r.head]
                if any(arities[x] != n for x in r.rhs):
                    raise SidError(f"rule {r.name}: arities must all equal {n}")

    def to_json(self) -> str:
        from .graphs import to_json as graph_json

        doc = {
            "terminals": [{"name": l.name, "arity": l.arity} for l in self.terminals],
            "nonterminals": [{"name": n, "arity": a} for n, a in self.nonterminals],
            "rules": [
                {
                    "name": r.name,
                    "head": r.head,
                    **(
                        {"graph": json.loads(graph_json(r.graph)),
                         "nt_edges": list(r.nt_edges)}
                        if isinstance(r, ProductiveRule)
                        else {"parallel": list(r.rhs)}
                    ),
                }
                for r in self.rules
            ],
        }
        return json.dumps(doc, indent=2)


@dataclass(frozen=True)
class Gamma:
    """Rule bijection between a definition system and its grammar."""

    rule_map: dict[str, str]

    def translate(self, tree: ParseTree) -> ParseTree:
        def node(n: ParseNode) -> ParseNode:
            return ParseNode(
                tuple(
                    ParseEdge(self.rule_map[e.rule], tuple(node(c) for c in e.children))
                    for e in n.edges
                )
            )

        return ParseTree(node(tree.root), tree.pred)


def sid_to_grammar(sid: Sid) -> tuple[HrGrammar, Gamma]:
    """Rule-by-rule grammar extraction: per productive rule, a graph with one
    vertex per variable, one terminal edge per relation atom and one
    nonterminal edge per call, sourced at the parameters; unproductive rules
    become parallel compositions."""
    require_regular(sid)
    if not is_equality_free(sid):
        raise NotEqualityFree("grammar extraction needs an equality-free system")
    arities = sid.predicates()
    nonterminals = tuple(sorted(arities.items()))
    rules: list[GrammarRule] = []
    for rule in sid.rules:
        shape = rule_shape(rule)
        if unproductive_form(rule) in ("3", "4"):
            rules.append(
                UnproductiveRule(rule.name, rule.head, tuple(p.pred for p in shape.pred_atoms))
            )
            continue
        vertices = list(rule.params) + list(shape.existentials)
        edges = []
        for i, atom in enumerate(shape.rel_atoms):
            edges.append((f"t{i}", atom.label, atom.args))
        nt_edges = []
        for i, call in enumerate(shape.pred_atoms):
            if not call.args:
                raise NotRegular(f"rule {rule.name}: nullary call in productive body")
            eid = f"n{i}"
            nt_edges.append(eid)
            edges.append((eid, Label(call.pred, len(call.args)), call.args))
        graph = CGraph.build(vertices, edges, sources=rule.params)
        rules.append(ProductiveRule(rule.name, rule.head, graph, tuple(nt_edges)))
    grammar = HrGrammar(tuple(sid.alphabet), nonterminals, tuple(rules))
    return grammar, Gamma({r.name: r.name for r in sid.rules})


# -- derivation trees and evaluation ------------------------------------------------


@dataclass(frozen=True)
class DerivNode:
    """Derivation tree node: one rule application with one subtree per
    right-hand-side occurrence."""

    rule: str
    children: tuple["DerivNode", ...]


def derivation_normalize(grammar: HrGrammar, deriv: DerivNode) -> ParseTree:
    """Exhaustively splice out unproductive rule applications, reattaching
    their subtrees to the parent node."""

    def node_of(d: DerivNode) -> tuple[str, ParseNode]:
        rule = grammar.rule_by_name(d.rule)
        if isinstance(rule, UnproductiveRule):
            edges: list[ParseEdge] = []
            for child in d.children:
                _, sub = node_of(child)
                edges.extend(sub.edges)
            return rule.head, _normalize_node(edges)
        children = tuple(node_of(c)[1] for c in d.children)
        return rule.head, _normalize_node([ParseEdge(rule.name, children)])

    head, node = node_of(deriv)
    return ParseTree(node, head)


def eval_parse_tree(grammar: HrGrammar, tree: ParseTree) -> CGraph:
    """The graph a parse tree derives: substitute child values into the
    nonterminal edges of each productive rule graph, joining parallel
    siblings at their sources."""
    counter = itertools.count()

    def eval_node(node: ParseNode) -> CGraph:
        parts = []
        for edge in node.edges:
            rule = grammar.rule_by_name(edge.rule)
            if not isinstance(rule, ProductiveRule):
                raise SidError(f"parse trees carry productive rules only: {edge.rule}")
            prefix = f"i{next(counter)}_"
            host = rule.graph.rename(prefix)
            repl = {
                prefix + eid: eval_node(child)
                for eid, child in zip(rule.nt_edges, edge.children)
            }
            parts.append(substitute_many(host, repl))
        if not parts:
            raise SidError("parse tree nodes must carry at least one edge")
        n = parts[0].type_n
        return reduce(lambda a, b: parallel(a, b, n), parts)

    return eval_node(tree.root)
