"""Separation-style formulas over graph relations, inductive definition
systems, and model checking against finite c-graphs.

Separating conjunction splits a graph into composable parts; relation atoms
denote single-edge graphs; equalities and disequalities hold on empty parts
only; existentials range over the vertices of the subformula's own part.
The checker consequently matches relation-atom occurrences bijectively to
edges and confines leftover existentials to the vertices of their scope.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import ArityError, SidError, TooLarge, UndeclaredSymbol
from .graphs import CGraph, DISEQ_LABEL, Edge, Label


# -- formulas ----------------------------------------------------------------

@dataclass(frozen=True)
class Emp:
    def __str__(self):
        return "emp"


@dataclass(frozen=True)
class Eq:
    left: str
    right: str

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Neq:
    left: str
    right: str

    def __str__(self):
        return f"{self.left} != {self.right}"


@dataclass(frozen=True)
class RelAtom:
    label: Label
    args: tuple[str, ...]

    def __post_init__(self):
        if len(self.args) != self.label.arity:
            raise ArityError(
                f"{self.label.name}/{self.label.arity} used with {len(self.args)} arguments"
            )

    def __str__(self):
        return f"{self.label.name}({', '.join(self.args)})"


@dataclass(frozen=True)
class PredAtom:
    pred: str
    args: tuple[str, ...]

    def __str__(self):
        return f"{self.pred}({', '.join(self.args)})" if self.args else self.pred


@dataclass(frozen=True)
class Sep:
    parts: tuple["Formula", ...]

    def __str__(self):
        return " * ".join(
            f"({p})" if isinstance(p, Exists) else str(p) for p in self.parts
        )


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    body: "Formula"

    def __str__(self):
        return f"exists {' '.join(self.vars)} . {self.body}"


Formula = Union[Emp, Eq, Neq, RelAtom, PredAtom, Sep, Exists]


def sep(*parts: Formula) -> Formula:
    """Flattened separating conjunction; empty product is emp."""
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, Sep):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return Emp()
    if len(flat) == 1:
        return flat[0]
    return Sep(tuple(flat))


def fv(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Emp):
        return frozenset()
    if isinstance(phi, (Eq, Neq)):
        return frozenset({phi.left, phi.right})
    if isinstance(phi, (RelAtom, PredAtom)):
        return frozenset(phi.args)
    if isinstance(phi, Sep):
        return frozenset().union(*(fv(p) for p in phi.parts))
    if isinstance(phi, Exists):
        return fv(phi.body) - set(phi.vars)
    raise TypeError(phi)


def subst(phi: Formula, mapping: Mapping[str, str]) -> Formula:
    """Capture-avoiding substitution of free variables."""
    if isinstance(phi, Emp):
        return phi
    if isinstance(phi, Eq):
        return Eq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, Neq):
        return Neq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, RelAtom):
        return RelAtom(phi.label, tuple(mapping.get(a, a) for a in phi.args))
    if isinstance(phi, PredAtom):
        return PredAtom(phi.pred, tuple(mapping.get(a, a) for a in phi.args))
    if isinstance(phi, Sep):
        return Sep(tuple(subst(p, mapping) for p in phi.parts))
    if isinstance(phi, Exists):
        live = {k: v for k, v in mapping.items() if k not in phi.vars}
        taken = set(live.values()) | fv(phi)
        renames = {}
        for v in phi.vars:
            if v in live.values():
                fresh = v
                while fresh in taken:
                    fresh += "'"
                renames[v] = fresh
                taken.add(fresh)
        if renames:
            body = subst(phi.body, renames)
            new_vars = tuple(renames.get(v, v) for v in phi.vars)
        else:
            body, new_vars = phi.body, phi.vars
        return Exists(new_vars, subst(body, live))
    raise TypeError(phi)


def is_qpf(phi: Formula) -> bool:
    """Quantifier- and predicate-free."""
    if isinstance(phi, (Emp, Eq, Neq, RelAtom)):
        return True
    if isinstance(phi, Sep):
        return all(is_qpf(p) for p in phi.parts)
    return False


def flatten_prenex(phi: Formula) -> Optional[tuple[tuple[str, ...], list[Formula]]]:
    """Split ``exists ys . a1 * ... * ak`` into (ys, atoms); None if not flat."""
    ys: tuple[str, ...] = ()
    if isinstance(phi, Exists):
        ys, phi = phi.vars, phi.body
        while isinstance(phi, Exists):
            ys, phi = ys + phi.vars, phi.body
    parts = list(phi.parts) if isinstance(phi, Sep) else [phi]
    if not all(isinstance(p, (Emp, Eq, Neq, RelAtom, PredAtom)) for p in parts):
        return None
    if len(set(ys)) != len(ys):
        return None
    return ys, parts


# -- definition systems -------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    head: str
    params: tuple[str, ...]
    body: Formula
    name: str = ""

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise SidError(f"rule for {self.head}: parameters must be distinct")
        extra = fv(self.body) - set(self.params)
        if extra:
            raise SidError(
                f"rule for {self.head}: free variables {sorted(extra)} are not parameters"
            )


@dataclass(frozen=True)
class Sid:
    alphabet: tuple[Label, ...]
    rules: tuple[Rule, ...]

    def __post_init__(self):
        names = [lab.name for lab in self.alphabet]
        if len(set(names)) != len(names):
            raise SidError("alphabet label names must be unique")
        if DISEQ_LABEL in names:
            from .errors import ReservedLabel

            raise ReservedLabel(f"{DISEQ_LABEL!r} is reserved for disequality edges")
        arities = self.predicates()
        labels = {lab.name: lab for lab in self.alphabet}
        named = []
        counter: dict[str, int] = {}
        for rule in self.rules:
            if not rule.name:
                i = counter.get(rule.head, 0)
                counter[rule.head] = i + 1
                rule = Rule(rule.head, rule.params, rule.body, f"{rule.head}#{i}")
            named.append(rule)
            _check_atoms(rule.body, labels, arities)
        object.__setattr__(self, "rules", tuple(named))

    def predicates(self) -> dict[str, int]:
        preds: dict[str, int] = {}
        for rule in self.rules:
            arity = len(rule.params)
            if preds.setdefault(rule.head, arity) != arity:
                raise ArityError(f"predicate {rule.head} declared with two arities")
        return preds

    def rules_for(self, pred: str) -> list[Rule]:
        return [r for r in self.rules if r.head == pred]

    def rule_by_name(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise SidError(f"no rule named {name!r}")

    def label(self, name: str) -> Label:
        for lab in self.alphabet:
            if lab.name == name:
                return lab
        raise UndeclaredSymbol(f"label {name!r} not in alphabet")


def _check_atoms(phi: Formula, labels: dict[str, Label], preds: dict[str, int]):
    if isinstance(phi, RelAtom):
        known = labels.get(phi.label.name)
        if known is None:
            raise UndeclaredSymbol(f"relation {phi.label.name!r} not in alphabet")
        if known.arity != phi.label.arity:
            raise ArityError(f"relation {phi.label.name} arity mismatch")
    elif isinstance(phi, PredAtom):
        if phi.pred not in preds:
            raise UndeclaredSymbol(f"predicate {phi.pred!r} has no defining rule")
        if preds[phi.pred] != len(phi.args):
            raise ArityError(
                f"predicate {phi.pred}/{preds[phi.pred]} used with {len(phi.args)} arguments"
            )
    elif isinstance(phi, Sep):
        for p in phi.parts:
            _check_atoms(p, labels, preds)
    elif isinstance(phi, Exists):
        _check_atoms(phi.body, labels, preds)


# -- rule classification (regular definition forms) ---------------------------

@dataclass(frozen=True)
class RuleShape:
    """Decomposition of a prenex rule body into its atom groups."""

    existentials: tuple[str, ...]
    rel_atoms: tuple[RelAtom, ...]
    pred_atoms: tuple[PredAtom, ...]
    pures: tuple[Union[Eq, Neq], ...]
    emp_count: int


def rule_shape(rule: Rule) -> Optional[RuleShape]:
    flat = flatten_prenex(rule.body)
    if flat is None:
        return None
    ys, parts = flat
    rel = tuple(p for p in parts if isinstance(p, RelAtom))
    preds = tuple(p for p in parts if isinstance(p, PredAtom))
    pures = tuple(p for p in parts if isinstance(p, (Eq, Neq)))
    emp = sum(1 for p in parts if isinstance(p, Emp))
    return RuleShape(ys, rel, preds, pures, emp)


def atoms_connect_all_vars(shape: RuleShape, vars_: Sequence[str]) -> bool:
    """All variables linked by chains of relation atoms sharing a variable."""
    vars_ = list(vars_)
    if len(vars_) < 2:
        return True
    covered = set().union(*(set(a.args) for a in shape.rel_atoms)) if shape.rel_atoms else set()
    if not set(vars_) <= covered:
        return False
    reach = {vars_[0]}
    moved = True
    while moved:
        moved = False
        for a in shape.rel_atoms:
            grp = set(a.args)
            if grp & reach and not grp <= reach:
                reach |= grp
                moved = True
    return set(vars_) <= reach


def is_form_1(rule: Rule) -> bool:
    shape = rule_shape(rule)
    return (
        shape is not None
        and not shape.existentials
        and not shape.pred_atoms
        and not shape.pures
        and shape.emp_count == 0
        and len(shape.rel_atoms) == 1
    )


def unproductive_form(rule: Rule) -> Optional[str]:
    """"3", "4", or None, by body shape alone (productivity checked later)."""
    shape = rule_shape(rule)
    if shape is None or shape.existentials or shape.rel_atoms or shape.pures:
        return None
    if shape.emp_count:
        return None
    calls = shape.pred_atoms
    if not calls:
        return None
    if any(p.args != rule.params for p in calls):
        return None
    self_calls = [p for p in calls if p.pred == rule.head]
    if len(calls) == 2 and len(self_calls) == 1:
        return "3"
    if not self_calls:
        return "4"
    return None


def productive_candidate(rule: Rule) -> bool:
    """Shaped like a productive rule: a single relation atom, or a prenex
    body that is not a bare conjunction of predicate atoms."""
    if is_form_1(rule):
        return True
    shape = rule_shape(rule)
    if shape is None:
        return False
    return bool(
        shape.rel_atoms
        or shape.existentials
        or shape.pures
        or shape.emp_count
        or not shape.pred_atoms
    )


def infer_productive(sid: Sid) -> set[str]:
    """Predicates having at least one productively shaped rule."""
    return {r.head for r in sid.rules if productive_candidate(r)}


# -- quantifier- and predicate-free satisfiability -----------------------------

class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the lexicographically least name as representative
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _qpf_parts(phi: Formula) -> list[Formula]:
    if isinstance(phi, Sep):
        out = []
        for p in phi.parts:
            out.extend(_qpf_parts(p))
        return out
    if isinstance(phi, (Emp, Eq, Neq, RelAtom)):
        return [phi]
    raise SidError("formula is not quantifier- and predicate-free")


def sat_qpf(phi: Formula) -> Optional[tuple[CGraph, dict[str, str]]]:
    """A canonical-store model of a qpf formula, or None when unsatisfiable.

    Unsatisfiable exactly when the equality closure forces a disequality
    x != x or makes two same-label relation atoms coincide.
    """
    parts = _qpf_parts(phi)
    uf = _UnionFind(fv(phi))
    for p in parts:
        if isinstance(p, Eq):
            uf.union(p.left, p.right)
    atoms: dict[tuple, tuple] = {}
    for p in parts:
        if isinstance(p, Neq) and uf.find(p.left) == uf.find(p.right):
            return None
        if isinstance(p, RelAtom):
            key = (p.label.name, tuple(uf.find(a) for a in p.args))
            if key in atoms:
                return None
            atoms[key] = p.label
    reps = sorted({uf.find(v) for v in fv(phi)})
    vertex = {rep: f"v{i}" for i, rep in enumerate(reps)}
    edges = [
        (f"e{i}", atoms[key], tuple(vertex[r] for r in key[1]))
        for i, key in enumerate(sorted(atoms))
    ]
    graph = CGraph.build(vertex.values(), edges)
    store = {v: vertex[uf.find(v)] for v in fv(phi)}
    return graph, store


# -- model checking ------------------------------------------------------------

class ModelVerdict(enum.Enum):
    TRUE = "true"
    FALSE_AT_FUEL = "false-at-fuel"

    def __bool__(self) -> bool:
        return self is ModelVerdict.TRUE


def default_fuel(g: CGraph, sid: Optional[Sid]) -> int:
    n_rules = len(sid.rules) if sid else 0
    return 2 * (len(g.vertices) + len(g.edges)) + n_rules


@dataclass
class _Goal:
    rel: list[tuple[Label, tuple[str, ...], frozenset[str]]]
    pures: list[tuple[str, str, str]]  # ("eq"|"neq", x, y)
    pending: list[tuple[str, tuple[str, ...], frozenset[str]]]
    existentials: list[str]


class _Checker:
    def __init__(self, g: CGraph, sid: Optional[Sid], store: Mapping[str, str]):
        self.g = g
        self.sid = sid
        self.store = dict(store)
        self.counter = itertools.count()
        self.exhausted = False
        self.edge_index: dict[str, list[Edge]] = {}
        for e in g.edges:
            self.edge_index.setdefault(e.label.name, []).append(e)

    def fresh(self, base: str) -> str:
        return f"{base}${next(self.counter)}"

    def _walk(self, phi: Formula, env: dict[str, str], scopes: frozenset[str], goal: _Goal):
        if isinstance(phi, Emp):
            return
        if isinstance(phi, Eq):
            goal.pures.append(("eq", env.get(phi.left, phi.left), env.get(phi.right, phi.right)))
        elif isinstance(phi, Neq):
            goal.pures.append(("neq", env.get(phi.left, phi.left), env.get(phi.right, phi.right)))
        elif isinstance(phi, RelAtom):
            goal.rel.append(
                (phi.label, tuple(env.get(a, a) for a in phi.args), scopes)
            )
        elif isinstance(phi, PredAtom):
            goal.pending.append(
                (phi.pred, tuple(env.get(a, a) for a in phi.args), scopes)
            )
        elif isinstance(phi, Sep):
            for p in phi.parts:
                self._walk(p, env, scopes, goal)
        elif isinstance(phi, Exists):
            inner = dict(env)
            opened = set(scopes)
            for v in phi.vars:
                name = self.fresh(v)
                inner[v] = name
                goal.existentials.append(name)
                opened.add(name)
            self._walk(phi.body, inner, frozenset(opened), goal)
        else:
            raise TypeError(phi)

    def expand(self, goal: _Goal, fuel: int) -> bool:
        if len(goal.rel) > len(self.g.edges):
            return False
        if not goal.pending:
            return self._match(goal)
        if fuel <= 0:
            self.exhausted = True
            return False
        pred, args, scopes = goal.pending[0]
        rest = goal.pending[1:]
        for rule in self.sid.rules_for(pred) if self.sid else []:
            sub = _Goal(list(goal.rel), list(goal.pures), list(rest), list(goal.existentials))
            env = dict(zip(rule.params, args))
            self._walk(rule.body, env, scopes, sub)
            if self.expand(sub, fuel - 1):
                return True
        return False

    # -- atom/edge matching --

    def _match(self, goal: _Goal) -> bool:
        g = self.g
        if len(goal.rel) != len(g.edges):
            return False
        atoms = {(e.label.name, e.attach) for e in g.edges}
        if len(atoms) != len(g.edges):
            return False  # non-simple graphs satisfy no formula
        covered = set()
        for e in g.edges:
            covered.update(e.attach)
        if covered != set(g.vertices):
            return False  # vertices outside any edge can never be produced
        by_label: dict[str, int] = {}
        for lab, _, _ in goal.rel:
            by_label[lab.name] = by_label.get(lab.name, 0) + 1
        for name, count in by_label.items():
            if len(self.edge_index.get(name, [])) != count:
                return False

        order = sorted(range(len(goal.rel)), key=lambda i: goal.rel[i][0].name)
        assign: dict[str, str] = dict(self.store)
        used: set[str] = set()
        matched_edges: list[Optional[Edge]] = [None] * len(goal.rel)

        def place(k: int) -> bool:
            if k == len(order):
                return self._finish(goal, assign, matched_edges)
            i = order[k]
            lab, args, _ = goal.rel[i]
            for e in self.edge_index.get(lab.name, []):
                if e.id in used:
                    continue
                binds = []
                ok = True
                for a, v in zip(args, e.attach):
                    if a in assign:
                        if assign[a] != v:
                            ok = False
                            break
                    else:
                        assign[a] = v
                        binds.append(a)
                if ok:
                    used.add(e.id)
                    matched_edges[i] = e
                    if place(k + 1):
                        return True
                    used.discard(e.id)
                    matched_edges[i] = None
                for a in binds:
                    del assign[a]
            return False

        return place(0)

    def _finish(self, goal: _Goal, assign: dict[str, str], matched) -> bool:
        # any existential not fixed by an atom must denote a vertex of its scope
        loose = [v for v in goal.existentials if v not in assign]

        def scope_vertices(var: str) -> list[str]:
            vs = set()
            for i, (_, _, scopes) in enumerate(goal.rel):
                if var in scopes:
                    vs.update(matched[i].attach)
            return sorted(vs)

        def assign_loose(k: int) -> bool:
            if k == len(loose):
                return self._pures_hold(goal, assign)
            var = loose[k]
            for v in scope_vertices(var):
                assign[var] = v
                if assign_loose(k + 1):
                    return True
                del assign[var]
            return False

        return assign_loose(0)

    @staticmethod
    def _pures_hold(goal: _Goal, assign: dict[str, str]) -> bool:
        for kind, x, y in goal.pures:
            vx, vy = assign.get(x), assign.get(y)
            if vx is None or vy is None:
                return False
            if kind == "eq" and vx != vy:
                return False
            if kind == "neq" and vx == vy:
                return False
        return True


def slr_models(
    g: CGraph,
    store: Mapping[str, str],
    phi: Formula,
    sid: Optional[Sid] = None,
    fuel: Optional[int] = None,
) -> ModelVerdict:
    """Fuel-bounded satisfaction check ``g |= phi`` under ``store``.

    TRUE answers are sound for the least-fixed-point reading; FALSE_AT_FUEL
    means no derivation exists within ``fuel`` predicate unfoldings, which is
    definitive once fuel reaches 2(|V|+|E|) plus the rule count for regular
    definition systems.
    """
    for var, val in store.items():
        if val not in g.vertices:
            raise SidError(f"store maps {var!r} outside the graph")
    missing = fv(phi) - set(store)
    if missing:
        raise SidError(f"store does not cover free variables {sorted(missing)}")
    if fuel is None:
        fuel = default_fuel(g, sid)
    checker = _Checker(g, sid, store)
    goal = _Goal([], [], [], [])
    checker._walk(phi, {}, frozenset(), goal)
    if checker.expand(goal, fuel):
        return ModelVerdict.TRUE
    return ModelVerdict.FALSE_AT_FUEL


def holds(g: CGraph, phi: Formula, sid: Optional[Sid] = None,
          fuel: Optional[int] = None) -> bool:
    """Sentence satisfaction with an empty store."""
    return bool(slr_models(g, {}, phi, sid, fuel))


# -- brute-force model enumeration (oracle) ------------------------------------

def _achievable_label_counts(sid: Sid, root: str, cap: int) -> set[tuple[int, ...]]:
    """Exact per-label relation-atom count vectors of root unfoldings, up to
    ``cap`` per component (saturating)."""
    labels = sorted(lab.name for lab in sid.alphabet)
    idx = {name: i for i, name in enumerate(labels)}
    dims = len(labels)
    sets: dict[str, set[tuple[int, ...]]] = {p: set() for p in sid.predicates()}

    def body_counts(rule: Rule) -> Optional[tuple[tuple[int, ...], list[str]]]:
        shape = rule_shape(rule)
        if shape is None:
            return None
        base = [0] * dims
        for a in shape.rel_atoms:
            base[idx[a.label.name]] += 1
        return tuple(base), [p.pred for p in shape.pred_atoms]

    prepared = [body_counts(r) for r in sid.rules]
    changed = True
    while changed:
        changed = False
        for rule, prep in zip(sid.rules, prepared):
            if prep is None:
                continue
            base, callees = prep
            options = [sets[c] for c in callees]
            if any(not o for o in options):
                continue
            for combo in itertools.product(*options):
                vec = list(base)
                for c in combo:
                    for i in range(dims):
                        vec[i] = min(vec[i] + c[i], cap + 1)
                vec = tuple(vec)
                if vec not in sets[rule.head]:
                    sets[rule.head].add(vec)
                    changed = True
    return sets.get(root, set())


def definitely_connected_models(sid: Sid) -> bool:
    """Conservative check that every nonempty model of the system is connected."""
    for rule in sid.rules:
        shape = rule_shape(rule)
        if shape is None:
            return False
        if any(not p.args for p in shape.pred_atoms):
            return False
    valid = set(sid.predicates())
    changed = True
    while changed:
        changed = False
        for rule in sid.rules:
            if rule.head not in valid:
                continue
            shape = rule_shape(rule)
            vars_ = list(rule.params) + list(shape.existentials)
            groups = [set(a.args) for a in shape.rel_atoms]
            groups += [set(p.args) for p in shape.pred_atoms if p.pred in valid]
            occupied = set().union(*groups) if groups else set()
            ok = set(vars_) <= occupied
            if ok and len(vars_) > 1:
                reach = {vars_[0]}
                moved = True
                while moved:
                    moved = False
                    for grp in groups:
                        if grp & reach and not grp <= reach:
                            reach |= grp
                            moved = True
                ok = set(vars_) <= reach
            if not ok:
                valid.discard(rule.head)
                changed = True
    return set(sid.predicates()) <= valid


def enumerate_models_bruteforce(
    sid: Sid,
    root: str,
    max_vertices: int,
    max_edges: Optional[int] = None,
    *,
    vertex_limit: int = 6,
    fuel: Optional[int] = None,
) -> list[CGraph]:
    """All simple type-0 models of a nullary predicate up to isomorphism,
    with at most ``max_vertices`` vertices, by exhaustive graph generation
    filtered through the model checker.

    ``max_edges`` defaults to the simplicity bound (every possible atom once);
    callers with a justified tighter bound should pass it for speed.
    """
    if sid.predicates().get(root) != 0:
        raise SidError(f"{root} is not a nullary predicate")
    if max_vertices > vertex_limit:
        raise TooLarge(
            f"max_vertices {max_vertices} exceeds the soft limit {vertex_limit}"
        )
    labels = sorted(sid.alphabet, key=lambda lab: lab.name)
    out: list[CGraph] = []

    if holds(CGraph.empty(), PredAtom(root, ()), sid, fuel):
        out.append(CGraph.empty())

    connected_only = definitely_connected_models(sid)
    global_cap = sum(max_vertices ** lab.arity for lab in labels)
    if max_edges is not None:
        global_cap = min(global_cap, max_edges)
    all_achievable = _achievable_label_counts(sid, root, global_cap)

    for nv in range(1, max_vertices + 1):
        simplicity_cap = sum(nv ** lab.arity for lab in labels)
        cap = simplicity_cap if max_edges is None else min(max_edges, simplicity_cap)
        achievable = {
            vec
            for vec in all_achievable
            if sum(vec) <= cap and all(c <= cap for c in vec)
        }
        per_label_universe = [
            list(itertools.product(range(nv), repeat=lab.arity)) for lab in labels
        ]
        vectors = sorted(
            vec
            for vec in achievable
            if all(c <= len(u) for c, u in zip(vec, per_label_universe))
        )
        perms = [
            {i: p[i] for i in range(nv)}
            for p in itertools.permutations(range(nv))
        ]
        seen_keys: set = set()
        for vec in vectors:
            choices = [
                itertools.combinations(universe, count)
                for universe, count in zip(per_label_universe, vec)
            ]
            for picked in itertools.product(*choices):
                edges = [
                    (lab, att)
                    for lab, group in zip(labels, picked)
                    for att in group
                ]
                touched = {v for _, att in edges for v in att}
                if len(touched) != nv:
                    continue
                if connected_only and not _attach_connected(edges, nv):
                    continue
                key = min(
                    tuple(sorted((lab.name, tuple(p[v] for v in att))
                                 for lab, att in edges))
                    for p in perms
                )
                if key in seen_keys:
                    continue
                seen_keys.add(key)
                g = CGraph.build(
                    [f"v{i}" for i in range(nv)],
                    [
                        (f"e{k}", lab, tuple(f"v{i}" for i in att))
                        for k, (lab, att) in enumerate(edges)
                    ],
                )
                if holds(g, PredAtom(root, ()), sid, fuel):
                    out.append(g)
    return out


def _attach_connected(edges: list[tuple[Label, tuple[int, ...]]], nv: int) -> bool:
    if nv <= 1:
        return True
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, att in edges:
        for v in att[1:]:
            parent[find(v)] = find(att[0])
    return len({find(v) for v in range(nv)}) == 1
