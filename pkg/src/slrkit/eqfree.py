"""Equality elimination for inductive definition systems.

Explicit equalities are saturated per rule and substituted away.  A rule
that equates two of its head parameters moves to a split predicate variant
recording the parameter-aliasing pattern; call sites are rewritten to target
the variants, merging caller-side variables as required.  A first pass
computes which aliasing patterns are ever forced, so an already equality-free
system comes back unchanged apart from rule naming.  The output contains no
equalities and no predicate atom with a repeated variable, and defines the
same models for every nullary predicate.
"""
from __future__ import annotations

import itertools

from .errors import SidError
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
    sep,
)

Pattern = tuple[int, ...]  # restricted growth string over argument positions


def identity_pattern(arity: int) -> Pattern:
    return tuple(range(arity))


def pattern_classes(pattern: Pattern) -> list[list[int]]:
    classes: dict[int, list[int]] = {}
    for pos, block in enumerate(pattern):
        classes.setdefault(block, []).append(pos)
    return [classes[b] for b in sorted(classes)]


def refines(finer: Pattern, coarser: Pattern) -> bool:
    """Every class of ``finer`` lies inside one class of ``coarser``."""
    image = {}
    for pos in range(len(finer)):
        if finer[pos] in image and image[finer[pos]] != coarser[pos]:
            return False
        image[finer[pos]] = coarser[pos]
    return True


def is_equality_free(sid: Sid) -> bool:
    def check(phi: Formula) -> bool:
        if isinstance(phi, Eq):
            return False
        if isinstance(phi, PredAtom):
            return len(set(phi.args)) == len(phi.args)
        if isinstance(phi, Sep):
            return all(check(p) for p in phi.parts)
        if isinstance(phi, Exists):
            return check(phi.body)
        return True

    return all(check(r.body) for r in sid.rules)


class _Saturation:
    """Union-find over one rule's variables, preferring parameter reps."""

    def __init__(self, rule: Rule, existentials):
        self.rule = rule
        self.order = list(rule.params) + list(existentials)
        self.rank = {v: i for i, v in enumerate(self.order)}
        self.parent = {v: v for v in self.order}

    def find(self, x: str) -> str:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[rb] < self.rank[ra]:
            ra, rb = rb, ra
        self.parent[rb] = ra

    def clone(self) -> "_Saturation":
        c = _Saturation.__new__(_Saturation)
        c.rule, c.order, c.rank = self.rule, self.order, self.rank
        c.parent = dict(self.parent)
        return c

    def pattern_of(self, args) -> Pattern:
        reps = [self.find(a) for a in args]
        seen: dict[str, int] = {}
        return tuple(seen.setdefault(r, len(seen)) for r in reps)


def _prepare(rule: Rule):
    flat = flatten_prenex(rule.body)
    if flat is None:
        raise SidError(f"rule {rule.name}: equality elimination needs prenex bodies")
    ys, parts = flat
    return ys, parts


def _saturate(rule: Rule, pattern: Pattern):
    ys, parts = _prepare(rule)
    sat = _Saturation(rule, ys)
    for cls in pattern_classes(pattern):
        for pos in cls[1:]:
            sat.union(rule.params[cls[0]], rule.params[pos])
    for p in parts:
        if isinstance(p, Eq):
            sat.union(p.left, p.right)
    calls = [p for p in parts if isinstance(p, PredAtom)]
    return sat, parts, calls


def _needed_patterns(sid: Sid) -> dict[str, set[Pattern]]:
    """Aliasing patterns (beyond identity) any derivation can force."""
    arities = sid.predicates()
    needed: dict[str, set[Pattern]] = {p: set() for p in arities}
    changed = True
    while changed:
        changed = False
        for rule in sid.rules:
            head_patterns = {identity_pattern(len(rule.params))} | {
                p for p in needed[rule.head]
            }
            for pattern in sorted(head_patterns):
                sat0, parts, calls = _saturate(rule, pattern)
                options = []
                for call in calls:
                    sigma0 = sat0.pattern_of(call.args)
                    opts = {sigma0} | {
                        t for t in needed[call.pred] if refines(sigma0, t)
                    }
                    options.append(sorted(opts))
                for combo in itertools.product(*options):
                    sat = sat0.clone()
                    for call, tau in zip(calls, combo):
                        for cls in pattern_classes(tau):
                            for pos in cls[1:]:
                                sat.union(call.args[cls[0]], call.args[pos])
                    induced = sat.pattern_of(rule.params)
                    if induced != identity_pattern(len(rule.params)):
                        if induced not in needed[rule.head]:
                            needed[rule.head].add(induced)
                            changed = True
                    for call, tau in zip(calls, combo):
                        final = sat.pattern_of(call.args)
                        if final != identity_pattern(len(call.args)):
                            if final not in needed[call.pred]:
                                needed[call.pred].add(final)
                                changed = True
    return needed


def _variant_name(pred: str, pattern: Pattern, taken: set[str]) -> str:
    if pattern == identity_pattern(len(pattern)):
        return pred
    tags = [
        "".join(str(pos + 1) for pos in cls)
        for cls in pattern_classes(pattern)
        if len(cls) > 1
    ]
    name = f"{pred}__{'_'.join(tags)}"
    while name in taken:
        name += "_"
    return name


def equality_eliminate(sid: Sid) -> Sid:
    """Equivalent system with no equalities and no repeated-variable calls."""
    arities = sid.predicates()
    needed = _needed_patterns(sid)
    names: dict[tuple[str, Pattern], str] = {}
    taken = set(arities)
    for pred in sorted(arities):
        names[(pred, identity_pattern(arities[pred]))] = pred
    for pred in sorted(needed):
        for pattern in sorted(needed[pred]):
            name = _variant_name(pred, pattern, taken)
            taken.add(name)
            names[(pred, pattern)] = name

    out_rules: list[Rule] = []
    emitted = set()
    for (pred, pattern), head_name in sorted(names.items()):
        for rule in sid.rules_for(pred):
            for inst in _instances(sid, names, needed, rule, pattern):
                params, body = inst
                sig = (head_name, params, str(body))
                if sig not in emitted:
                    emitted.add(sig)
                    out_rules.append(Rule(head_name, params, body))
    out_rules = _trim_ruleless(out_rules)
    for pred, arity in sorted(arities.items()):
        if not any(r.head == pred for r in out_rules):
            keeper = _unsatisfiable_rule(sid, pred, arity)
            if keeper is not None:
                out_rules.append(keeper)
    result = Sid(sid.alphabet, tuple(out_rules))
    assert is_equality_free(result)
    return result


def _calls(phi: Formula) -> list[str]:
    if isinstance(phi, PredAtom):
        return [phi.pred]
    if isinstance(phi, Sep):
        return [c for p in phi.parts for c in _calls(p)]
    if isinstance(phi, Exists):
        return _calls(phi.body)
    return []


def _trim_ruleless(rules: list[Rule]) -> list[Rule]:
    """Drop rules that call a predicate without rules; such calls have no
    models, so the enclosing rule contributes nothing."""
    while True:
        defined = {r.head for r in rules}
        kept = [r for r in rules if all(c in defined for c in _calls(r.body))]
        if len(kept) == len(rules):
            return kept
        rules = kept


def _unsatisfiable_rule(sid: Sid, pred: str, arity: int):
    """A rule with no models, keeping a predicate syntactically declared."""
    if not sid.alphabet:
        return None
    lab = sorted(sid.alphabet, key=lambda l: l.name)[0]
    params = tuple(f"x{i + 1}" for i in range(arity))
    taken = set(params)
    z = "z"
    while z in taken:
        z += "'"
    atom = RelAtom(lab, (z,) * lab.arity)
    return Rule(pred, params, Exists((z,), sep(atom, atom)))


def _instances(sid, names, needed, rule: Rule, pattern: Pattern):
    sat0, parts, calls = _saturate(rule, pattern)
    ys = _prepare(rule)[0]
    options = []
    for call in calls:
        sigma0 = sat0.pattern_of(call.args)
        opts = {sigma0} | {t for t in needed[call.pred] if refines(sigma0, t)}
        options.append(sorted(opts))
    for combo in itertools.product(*options):
        sat = sat0.clone()
        for call, tau in zip(calls, combo):
            for cls in pattern_classes(tau):
                for pos in cls[1:]:
                    sat.union(call.args[cls[0]], call.args[pos])
        if sat.pattern_of(rule.params) != pattern:
            continue
        if any(
            sat.pattern_of(call.args) != tau for call, tau in zip(calls, combo)
        ):
            continue
        rep = sat.find
        rel, neqs, body_calls = [], [], []
        seen_rel = set()
        unsat = False
        for p in parts:
            if isinstance(p, RelAtom):
                atom = RelAtom(p.label, tuple(rep(a) for a in p.args))
                if atom in seen_rel:
                    unsat = True  # the same atom twice never has a model
                    break
                seen_rel.add(atom)
                rel.append(atom)
            elif isinstance(p, Neq):
                l, r = rep(p.left), rep(p.right)
                if l == r:
                    unsat = True
                    break
                if all((l, r) != (q.left, q.right) for q in neqs):
                    neqs.append(Neq(l, r))
        if unsat:
            continue
        for call, tau in zip(calls, combo):
            args = tuple(rep(call.args[cls[0]]) for cls in pattern_classes(tau))
            body_calls.append(PredAtom(names[(call.pred, tau)], args))
        params = tuple(rep(rule.params[cls[0]]) for cls in pattern_classes(pattern))
        binder = tuple(y for y in ys if rep(y) == y)
        matrix = sep(*(rel + neqs + body_calls))
        body = Exists(binder, matrix) if binder else matrix
        yield params, body
