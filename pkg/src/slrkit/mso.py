"""Monadic second-order formulas over edge relations, and their evaluation
on finite c-graphs.

Each edge label ``a`` of arity r contributes a relation ``edg_a`` of arity
r+1 whose first argument is the edge itself.  First-order variables range
over vertices and edges; second-order variables over finite subsets of both.
Set quantification enumerates subsets, so evaluation is exponential and
guarded by a soft limit; quantified subformulas are memoized on the values
of their free variables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import MsoError, TooLarge
from .graphs import CGraph, Label


@dataclass(frozen=True)
class MsoTrue:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class MsoFalse:
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class MsoEq:
    left: str
    right: str

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class MsoEdg:
    label: Label
    args: tuple[str, ...]  # length arity + 1; first names the edge

    def __post_init__(self):
        if len(self.args) != self.label.arity + 1:
            raise MsoError(
                f"edg_{self.label.name} takes {self.label.arity + 1} arguments"
            )

    def __str__(self):
        return f"edg_{self.label.name}({', '.join(self.args)})"


@dataclass(frozen=True)
class MsoMember:
    setvar: str
    var: str

    def __str__(self):
        return f"{self.setvar}({self.var})"


@dataclass(frozen=True)
class MsoNot:
    body: "MsoFormula"

    def __str__(self):
        return f"!({self.body})"


@dataclass(frozen=True)
class MsoAnd:
    parts: tuple["MsoFormula", ...]

    def __str__(self):
        return " & ".join(f"({p})" for p in self.parts)


@dataclass(frozen=True)
class MsoExistsFO:
    var: str
    body: "MsoFormula"

    def __str__(self):
        return f"exists {self.var} . ({self.body})"


@dataclass(frozen=True)
class MsoExistsSO:
    var: str
    body: "MsoFormula"

    def __str__(self):
        return f"existsS {self.var} . ({self.body})"


MsoFormula = Union[
    MsoTrue, MsoFalse, MsoEq, MsoEdg, MsoMember, MsoNot, MsoAnd, MsoExistsFO, MsoExistsSO
]


def mso_and(*parts: MsoFormula) -> MsoFormula:
    flat = []
    for p in parts:
        if isinstance(p, MsoAnd):
            flat.extend(p.parts)
        elif isinstance(p, MsoTrue):
            continue
        else:
            flat.append(p)
    if not flat:
        return MsoTrue()
    if len(flat) == 1:
        return flat[0]
    return MsoAnd(tuple(flat))


def mso_or(*parts: MsoFormula) -> MsoFormula:
    if not parts:
        return MsoFalse()
    return MsoNot(mso_and(*(MsoNot(p) for p in parts)))


def mso_implies(a: MsoFormula, b: MsoFormula) -> MsoFormula:
    return mso_or(MsoNot(a), b)


def mso_forall_fo(var: str, body: MsoFormula) -> MsoFormula:
    return MsoNot(MsoExistsFO(var, MsoNot(body)))


def mso_forall_so(var: str, body: MsoFormula) -> MsoFormula:
    return MsoNot(MsoExistsSO(var, MsoNot(body)))


def mso_fv(phi: MsoFormula) -> frozenset[str]:
    if isinstance(phi, (MsoTrue, MsoFalse)):
        return frozenset()
    if isinstance(phi, MsoEq):
        return frozenset({phi.left, phi.right})
    if isinstance(phi, MsoEdg):
        return frozenset(phi.args)
    if isinstance(phi, MsoMember):
        return frozenset({phi.setvar, phi.var})
    if isinstance(phi, MsoNot):
        return mso_fv(phi.body)
    if isinstance(phi, MsoAnd):
        return frozenset().union(*(mso_fv(p) for p in phi.parts))
    if isinstance(phi, (MsoExistsFO, MsoExistsSO)):
        return mso_fv(phi.body) - {phi.var}
    raise TypeError(phi)


def check_kinds(phi: MsoFormula, fo: frozenset[str] = frozenset(),
                so: frozenset[str] = frozenset()):
    """Verify first/second-order variable usage; free names must be declared."""
    if isinstance(phi, (MsoTrue, MsoFalse)):
        return
    if isinstance(phi, MsoEq):
        for v in (phi.left, phi.right):
            if v not in fo:
                raise MsoError(f"unbound first-order variable {v!r}")
    elif isinstance(phi, MsoEdg):
        for v in phi.args:
            if v not in fo:
                raise MsoError(f"unbound first-order variable {v!r}")
    elif isinstance(phi, MsoMember):
        if phi.setvar not in so:
            raise MsoError(f"unbound second-order variable {phi.setvar!r}")
        if phi.var not in fo:
            raise MsoError(f"unbound first-order variable {phi.var!r}")
    elif isinstance(phi, MsoNot):
        check_kinds(phi.body, fo, so)
    elif isinstance(phi, MsoAnd):
        for p in phi.parts:
            check_kinds(p, fo, so)
    elif isinstance(phi, MsoExistsFO):
        if phi.var in so:
            raise MsoError(f"{phi.var!r} used both first- and second-order")
        check_kinds(phi.body, fo | {phi.var}, so)
    elif isinstance(phi, MsoExistsSO):
        if phi.var in fo:
            raise MsoError(f"{phi.var!r} used both first- and second-order")
        check_kinds(phi.body, fo, so | {phi.var})
    else:
        raise TypeError(phi)


# -- evaluation -------------------------------------------------------------------

_UNKNOWN = object()


class MsoEvaluator:
    """Satisfaction on one c-graph; reusable across formulas and stores."""

    def __init__(self, g: CGraph, so_limit: int = 14, memo_limit: int = 2_000_000):
        self.graph = g
        self.elements = sorted(g.vertices) + sorted(e.id for e in g.edges)
        self.index = {el: i for i, el in enumerate(self.elements)}
        self.full_mask = (1 << len(self.elements)) - 1
        self.edge_info = {e.id: (e.label.name, e.attach) for e in g.edges}
        self.so_limit = so_limit
        self.memo_limit = memo_limit
        self.memo: dict = {}
        self.fv_cache: dict = {}

    def fv(self, phi: MsoFormula) -> frozenset[str]:
        got = self.fv_cache.get(phi)
        if got is None:
            got = mso_fv(phi)
            self.fv_cache[phi] = got
        return got

    def check_so_budget(self):
        if len(self.elements) > self.so_limit:
            raise TooLarge(
                f"{len(self.elements)} elements exceed the set-quantification "
                f"limit {self.so_limit}"
            )

    def evaluate(self, phi: MsoFormula, store: Mapping[str, object]) -> bool:
        env = {}
        for var, val in store.items():
            if isinstance(val, (set, frozenset)):
                mask = 0
                for el in val:
                    mask |= 1 << self.index[el]
                env[var] = mask
            else:
                if val not in self.index:
                    raise MsoError(f"store maps {var!r} outside the graph")
                env[var] = val
        missing = self.fv(phi) - set(env)
        if missing:
            raise MsoError(f"store does not cover {sorted(missing)}")
        return self._eval(phi, env)

    def _key(self, phi: MsoFormula, env: dict) -> Optional[tuple]:
        fvs = self.fv(phi)
        try:
            return (phi, tuple(sorted((v, env[v]) for v in fvs)))
        except KeyError:
            return None

    def _eval(self, phi: MsoFormula, env: dict) -> bool:
        if isinstance(phi, MsoTrue):
            return True
        if isinstance(phi, MsoFalse):
            return False
        if isinstance(phi, MsoEq):
            return env[phi.left] == env[phi.right]
        if isinstance(phi, MsoEdg):
            info = self.edge_info.get(env[phi.args[0]])
            if info is None or info[0] != phi.label.name:
                return False
            return info[1] == tuple(env[a] for a in phi.args[1:])
        if isinstance(phi, MsoMember):
            return bool(env[phi.setvar] >> self.index[env[phi.var]] & 1)
        if isinstance(phi, MsoNot):
            return not self._eval(phi.body, env)
        if isinstance(phi, MsoAnd):
            return all(self._eval(p, env) for p in phi.parts)
        if isinstance(phi, MsoExistsFO):
            key = self._key(phi, env)
            if key in self.memo:
                return self.memo[key]
            result = False
            for el in self.elements:
                env[phi.var] = el
                if self._eval(phi.body, env):
                    result = True
                    break
            env.pop(phi.var, None)
            if key is not None and len(self.memo) < self.memo_limit:
                self.memo[key] = result
            return result
        if isinstance(phi, MsoExistsSO):
            self.check_so_budget()
            key = self._key(phi, env)
            if key in self.memo:
                return self.memo[key]
            result = False
            for mask in range(self.full_mask + 1):
                env[phi.var] = mask
                if self._eval(phi.body, env):
                    result = True
                    break
            env.pop(phi.var, None)
            if key is not None and len(self.memo) < self.memo_limit:
                self.memo[key] = result
            return result
        raise TypeError(phi)

    # three-valued evaluation under a partial second-order assignment

    def eval3(self, phi: MsoFormula, env: dict):
        if isinstance(phi, (MsoTrue, MsoFalse, MsoEq, MsoEdg)):
            return self._eval(phi, env)
        if isinstance(phi, MsoMember):
            if phi.setvar not in env:
                return _UNKNOWN
            return self._eval(phi, env)
        if isinstance(phi, MsoNot):
            sub = self.eval3(phi.body, env)
            return _UNKNOWN if sub is _UNKNOWN else not sub
        if isinstance(phi, MsoAnd):
            unknown = False
            for p in phi.parts:
                sub = self.eval3(p, env)
                if sub is False:
                    return False
                if sub is _UNKNOWN:
                    unknown = True
            return _UNKNOWN if unknown else True
        if isinstance(phi, MsoExistsFO):
            unknown = False
            for el in self.elements:
                env2 = dict(env)
                env2[phi.var] = el
                sub = self.eval3(phi.body, env2)
                if sub is True:
                    return True
                if sub is _UNKNOWN:
                    unknown = True
            return _UNKNOWN if unknown else False
        if isinstance(phi, MsoExistsSO):
            self.check_so_budget()
            unknown = False
            for mask in range(self.full_mask + 1):
                env2 = dict(env)
                env2[phi.var] = mask
                sub = self.eval3(phi.body, env2)
                if sub is True:
                    return True
                if sub is _UNKNOWN:
                    unknown = True
            return _UNKNOWN if unknown else False
        raise TypeError(phi)


def mso_eval(
    g: CGraph,
    store: Mapping[str, object],
    phi: MsoFormula,
    so_limit: int = 14,
) -> bool:
    """Satisfaction of ``phi`` on ``g`` under ``store`` (sets as frozensets)."""
    return MsoEvaluator(g, so_limit=so_limit).evaluate(phi, store)


# -- library shorthands --------------------------------------------------------------


def edge_test(x: str, alphabet: Iterable[Label], fresh: str = "_w") -> MsoFormula:
    """x denotes an edge (of any label)."""
    cases = []
    for lab in sorted(alphabet, key=lambda l: l.name):
        args = [x] + [f"{fresh}{i}" for i in range(lab.arity)]
        body: MsoFormula = MsoEdg(lab, tuple(args))
        for v in reversed(args[1:]):
            body = MsoExistsFO(v, body)
        cases.append(body)
    return mso_or(*cases)


def vert(x: str, alphabet: Iterable[Label], fresh: str = "_w") -> MsoFormula:
    """x denotes a vertex: anything that is not an edge."""
    return MsoNot(edge_test(x, alphabet, fresh))


def single(setvar: str, fresh: str = "_s") -> MsoFormula:
    x, y = f"{fresh}x", f"{fresh}y"
    return MsoExistsFO(
        x,
        mso_and(
            MsoMember(setvar, x),
            mso_forall_fo(y, mso_implies(MsoMember(setvar, y), MsoEq(y, x))),
        ),
    )


def incid(label: Label, i: int, x: str, y: str, fresh: str = "_z") -> MsoFormula:
    """x is a ``label`` edge whose i-th attachment (1-based) is y."""
    if not 1 <= i <= label.arity:
        raise MsoError(f"incid position {i} out of range for {label.name}")
    zs = [f"{fresh}{j}" for j in range(1, label.arity + 1)]
    body = mso_and(MsoEdg(label, (x, *zs)), MsoEq(y, zs[i - 1]))
    for z in reversed(zs):
        body = MsoExistsFO(z, body)
    return body


def mso1_atom(label: Label, args: tuple[str, ...], fresh: str = "_e") -> MsoFormula:
    """Vertex-level atom a(x1..xr), desugared to an edge quantification."""
    if len(args) != label.arity:
        raise MsoError(f"{label.name}/{label.arity} used with {len(args)} arguments")
    return MsoExistsFO(fresh, MsoEdg(label, (fresh, *args)))
