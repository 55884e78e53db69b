"""Parser for the .sid surface syntax.

    alphabet b/2, c/2 ;
    A() <= exists y1 y2 y3 . b(y1,y2) * c(y3,y2) * B(y1,y3) ;
    B(x1,x2) <= exists y . b(x1,x2) * c(y,x2) * B(x1,y) ;
    B(x1,x2) <= b(x1,x2) ;

Comments start with '#'.  Equality is written "x = y", disequality "x != y".
Names in atom position resolve against the alphabet first, then against the
rule heads; anything else is an undeclared symbol.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import ArityError, ReservedLabel, SidSyntaxError, UndeclaredSymbol
from .graphs import DISEQ_LABEL, Label
from . import slr

_TOKEN = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<arrow><=)
      | (?P<neq>!=)
      | (?P<punct>[(),;.*/=])
      | (?P<int>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SidSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            out.append(_Tok(kind if kind != "punct" else value, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    out.append(_Tok("eof", "", line, col))
    return out


@dataclass
class _Atom:
    """Unresolved atom; the name is classified after all heads are known."""

    name: str
    args: tuple[str, ...]
    parens: bool
    line: int
    col: int


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.next()
        if t.kind != kind:
            raise SidSyntaxError(f"expected {kind!r}, found {t.value!r}", t.line, t.col)
        return t

    def parse(self) -> slr.Sid:
        alphabet = self.alphabet_decl()
        raw_rules = []
        while self.peek().kind != "eof":
            raw_rules.append(self.rule())
        heads = {head for head, _, _ in raw_rules}
        labels = {lab.name: lab for lab in alphabet}
        rules = tuple(
            slr.Rule(head, params, self.resolve(body, labels, heads))
            for head, params, body in raw_rules
        )
        return slr.Sid(tuple(alphabet), rules)

    def alphabet_decl(self) -> list[Label]:
        t = self.expect("ident")
        if t.value != "alphabet":
            raise SidSyntaxError("file must start with an alphabet declaration", t.line, t.col)
        labels = []
        while self.peek().kind != ";":
            name = self.expect("ident")
            self.expect("/")
            arity = self.expect("int")
            if name.value == DISEQ_LABEL:
                raise ReservedLabel(
                    f"{DISEQ_LABEL!r} is reserved and cannot be declared"
                )
            labels.append(Label(name.value, int(arity.value)))
            if self.peek().kind == ",":
                self.next()
        self.expect(";")
        return labels

    def rule(self):
        head = self.expect("ident")
        params: tuple[str, ...] = ()
        if self.peek().kind == "(":
            self.next()
            names = []
            while self.peek().kind != ")":
                names.append(self.expect("ident").value)
                if self.peek().kind == ",":
                    self.next()
            self.next()
            params = tuple(names)
        self.expect("arrow")
        body = self.formula()
        self.expect(";")
        return head.value, params, body

    def formula(self):
        t = self.peek()
        if t.kind == "ident" and t.value == "exists":
            self.next()
            names = []
            while self.peek().kind == "ident":
                name = self.next()
                if name.value in ("exists", "emp", "alphabet"):
                    raise SidSyntaxError(
                        f"{name.value!r} cannot be a variable", name.line, name.col
                    )
                names.append(name.value)
            if not names:
                raise SidSyntaxError("exists needs at least one variable", t.line, t.col)
            self.expect(".")
            return ("exists", tuple(names), self.formula())
        return self.sepchain()

    def sepchain(self):
        parts = [self.term()]
        while self.peek().kind == "*":
            self.next()
            parts.append(self.term())
        return ("sep", parts) if len(parts) > 1 else parts[0]

    def term(self):
        t = self.next()
        if t.kind == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if t.kind != "ident":
            raise SidSyntaxError(f"expected an atom, found {t.value!r}", t.line, t.col)
        if t.value == "emp":
            return ("emp",)
        if t.value == "exists":
            self.i -= 1
            inner = self.formula()
            return inner
        nxt = self.peek()
        if nxt.kind == "(":
            self.next()
            args = []
            while self.peek().kind != ")":
                args.append(self.expect("ident").value)
                if self.peek().kind == ",":
                    self.next()
            self.next()
            return _Atom(t.value, tuple(args), True, t.line, t.col)
        if nxt.kind == "=":
            self.next()
            rhs = self.expect("ident")
            return ("eq", t.value, rhs.value)
        if nxt.kind == "neq":
            self.next()
            rhs = self.expect("ident")
            return ("neq", t.value, rhs.value)
        return _Atom(t.value, (), False, t.line, t.col)

    def resolve(self, node, labels: dict[str, Label], heads: set[str]) -> slr.Formula:
        if isinstance(node, _Atom):
            if node.name in labels:
                lab = labels[node.name]
                if len(node.args) != lab.arity:
                    raise ArityError(
                        f"{node.line}:{node.col}: relation {node.name}/{lab.arity} "
                        f"used with {len(node.args)} arguments"
                    )
                return slr.RelAtom(lab, node.args)
            if node.name in heads:
                return slr.PredAtom(node.name, node.args)
            kind = "relation or predicate" if node.parens else "predicate"
            raise UndeclaredSymbol(
                f"{node.line}:{node.col}: {node.name!r} is not a declared {kind}"
            )
        tag = node[0]
        if tag == "emp":
            return slr.Emp()
        if tag == "eq":
            return slr.Eq(node[1], node[2])
        if tag == "neq":
            return slr.Neq(node[1], node[2])
        if tag == "sep":
            return slr.sep(*(self.resolve(p, labels, heads) for p in node[1]))
        if tag == "exists":
            return slr.Exists(node[1], self.resolve(node[2], labels, heads))
        raise AssertionError(node)


def parse_sid(text: str) -> slr.Sid:
    """Parse .sid text; diagnostics carry line and column."""
    return _Parser(text).parse()
