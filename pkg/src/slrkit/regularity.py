"""Syntactic regularity check for inductive definition systems.

A system is regular when its rules split into productive forms (a single
relation atom over parameters, or an existentially quantified body whose
predicate calls each receive a fresh variable and whose relation atoms chain
all variables together) and unproductive forms (parameter-passing recursion
``P <= P * Q`` and joins ``P <= Q1 * ... * Qk``), with the productive
predicate set consistent across all rules.
"""
from __future__ import annotations

from dataclasses import dataclass

from .slr import (
    Rule,
    Sid,
    atoms_connect_all_vars,
    infer_productive,
    is_form_1,
    productive_candidate,
    rule_shape,
    unproductive_form,
)


@dataclass(frozen=True)
class Violation:
    rule: str
    condition: str  # "form", "2a", "2b", "3", "4", "partition"
    message: str


@dataclass(frozen=True)
class RegularityReport:
    is_regular: bool
    productive: frozenset[str]
    violations: tuple[Violation, ...]

    def to_doc(self) -> dict:
        return {
            "regular": self.is_regular,
            "productive": sorted(self.productive),
            "violations": [
                {"rule": v.rule, "condition": v.condition, "message": v.message}
                for v in self.violations
            ],
        }


def check_regular(sid: Sid) -> RegularityReport:
    """Infer the productive predicates and verify every rule's form."""
    productive = infer_productive(sid)
    violations: list[Violation] = []

    for rule in sid.rules:
        shape = rule_shape(rule)
        if shape is None:
            violations.append(
                Violation(
                    rule.name,
                    "form",
                    "rule body is not a prenex separated conjunction of atoms",
                )
            )
            continue
        if rule.head in productive:
            if unproductive_form(rule) in ("3", "4"):
                violations.append(
                    Violation(
                        rule.name,
                        "partition",
                        f"{rule.head} mixes productive and unproductive rules",
                    )
                )
                continue
            if is_form_1(rule):
                continue
            ys = set(shape.existentials)
            bad_call = next(
                (p for p in shape.pred_atoms if not (set(p.args) & ys)), None
            )
            if bad_call is not None:
                violations.append(
                    Violation(
                        rule.name,
                        "2a",
                        f"call {bad_call} uses no existential variable",
                    )
                )
                continue
            vars_ = list(rule.params) + list(shape.existentials)
            if not atoms_connect_all_vars(shape, vars_):
                violations.append(
                    Violation(
                        rule.name,
                        "2b",
                        "relation atoms do not chain all variables together",
                    )
                )
        else:
            form = unproductive_form(rule)
            has_self = any(
                p.pred == rule.head for p in shape.pred_atoms
            )
            if form is None:
                violations.append(
                    Violation(
                        rule.name,
                        "3" if has_self else "4",
                        "calls must pass the parameters unchanged, in order",
                    )
                )
                continue
            callees = [
                p.pred for p in shape.pred_atoms if p.pred != rule.head
            ] if form == "3" else [p.pred for p in shape.pred_atoms]
            missing = [q for q in callees if q not in productive]
            if missing:
                violations.append(
                    Violation(
                        rule.name,
                        form,
                        f"referenced predicates {missing} are not productive",
                    )
                )
    return RegularityReport(
        not violations, frozenset(productive), tuple(violations)
    )


def require_regular(sid: Sid) -> RegularityReport:
    from .errors import NotRegular

    report = check_regular(sid)
    if not report.is_regular:
        first = report.violations[0]
        raise NotRegular(
            f"rule {first.rule} violates condition {first.condition}: {first.message}"
        )
    return report
