"""Controlled structural perturbations of ground-truth formulas.

Five kinds: quantifier swap, per-atom negation toggle, and/or swap, operator
removal (atoms rejoined by disjunction), and generic renaming of all textual
values.  Every perturbation is deterministic and reports whether it applied.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .syntax import (
    And, Atom, Const, Exists, ForAll, Formula, Func, Iff, Implies, Not, Or,
    Equals, Term, Var, Xor, atoms, profile, subformulas,
)


class EmptyCorpus(ValueError):
    pass


class PerturbationKind(enum.Enum):
    OP_QUANTIFIER = "op-quantifier"
    OP_NEGATION = "op-negation"
    OP_ANDOR = "op-andor"
    TEXT_MINUS_OPERATOR = "t-operator"
    TEXT_MINUS_VARIABLE = "t-variable"


@dataclass(frozen=True)
class PerturbationOutcome:
    kind: PerturbationKind
    applied: bool
    result: Formula | None
    sites: int


def _outcome(kind: PerturbationKind, result: Formula | None, sites: int) -> PerturbationOutcome:
    applied = sites >= 1
    return PerturbationOutcome(kind, applied, result if applied else None, sites)


def perturb_quantifier(f: Formula) -> PerturbationOutcome:
    """Swap every universal quantifier with an existential one and vice versa."""
    sites = 0

    def walk(g: Formula) -> Formula:
        nonlocal sites
        if isinstance(g, ForAll):
            sites += 1
            return Exists(g.var, walk(g.body))
        if isinstance(g, Exists):
            sites += 1
            return ForAll(g.var, walk(g.body))
        return _map_children(g, walk)

    result = walk(f)
    return _outcome(PerturbationKind.OP_QUANTIFIER, result, sites)


def perturb_negation(f: Formula) -> PerturbationOutcome:
    """Toggle negation on every predicate: drop an atom-adjacent Not, else add one.

    Negations over compound subformulas are left untouched; equality nodes are
    not predicates and keep their polarity.
    """
    sites = 0

    def walk(g: Formula) -> Formula:
        nonlocal sites
        if isinstance(g, Not) and isinstance(g.body, Atom):
            sites += 1
            return g.body
        if isinstance(g, Atom):
            sites += 1
            return Not(g)
        return _map_children(g, walk)

    result = walk(f)
    return _outcome(PerturbationKind.OP_NEGATION, result, sites)


def perturb_andor(f: Formula) -> PerturbationOutcome:
    """Swap every conjunction with a disjunction and vice versa."""
    sites = 0

    def walk(g: Formula) -> Formula:
        nonlocal sites
        if isinstance(g, And):
            sites += 1
            return Or(walk(g.lhs), walk(g.rhs))
        if isinstance(g, Or):
            sites += 1
            return And(walk(g.lhs), walk(g.rhs))
        return _map_children(g, walk)

    result = walk(f)
    return _outcome(PerturbationKind.OP_ANDOR, result, sites)


def perturb_text_minus_operator(f: Formula) -> PerturbationOutcome:
    """Drop all operators; chain the atoms (negations stripped) with Or.

    Atom argument lists are preserved verbatim.  Not applied when the formula
    has no operators, or no atoms to keep.
    """
    n_ops = profile(f).total
    collected = atoms(f)
    if n_ops == 0 or not collected:
        return PerturbationOutcome(PerturbationKind.TEXT_MINUS_OPERATOR, False, None, 0)
    result: Formula = collected[0]
    for atom in collected[1:]:
        result = Or(result, atom)
    return PerturbationOutcome(PerturbationKind.TEXT_MINUS_OPERATOR, True, result, n_ops)


class _NamePool:
    """Fresh generic names: A..Z, then A1, A2, ... once the alphabet runs out."""

    def __init__(self):
        self.index = 0

    def next(self) -> str:
        i = self.index
        self.index += 1
        if i < 26:
            return chr(ord("A") + i)
        return f"A{i - 25}"


def perturb_text_minus_variable(f: Formula) -> PerturbationOutcome:
    """Replace every textual value with a generic name, consistently.

    Predicates take A, B, C, ... in first-occurrence order; constants, free
    variables, and function names continue the same sequence.  Names bound by
    a quantifier are preserved.
    """
    pool = _NamePool()
    pred_map: dict[str, str] = {}
    term_map: dict[str, str] = {}
    sites = 0

    bound: list[str] = []

    def is_bound(name: str) -> bool:
        return name in bound

    # Predicates consume the pool first, in pre-order.
    for atom in atoms(f):
        if atom.name not in pred_map:
            pred_map[atom.name] = pool.next()

    def rename_term(t: Term) -> Term:
        nonlocal sites
        if isinstance(t, Var):
            if is_bound(t.name):
                return t
            sites += 1
            if t.name not in term_map:
                term_map[t.name] = pool.next()
            return Const(term_map[t.name])
        if isinstance(t, Const):
            sites += 1
            if t.name not in term_map:
                term_map[t.name] = pool.next()
            return Const(term_map[t.name])
        sites += 1
        if t.name not in term_map:
            term_map[t.name] = pool.next()
        return Func(term_map[t.name], tuple(rename_term(a) for a in t.args))

    def walk(g: Formula) -> Formula:
        nonlocal sites
        if isinstance(g, Atom):
            sites += 1
            return Atom(pred_map[g.name], tuple(rename_term(a) for a in g.args))
        if isinstance(g, Equals):
            return Equals(rename_term(g.lhs), rename_term(g.rhs))
        if isinstance(g, (ForAll, Exists)):
            bound.append(g.var)
            try:
                body = walk(g.body)
            finally:
                bound.pop()
            return type(g)(g.var, body)
        return _map_children(g, walk)

    result = walk(f)
    return _outcome(PerturbationKind.TEXT_MINUS_VARIABLE, result, sites)


_PERTURBERS = {
    PerturbationKind.OP_QUANTIFIER: perturb_quantifier,
    PerturbationKind.OP_NEGATION: perturb_negation,
    PerturbationKind.OP_ANDOR: perturb_andor,
    PerturbationKind.TEXT_MINUS_OPERATOR: perturb_text_minus_operator,
    PerturbationKind.TEXT_MINUS_VARIABLE: perturb_text_minus_variable,
}


def perturb(f: Formula, kind: PerturbationKind) -> PerturbationOutcome:
    return _PERTURBERS[kind](f)


def applicability_report(corpus: list[Formula],
                         kinds: list[PerturbationKind] | None = None) -> dict[PerturbationKind, float]:
    """Percentage of records each perturbation applies to, to two decimals."""
    if not corpus:
        raise EmptyCorpus("applicability over an empty corpus")
    kinds = kinds or list(PerturbationKind)
    report: dict[PerturbationKind, float] = {}
    for kind in kinds:
        applied = sum(1 for f in corpus if perturb(f, kind).applied)
        report[kind] = round(100.0 * applied / len(corpus), 2)
    return report


def _map_children(g: Formula, walk) -> Formula:
    if isinstance(g, (And, Or, Implies, Iff, Xor)):
        return type(g)(walk(g.lhs), walk(g.rhs))
    if isinstance(g, Not):
        return Not(walk(g.body))
    if isinstance(g, (ForAll, Exists)):
        return type(g)(g.var, walk(g.body))
    return g  # Atom or Equals: leaf at the formula level
