"""Logical-equivalence scoring by truth-value agreement over finite domains.

A pair of formulas is grounded over a small domain; the score is the fraction
of interpretations (exhaustively enumerated when small, sampled with a fixed
seed otherwise) on which the two formulas have the same truth value.
Candidate predicate symbols are first aligned to gold symbols by normalized
edit similarity so that surface renamings ("Eel" vs "IsEel") stay comparable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .syntax import (
    And, Atom, Const, Equals, Exists, ForAll, Formula, Func, Iff, Implies,
    Not, Or, ParseError, Term, Var, Xor, parse_text,
)


class SyntaxInvalid(ValueError):
    pass


class GroundingOverflow(RuntimeError):
    pass


class UnusedQuantifiedVariable(ValueError):
    def __init__(self, var: str):
        super().__init__(f"quantified variable {var!r} is never used in its body")
        self.var = var


@dataclass(frozen=True)
class LEConfig:
    domain_size: int = 3
    exhaustive_atom_limit: int = 16
    sample_count: int = 2048
    seed: int = 17
    predicate_align_threshold: float = 0.5

    def __post_init__(self):
        if self.domain_size < 1:
            raise ValueError("domain_size must be >= 1")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")


DEFAULT_LE_CONFIG = LEConfig()


@dataclass(frozen=True)
class SyntaxReport:
    valid: bool
    error: Exception | None = None


def _find_unused_quantified(f: Formula) -> str | None:
    """Name of a quantified variable that never occurs in its body, if any."""
    if isinstance(f, (ForAll, Exists)):
        if not _uses_var(f.body, f.var):
            return f.var
        return _find_unused_quantified(f.body)
    if isinstance(f, Not):
        return _find_unused_quantified(f.body)
    if isinstance(f, (And, Or, Implies, Iff, Xor)):
        return (_find_unused_quantified(f.lhs)
                or _find_unused_quantified(f.rhs))
    return None


def _uses_var(f: Formula, name: str) -> bool:
    if isinstance(f, (ForAll, Exists)):
        if f.var == name:  # rebinding shadows the outer variable
            return False
        return _uses_var(f.body, name)
    if isinstance(f, Not):
        return _uses_var(f.body, name)
    if isinstance(f, (And, Or, Implies, Iff, Xor)):
        return _uses_var(f.lhs, name) or _uses_var(f.rhs, name)
    if isinstance(f, Atom):
        return any(_term_uses_var(t, name) for t in f.args)
    if isinstance(f, Equals):
        return _term_uses_var(f.lhs, name) or _term_uses_var(f.rhs, name)
    return False


def _term_uses_var(t: Term, name: str) -> bool:
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Func):
        return any(_term_uses_var(a, name) for a in t.args)
    return False


def syntax_check(source: str, notation: str = "mixed") -> SyntaxReport:
    """Parse and verify that each quantified variable is used in its body."""
    try:
        f = parse_text(source, notation)
    except (ParseError, ValueError) as err:
        return SyntaxReport(False, err)
    unused = _find_unused_quantified(f)
    if unused is not None:
        return SyntaxReport(False, UnusedQuantifiedVariable(unused))
    return SyntaxReport(True, None)


def check_formula(f: Formula) -> None:
    """Raise SyntaxInvalid when a quantified variable is unused."""
    unused = _find_unused_quantified(f)
    if unused is not None:
        raise SyntaxInvalid(f"quantified variable {unused!r} unused in its body")


# ---------------------------------------------------------------------------
# Predicate alignment
# ---------------------------------------------------------------------------

def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        curr = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            curr.append(min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost))
        prev = curr
    return prev[-1]


def name_similarity(a: str, b: str) -> float:
    """Normalized edit similarity in [0, 1]; 1.0 for identical names."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def align_predicates(gold_names: set[str], cand_names: set[str],
                     threshold: float) -> dict[str, str]:
    """Greedy highest-similarity-first map from candidate to gold names.

    Pairs below ``threshold`` stay unmatched (the candidate name survives).
    Ties break lexicographically so the alignment is deterministic.
    """
    pairs = sorted(
        ((name_similarity(g, c), g, c) for g in gold_names for c in cand_names),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    mapping: dict[str, str] = {}
    taken_gold: set[str] = set()
    for sim, g, c in pairs:
        if sim < threshold:
            break
        if c in mapping or g in taken_gold:
            continue
        mapping[c] = g
        taken_gold.add(g)
    return mapping


def _rename_predicates(f: Formula, mapping: dict[str, str]) -> Formula:
    if isinstance(f, Atom):
        return Atom(mapping.get(f.name, f.name), f.args)
    if isinstance(f, Not):
        return Not(_rename_predicates(f.body, mapping))
    if isinstance(f, (And, Or, Implies, Iff, Xor)):
        return type(f)(_rename_predicates(f.lhs, mapping),
                       _rename_predicates(f.rhs, mapping))
    if isinstance(f, (ForAll, Exists)):
        return type(f)(f.var, _rename_predicates(f.body, mapping))
    return f


def predicate_names(f: Formula) -> set[str]:
    names: set[str] = set()
    _collect_preds(f, names)
    return names


def _collect_preds(f: Formula, out: set[str]) -> None:
    if isinstance(f, Atom):
        out.add(f.name)
    elif isinstance(f, Not):
        _collect_preds(f.body, out)
    elif isinstance(f, (And, Or, Implies, Iff, Xor)):
        _collect_preds(f.lhs, out)
        _collect_preds(f.rhs, out)
    elif isinstance(f, (ForAll, Exists)):
        _collect_preds(f.body, out)


# ---------------------------------------------------------------------------
# Grounding and truth-value agreement
# ---------------------------------------------------------------------------

_EXPANSION_NODE_CAP = 2_000_000


def _collect_symbols(f: Formula, consts: set[str], funcs: set[tuple[str, int]],
                     free_vars: set[str], bound: tuple[str, ...] = ()) -> None:
    if isinstance(f, Atom):
        for t in f.args:
            _collect_term_symbols(t, consts, funcs, free_vars, bound)
    elif isinstance(f, Equals):
        _collect_term_symbols(f.lhs, consts, funcs, free_vars, bound)
        _collect_term_symbols(f.rhs, consts, funcs, free_vars, bound)
    elif isinstance(f, Not):
        _collect_symbols(f.body, consts, funcs, free_vars, bound)
    elif isinstance(f, (And, Or, Implies, Iff, Xor)):
        _collect_symbols(f.lhs, consts, funcs, free_vars, bound)
        _collect_symbols(f.rhs, consts, funcs, free_vars, bound)
    elif isinstance(f, (ForAll, Exists)):
        _collect_symbols(f.body, consts, funcs, free_vars, bound + (f.var,))


def _collect_term_symbols(t: Term, consts, funcs, free_vars, bound) -> None:
    if isinstance(t, Const):
        consts.add(t.name)
    elif isinstance(t, Var):
        if t.name not in bound:
            free_vars.add(t.name)
    elif isinstance(t, Func):
        funcs.add((t.name, len(t.args)))
        for a in t.args:
            _collect_term_symbols(a, consts, funcs, free_vars, bound)


class _Grounder:
    """Expand quantifiers over the finite domain into a propositional DAG.

    Leaves are integer ids of distinct ground atoms; inner nodes are tuples
    ("op", child...).  Only usable when no function symbols are present.
    """

    def __init__(self, domain_size: int, assignment: dict[str, int]):
        self.d = domain_size
        self.assignment = assignment  # constants and free variables
        self.atom_ids: dict[tuple, int] = {}
        self.nodes = 0

    def atom_id(self, key: tuple) -> int:
        if key not in self.atom_ids:
            self.atom_ids[key] = len(self.atom_ids)
        return self.atom_ids[key]

    def ground(self, f: Formula, env: dict[str, int]):
        self.nodes += 1
        if self.nodes > _EXPANSION_NODE_CAP:
            raise GroundingOverflow("quantifier expansion exceeds the node cap")
        if isinstance(f, Atom):
            vals = tuple(self.term_value(t, env) for t in f.args)
            return self.atom_id((f.name, len(f.args), vals))
        if isinstance(f, Equals):
            return ("const", self.term_value(f.lhs, env) == self.term_value(f.rhs, env))
        if isinstance(f, Not):
            return ("not", self.ground(f.body, env))
        if isinstance(f, (And, Or, Implies, Iff, Xor)):
            op = type(f).__name__.lower()
            return (op, self.ground(f.lhs, env), self.ground(f.rhs, env))
        if isinstance(f, ForAll):
            parts = [self.ground(f.body, {**env, f.var: e}) for e in range(self.d)]
            return ("all", *parts)
        if isinstance(f, Exists):
            parts = [self.ground(f.body, {**env, f.var: e}) for e in range(self.d)]
            return ("any", *parts)
        raise TypeError(f"unknown formula node: {f!r}")

    def term_value(self, t: Term, env: dict[str, int]) -> int:
        if isinstance(t, Var):
            if t.name in env:
                return env[t.name]
            return self.assignment[t.name]
        if isinstance(t, Const):
            return self.assignment[t.name]
        raise GroundingOverflow("function terms cannot be statically grounded")


def _eval_dag(node, columns: np.ndarray) -> np.ndarray:
    """Evaluate a grounded DAG over a boolean assignment matrix (rows = interps)."""
    if isinstance(node, int):
        return columns[:, node]
    op = node[0]
    if op == "const":
        return np.full(columns.shape[0], node[1], dtype=bool)
    if op == "not":
        return ~_eval_dag(node[1], columns)
    if op == "all":
        out = _eval_dag(node[1], columns)
        for child in node[2:]:
            out = out & _eval_dag(child, columns)
        return out
    if op == "any":
        out = _eval_dag(node[1], columns)
        for child in node[2:]:
            out = out | _eval_dag(child, columns)
        return out
    a = _eval_dag(node[1], columns)
    b = _eval_dag(node[2], columns)
    if op == "and":
        return a & b
    if op == "or":
        return a | b
    if op == "implies":
        return ~a | b
    if op == "iff":
        return a == b
    if op == "xor":
        return a != b
    raise TypeError(f"unknown DAG op: {op}")


def _eval_with_functions(f: Formula, env: dict[str, int], assignment: dict[str, int],
                         extension: dict[tuple, bool], tables: dict, d: int) -> bool:
    if isinstance(f, Atom):
        vals = tuple(_term_value_fn(t, env, assignment, tables) for t in f.args)
        return extension.setdefault((f.name, len(f.args), vals), False)
    if isinstance(f, Equals):
        return (_term_value_fn(f.lhs, env, assignment, tables)
                == _term_value_fn(f.rhs, env, assignment, tables))
    if isinstance(f, Not):
        return not _eval_with_functions(f.body, env, assignment, extension, tables, d)
    if isinstance(f, And):
        return (_eval_with_functions(f.lhs, env, assignment, extension, tables, d)
                and _eval_with_functions(f.rhs, env, assignment, extension, tables, d))
    if isinstance(f, Or):
        return (_eval_with_functions(f.lhs, env, assignment, extension, tables, d)
                or _eval_with_functions(f.rhs, env, assignment, extension, tables, d))
    if isinstance(f, Implies):
        return ((not _eval_with_functions(f.lhs, env, assignment, extension, tables, d))
                or _eval_with_functions(f.rhs, env, assignment, extension, tables, d))
    if isinstance(f, Iff):
        return (_eval_with_functions(f.lhs, env, assignment, extension, tables, d)
                == _eval_with_functions(f.rhs, env, assignment, extension, tables, d))
    if isinstance(f, Xor):
        return (_eval_with_functions(f.lhs, env, assignment, extension, tables, d)
                != _eval_with_functions(f.rhs, env, assignment, extension, tables, d))
    if isinstance(f, ForAll):
        return all(_eval_with_functions(f.body, {**env, f.var: e}, assignment,
                                        extension, tables, d) for e in range(d))
    if isinstance(f, Exists):
        return any(_eval_with_functions(f.body, {**env, f.var: e}, assignment,
                                        extension, tables, d) for e in range(d))
    raise TypeError(f"unknown formula node: {f!r}")


def _term_value_fn(t: Term, env, assignment, tables) -> int:
    if isinstance(t, Var):
        return env.get(t.name, assignment.get(t.name, 0))
    if isinstance(t, Const):
        return assignment[t.name]
    vals = tuple(_term_value_fn(a, env, assignment, tables) for a in t.args)
    return tables[(t.name, len(t.args))][vals]


def le_score(gold: Formula, cand: Formula, cfg: LEConfig = DEFAULT_LE_CONFIG) -> float:
    """Fraction of interpretations on which gold and candidate agree.

    Predicate symbols are aligned first; constants and free variables get a
    fixed canonical assignment; predicate extensions (and function tables,
    when present) form the sampled or enumerated interpretation space.
    """
    check_formula(gold)
    check_formula(cand)

    mapping = align_predicates(predicate_names(gold), predicate_names(cand),
                               cfg.predicate_align_threshold)
    cand = _rename_predicates(cand, mapping)

    consts: set[str] = set()
    funcs: set[tuple[str, int]] = set()
    free_vars: set[str] = set()
    _collect_symbols(gold, consts, funcs, free_vars)
    _collect_symbols(cand, consts, funcs, free_vars)
    d = cfg.domain_size
    assignment = {name: i % d
                  for i, name in enumerate(sorted(consts | free_vars))}

    if funcs:
        return _le_sampled_with_functions(gold, cand, assignment, funcs, cfg)

    grounder = _Grounder(d, assignment)
    dag_gold = grounder.ground(gold, {})
    dag_cand = grounder.ground(cand, {})
    n_atoms = len(grounder.atom_ids)

    if n_atoms == 0:
        # No predicates anywhere (pure equality formulas): truth is fixed.
        fixed = np.zeros((1, 0), dtype=bool)
        agree = _eval_dag(dag_gold, fixed) == _eval_dag(dag_cand, fixed)
        return float(agree[0])

    if n_atoms <= cfg.exhaustive_atom_limit:
        rows = np.arange(2 ** n_atoms, dtype=np.uint32)
        columns = (rows[:, None] >> np.arange(n_atoms, dtype=np.uint32)) & 1
        columns = columns.astype(bool)
    else:
        rng = np.random.default_rng(cfg.seed)
        columns = rng.integers(0, 2, size=(cfg.sample_count, n_atoms)).astype(bool)

    t_gold = _eval_dag(dag_gold, columns)
    t_cand = _eval_dag(dag_cand, columns)
    return float(np.mean(t_gold == t_cand))


def _le_sampled_with_functions(gold, cand, assignment, funcs, cfg: LEConfig) -> float:
    """Sampling fallback when function symbols force dynamic interpretation."""
    import random

    rng = random.Random(cfg.seed)
    d = cfg.domain_size
    agree = 0
    for _ in range(cfg.sample_count):
        tables = {
            (name, arity): {
                vals: rng.randrange(d)
                for vals in itertools.product(range(d), repeat=arity)
            }
            for name, arity in funcs
        }
        # Lazily populated extension: first touch of a ground atom draws its bit.
        extension = _LazyExtension(rng)
        t_gold = _eval_with_functions(gold, {}, assignment, extension, tables, d)
        t_cand = _eval_with_functions(cand, {}, assignment, extension, tables, d)
        agree += t_gold == t_cand
    return agree / cfg.sample_count


class _LazyExtension(dict):
    """Dict that draws a random truth value on first access of a ground atom."""

    def __init__(self, rng):
        super().__init__()
        self.rng = rng

    def setdefault(self, key, default=False):
        if key not in self:
            self[key] = bool(self.rng.getrandbits(1))
        return self[key]
