from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from foleval.syntax import (
    And, Atom, Const, Equals, Exists, ForAll, Iff, Implies, Not, Or, Var,
    Xor, parse_text,
)

DATA_DIR = Path(__file__).parent / "data"

_PRED_NAMES = ["P", "Q", "R", "S", "Keeps", "Holds", "MarkedBy", "Sealed",
               "OpenTo", "Guards"]
_CONST_NAMES = ["C", "D", "boxA", "gateB", "wardenE", "lampC"]
_VAR_NAMES = ["x", "y", "z", "u", "v", "w"]


def random_term(rng: random.Random, scope: list[str]):
    roll = rng.random()
    if scope and roll < 0.55:
        return Var(rng.choice(scope))
    return Const(rng.choice(_CONST_NAMES))


def random_formula(rng: random.Random, max_depth: int = 5, max_arity: int = 3,
                   preds: list[str] | None = None,
                   scope: tuple[str, ...] = ()) -> object:
    """Formula in the parser's image: bound variables are drawn from a pool of
    single lowercase letters, constants never look like variables."""
    preds = preds if preds is not None else _PRED_NAMES
    scope_list = list(scope)
    if max_depth <= 0:
        roll = rng.random()
        if roll < 0.12 and len(scope_list) + len(_CONST_NAMES) >= 2:
            return Equals(random_term(rng, scope_list), random_term(rng, scope_list))
        arity = rng.randrange(0, max_arity + 1)
        args = tuple(random_term(rng, scope_list) for _ in range(arity))
        return Atom(rng.choice(preds), args)
    kind = rng.choice(["atom", "not", "and", "or", "implies", "iff", "xor",
                       "forall", "exists", "equals"])
    if kind == "atom":
        return random_formula(rng, 0, max_arity, preds, scope)
    if kind == "equals":
        return Equals(random_term(rng, scope_list), random_term(rng, scope_list))
    if kind == "not":
        return Not(random_formula(rng, max_depth - 1, max_arity, preds, scope))
    if kind in ("forall", "exists"):
        fresh = [v for v in _VAR_NAMES if v not in scope] or _VAR_NAMES
        var = rng.choice(fresh)
        body = random_formula(rng, max_depth - 1, max_arity, preds, scope + (var,))
        return (ForAll if kind == "forall" else Exists)(var, body)
    lhs = random_formula(rng, max_depth - 1, max_arity, preds, scope)
    rhs = random_formula(rng, max_depth - 1, max_arity, preds, scope)
    node = {"and": And, "or": Or, "implies": Implies, "iff": Iff, "xor": Xor}[kind]
    return node(lhs, rhs)


def load_fixture_records() -> list[dict]:
    path = DATA_DIR / "fixture50.jsonl"
    with path.open(encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


@pytest.fixture(scope="session")
def fixture_records() -> list[dict]:
    return load_fixture_records()


@pytest.fixture(scope="session")
def fixture_formulas(fixture_records):
    return [parse_text(rec["gold"]) for rec in fixture_records]
