"""Triple-graph encoding of formulas and best-mapping F1 scoring.

A formula becomes a set of (source, label, target) triples: every operator
instance, atom, and variable is an instance node that may be mapped across
graphs; constant and function names are fixed, matching only by name.  The
score searches for the mapping between instance nodes that maximizes the
number of shared triples, exhaustively for small graphs and by seeded
hill-climbing with restarts otherwise.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass

from .syntax import (
    And, Atom, Const, Equals, Exists, ForAll, Formula, Func, Iff, Implies,
    Not, Or, Term, Var, Xor,
)

Triple = tuple[str, str, str]

_EXHAUSTIVE_MAPPABLE_LIMIT = 8
_EXHAUSTIVE_BUDGET = 50_000  # permutations; 8!-sized searches stay affordable

_OP_NAMES = {
    ForAll: "forall", Exists: "exists", Not: "not", And: "and", Or: "or",
    Implies: "implies", Iff: "iff", Xor: "xor", Equals: "eq",
}


@dataclass(frozen=True)
class TripleGraph:
    triples: frozenset[Triple]
    mappable: frozenset[str]


@dataclass(frozen=True)
class AlignmentResult:
    mapping: dict[str, str]
    matched: int
    precision: float
    recall: float
    f1: float


class _GraphBuilder:
    def __init__(self):
        self.triples: list[Triple] = []
        self.mappable: set[str] = set()
        self.counter = 0
        self.free_vars: dict[str, str] = {}

    def node(self) -> str:
        nid = f"i{self.counter}"
        self.counter += 1
        self.mappable.add(nid)
        return nid

    def add(self, src: str, label: str, tgt: str) -> None:
        self.triples.append((src, label, tgt))

    def build(self, f: Formula, scope: dict[str, str]) -> str:
        if isinstance(f, Atom):
            nid = self.node()
            self.add(nid, "pred", f"v:{f.name}")
            for k, t in enumerate(f.args):
                self.add(nid, f"arg{k}", self.term_target(t, scope))
            return nid
        if isinstance(f, Equals):
            nid = self.node()
            self.add(nid, "op", "v:eq")
            self.add(nid, "arg0", self.term_target(f.lhs, scope))
            self.add(nid, "arg1", self.term_target(f.rhs, scope))
            return nid
        if isinstance(f, Not):
            nid = self.node()
            self.add(nid, "op", "v:not")
            self.add(nid, "arg0", self.build(f.body, scope))
            return nid
        if isinstance(f, (And, Or, Implies, Iff, Xor)):
            nid = self.node()
            self.add(nid, "op", f"v:{_OP_NAMES[type(f)]}")
            self.add(nid, "arg0", self.build(f.lhs, scope))
            self.add(nid, "arg1", self.build(f.rhs, scope))
            return nid
        if isinstance(f, (ForAll, Exists)):
            nid = self.node()
            var_node = self.node()
            self.add(nid, "op", f"v:{_OP_NAMES[type(f)]}")
            self.add(nid, "binds", var_node)
            self.add(nid, "arg0", self.build(f.body, {**scope, f.var: var_node}))
            return nid
        raise TypeError(f"unknown formula node: {f!r}")

    def term_target(self, t: Term, scope: dict[str, str]) -> str:
        if isinstance(t, Var):
            if t.name in scope:
                return scope[t.name]
            if t.name not in self.free_vars:
                self.free_vars[t.name] = self.node()
            return self.free_vars[t.name]
        if isinstance(t, Const):
            return f"c:{t.name}"
        # Function application: instance node with a fixed head name.
        nid = self.node()
        self.add(nid, "fn", f"v:{t.name}")
        for k, a in enumerate(t.args):
            self.add(nid, f"arg{k}", self.term_target(a, scope))
        return nid


def fol_to_triples(f: Formula) -> TripleGraph:
    builder = _GraphBuilder()
    builder.build(f, {})
    return TripleGraph(frozenset(builder.triples), frozenset(builder.mappable))


# ---------------------------------------------------------------------------
# Mapping search
# ---------------------------------------------------------------------------

_UNMAPPED = "\x00unmapped"


def _matched(small_triples: frozenset[Triple], big_triples: frozenset[Triple],
             mapping: dict[str, str], small_mappable: frozenset[str]) -> int:
    # Instance node ids live in the same namespace in both graphs, so an
    # unmapped instance node must resolve to a sentinel, never to itself.
    count = 0
    for s, label, t in small_triples:
        ms = mapping.get(s, _UNMAPPED) if s in small_mappable else s
        mt = mapping.get(t, _UNMAPPED) if t in small_mappable else t
        if (ms, label, mt) in big_triples:
            count += 1
    return count


def _canonical_key(g: TripleGraph) -> tuple:
    return (len(g.mappable), len(g.triples), tuple(sorted(g.triples)))


def _signature(g: TripleGraph) -> dict[str, Counter]:
    sigs: dict[str, Counter] = {n: Counter() for n in g.mappable}
    for s, label, t in g.triples:
        if s in sigs:
            sigs[s][("out", label, t if t.startswith(("v:", "c:")) else "*")] += 1
        if t in sigs:
            sigs[t][("in", label)] += 1
    return sigs


def _smart_initial(small: TripleGraph, big: TripleGraph) -> dict[str, str]:
    """Greedy seed mapping pairing nodes with the most similar signatures."""
    sig_s = _signature(small)
    sig_b = _signature(big)
    scored = []
    for s in sorted(small.mappable):
        for b in sorted(big.mappable):
            overlap = sum((sig_s[s] & sig_b[b]).values())
            scored.append((-overlap, s, b))
    scored.sort()
    mapping: dict[str, str] = {}
    used: set[str] = set()
    for neg, s, b in scored:
        if neg == 0:
            break
        if s in mapping or b in used:
            continue
        mapping[s] = b
        used.add(b)
    return mapping


def _random_initial(small: TripleGraph, big: TripleGraph, rng: random.Random) -> dict[str, str]:
    targets = sorted(big.mappable)
    rng.shuffle(targets)
    return dict(zip(sorted(small.mappable), targets))


def _climb(small: TripleGraph, big: TripleGraph, mapping: dict[str, str]) -> tuple[dict[str, str], int]:
    """Steepest-ascent over single reassignments and pairwise swaps.

    Move gains are evaluated incrementally over the triples incident to the
    reassigned nodes only, so one step costs O(moves * incident degree).
    """
    nodes = sorted(small.mappable)
    big_nodes = sorted(big.mappable)
    incident: dict[str, list[Triple]] = {n: [] for n in nodes}
    for triple in small.triples:
        s, _label, t = triple
        if s in incident:
            incident[s].append(triple)
        if t in incident and t != s:
            incident[t].append(triple)
    big_set = big.triples

    mappable = small.mappable

    def local_matched(triples, view: dict[str, str]) -> int:
        count = 0
        for s, label, t in triples:
            ms = view.get(s, _UNMAPPED) if s in mappable else s
            mt = view.get(t, _UNMAPPED) if t in mappable else t
            if (ms, label, mt) in big_set:
                count += 1
        return count

    def apply_moves(view: dict[str, str], moves: dict) -> dict[str, str]:
        out = dict(view)
        for node, image in moves.items():
            if image is None:
                out.pop(node, None)
            else:
                out[node] = image
        return out

    def move_gain(moves: dict) -> int:
        touched: list[Triple] = []
        seen: set[Triple] = set()
        for node in moves:
            for triple in incident[node]:
                if triple not in seen:
                    seen.add(triple)
                    touched.append(triple)
        trial = apply_moves(mapping, moves)
        return local_matched(touched, trial) - local_matched(touched, mapping)

    def steepest_ascent(view: dict[str, str], score: int) -> tuple[dict[str, str], int]:
        nonlocal mapping
        mapping = view
        while True:
            best_gain = 0
            best_moves = None
            used = {}
            for s_node, image in mapping.items():
                used[image] = s_node
            for s in nodes:
                current = mapping.get(s)
                for b in big_nodes:
                    if b == current:
                        continue
                    holder = used.get(b)
                    if holder is None:
                        moves = {s: b}
                    else:
                        moves = {s: b, holder: None}  # steal, displacing the holder
                    gain = move_gain(moves)
                    if gain > best_gain:
                        best_gain, best_moves = gain, moves
                if current is not None:
                    gain = move_gain({s: None})
                    if gain > best_gain:
                        best_gain, best_moves = gain, {s: None}
            for s1, s2 in itertools.combinations(nodes, 2):
                v1, v2 = mapping.get(s1), mapping.get(s2)
                if v1 is None and v2 is None:
                    continue
                gain = move_gain({s1: v2, s2: v1})
                if gain > best_gain:
                    best_gain, best_moves = gain, {s1: v2, s2: v1}
            if best_moves is None:
                return mapping, score
            mapping = apply_moves(mapping, best_moves)
            score += best_gain

    score = _matched(small.triples, big.triples, mapping, small.mappable)
    return steepest_ascent(mapping, score)


def _search_exhaustive(small: TripleGraph, big: TripleGraph) -> tuple[dict[str, str], int]:
    s_nodes = sorted(small.mappable)
    b_nodes = sorted(big.mappable)
    index = {n: i for i, n in enumerate(s_nodes)}
    compiled = [(index.get(s), s, label, index.get(t), t)
                for s, label, t in small.triples]
    big_set = big.triples
    best_map: dict[str, str] = {}
    best = 0
    for perm in itertools.permutations(b_nodes, len(s_nodes)):
        got = 0
        for si, s, label, ti, t in compiled:
            ms = perm[si] if si is not None else s
            mt = perm[ti] if ti is not None else t
            if (ms, label, mt) in big_set:
                got += 1
        if got > best:
            best, best_map = got, dict(zip(s_nodes, perm))
    return best_map, best


def _kick(mapping: dict[str, str], small: TripleGraph, big: TripleGraph,
          rng: random.Random) -> dict[str, str]:
    """Perturb a local optimum: randomly remap two small nodes."""
    out = dict(mapping)
    nodes = sorted(small.mappable)
    targets = sorted(big.mappable)
    for node in rng.sample(nodes, min(2, len(nodes))):
        out[node] = rng.choice(targets)
    # repair collisions by dropping duplicated images deterministically
    seen: dict[str, str] = {}
    for node in sorted(out):
        image = out[node]
        if image in seen:
            del out[node]
        else:
            seen[image] = node
    return out


def _search_hillclimb(small: TripleGraph, big: TripleGraph,
                      restarts: int, seed: int) -> tuple[dict[str, str], int]:
    """Restarts each run steepest ascent, then a few seeded kick-and-reclimb
    rounds to step over shallow local optima; the best mapping wins."""
    starts = [_smart_initial(small, big)]
    for r in range(max(0, restarts - 1)):
        rng = random.Random(f"{seed}:init:{r}")
        starts.append(_random_initial(small, big, rng))
    best_map: dict[str, str] = {}
    best = -1
    for r, start in enumerate(starts):
        mapping, score = _climb(small, big, start)
        rng = random.Random(f"{seed}:kick:{r}")
        for _ in range(3):
            kicked, kicked_score = _climb(small, big, _kick(mapping, small, big, rng))
            if kicked_score > score:
                mapping, score = kicked, kicked_score
        if score > best:
            best_map, best = mapping, score
    return best_map, best


def _permutation_budget(n_big: int, n_small: int) -> float:
    if n_small == 0:
        return 1.0
    return math.perm(n_big, n_small) if n_big >= n_small else 0.0


def smatch_score(a: TripleGraph, b: TripleGraph, restarts: int = 4,
                 seed: int = 17, method: str = "auto") -> AlignmentResult:
    """Best-mapping precision/recall/F1 of candidate ``b`` against gold ``a``.

    ``method``: "auto" picks exhaustive search when the smaller mappable set
    has at most 8 nodes and the permutation budget is affordable, otherwise
    seeded hill-climbing; "exhaustive" and "hillclimb" force a strategy.
    The search direction is canonicalized so scores are symmetric.
    """
    if method not in ("auto", "exhaustive", "hillclimb"):
        raise ValueError(f"unknown method: {method!r}")
    if a.triples == b.triples and a.mappable == b.mappable:
        # Identity is optimal when the graphs are equal.
        n = len(a.triples)
        full = 1.0 if n else 0.0
        return AlignmentResult({node: node for node in a.mappable}, n, full, full, full)
    first, second = a, b
    swapped = False
    if _canonical_key(b) < _canonical_key(a):
        first, second = b, a
        swapped = True
    small, big = first, second

    n_small, n_big = len(small.mappable), len(big.mappable)
    if method == "exhaustive" or (
        method == "auto"
        and n_small <= _EXHAUSTIVE_MAPPABLE_LIMIT
        and _permutation_budget(n_big, n_small) <= _EXHAUSTIVE_BUDGET
    ):
        mapping, matched = _search_exhaustive(small, big)
    else:
        mapping, matched = _search_hillclimb(small, big, restarts, seed)

    if swapped:
        mapping = {v: k for k, v in mapping.items()}
    precision = matched / len(b.triples) if b.triples else 0.0
    recall = matched / len(a.triples) if a.triples else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return AlignmentResult(mapping, matched, precision, recall, f1)
