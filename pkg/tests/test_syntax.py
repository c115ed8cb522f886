import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foleval.syntax import (
    Atom, Const, DanglingQuantifier, Equals, ForAll, Func, Implies, LexError,
    Not, Or, And, Operator, ParseError, Token, TokenKind, UnbalancedParens,
    Var, parse, parse_text, print_formula, profile, tokenize,
)

from conftest import random_formula


class TestTokenize:
    def test_eel_example(self):
        toks = tokenize("∀x (Eel(x) → Fish(x))")
        assert [t.text for t in toks] == [
            "∀", "x", "(", "Eel", "(", "x", ")", "→", "Fish", "(", "x", ")", ")"]

    def test_empty_input(self):
        assert tokenize("") == []

    def test_ascii_matches_unicode_kinds(self):
        ascii_toks = tokenize("forall x (P(x) -> Q(x))", notation="ascii")
        uni_toks = tokenize("∀x (P(x) → Q(x))", notation="unicode")
        assert [t.kind for t in ascii_toks] == [t.kind for t in uni_toks]

    def test_unrecognized_glyph(self):
        with pytest.raises(LexError) as exc:
            tokenize("P(x) $ Q(x)")
        assert exc.value.span[0] >= 0

    def test_ascii_op_rejected_in_unicode_mode(self):
        with pytest.raises(LexError):
            tokenize("P -> Q", notation="unicode")

    def test_unicode_op_rejected_in_ascii_mode(self):
        with pytest.raises(LexError):
            tokenize("P → Q", notation="ascii")

    def test_spans_non_decreasing(self):
        source = "∀x (WantToBe(x, caffeine) ↔ ¬Aware(x))"
        toks = tokenize(source)
        positions = [t.span for t in toks]
        assert all(a <= b for a, b in positions)
        assert all(p1[1] <= p2[0] for p1, p2 in zip(positions, positions[1:]))
        assert positions[-1][1] <= len(source.encode("utf-8"))

    def test_relex_idempotence(self):
        source = "∃y (¬Opened(y, gate2) ⊕ y = lock9)"
        toks = tokenize(source)
        rejoined = " ".join(t.text for t in toks)
        again = tokenize(rejoined)
        assert [(t.kind, t.text) for t in again] == [(t.kind, t.text) for t in toks]

    @given(st.text(max_size=60))
    @settings(max_examples=300, deadline=None)
    def test_lexer_total(self, source):
        try:
            toks = tokenize(source)
        except LexError as err:
            assert 0 <= err.span[0] <= err.span[1] <= len(source.encode("utf-8"))
        else:
            for tok in toks:
                assert tok.text
                assert 0 <= tok.span[0] <= tok.span[1]


class TestParse:
    def test_quantified_implication(self):
        f = parse_text("∀x (W(x, C) → A(x, C))")
        assert f == ForAll("x", Implies(
            Atom("W", (Var("x"), Const("C"))),
            Atom("A", (Var("x"), Const("C")))))

    def test_standalone_predicate(self):
        assert parse_text("P") == Atom("P", ())

    def test_precedence_not_and_or(self):
        f = parse_text("¬A ∧ B ∨ C")
        explicit = parse_text("((¬A ∧ B) ∨ C)")
        assert f == explicit
        assert f == Or(And(Not(Atom("A")), Atom("B")), Atom("C"))

    def test_implication_right_associative(self):
        assert parse_text("A → B → C") == parse_text("A → (B → C)")

    def test_xor_at_or_level(self):
        assert parse_text("A ⊕ B ∨ C") == parse_text("(A ⊕ B) ∨ C")

    def test_equality_binds_terms(self):
        f = parse_text("P(x) ∧ x = C")
        assert f == And(Atom("P", (Var("x"),)), Equals(Var("x"), Const("C")))

    def test_function_term(self):
        f = parse_text("Holds(x, keyOf(vaultA))")
        assert f == Atom("Holds", (Var("x"), Func("keyOf", (Const("vaultA"),))))

    def test_bound_long_name_is_variable(self):
        f = parse_text("∀person (Happy(person))")
        assert f == ForAll("person", Atom("Happy", (Var("person"),)))

    def test_free_capitalized_name_is_constant(self):
        f = parse_text("Happy(Alice)")
        assert f.args == (Const("Alice"),)

    def test_unbalanced_parens(self):
        with pytest.raises(UnbalancedParens):
            parse_text("∀x (P(x")
        with pytest.raises(UnbalancedParens):
            parse_text("P(x))")

    def test_dangling_quantifier(self):
        with pytest.raises(DanglingQuantifier):
            parse_text("∀x")
        with pytest.raises(DanglingQuantifier):
            parse_text("∃")

    def test_parse_error_reports_span(self):
        with pytest.raises(ParseError) as exc:
            parse_text("P ∧ ∧ Q")
        assert exc.value.span is not None

    def test_empty_token_stream(self):
        with pytest.raises(ParseError):
            parse([])


class TestPrint:
    def test_eel_output(self):
        f = ForAll("x", Implies(Atom("Eel", (Var("x"),)), Atom("Fish", (Var("x"),))))
        assert print_formula(f) == "∀x (Eel(x) → Fish(x))"

    def test_bare_atom(self):
        assert print_formula(Atom("P", ())) == "P"

    def test_ascii_notation(self):
        f = parse_text("∀x (P(x) → ¬Q(x))")
        text = print_formula(f, notation="ascii")
        assert text == "forall x (P(x) -> ~Q(x))"
        assert parse_text(text, notation="ascii") == f

    def test_canonical_spacing(self):
        f = parse_text("∀x(W(x,C)→A(x,C))")
        assert print_formula(f) == "∀x (W(x, C) → A(x, C))"

    @pytest.mark.parametrize("seed", range(20))
    def test_round_trip_spot(self, seed):
        f = random_formula(random.Random(seed), max_depth=5)
        assert parse_text(print_formula(f)) == f

    def test_round_trip_1000_random_formulas(self):
        rng = random.Random(1234)
        for _ in range(1000):
            f = random_formula(rng, max_depth=7, max_arity=3)
            assert parse_text(print_formula(f)) == f

    def test_minimal_vs_full_parens_agree(self):
        rng = random.Random(99)
        for _ in range(500):
            f = random_formula(rng, max_depth=6)
            minimal = parse_text(print_formula(f, parens="minimal"))
            full = parse_text(print_formula(f, parens="full"))
            assert minimal == full == f

    def test_ascii_round_trip_random(self):
        rng = random.Random(5)
        for _ in range(200):
            f = random_formula(rng, max_depth=6)
            assert parse_text(print_formula(f, notation="ascii"), "ascii") == f


class TestProfile:
    def test_quantified_implication_counts(self):
        f = parse_text("∀x (W(x, C) → A(x, C))")
        prof = profile(f)
        assert prof.counts == {Operator.FORALL: 1, Operator.IMPLIES: 1}
        assert prof.total == 2

    def test_bare_atom_empty(self):
        prof = profile(Atom("P", ()))
        assert prof.counts == {}
        assert prof.total == 0

    def test_all_nine_operators_counted(self):
        f = parse_text("∀x ∃y (((¬P(x) ∧ Q(y)) ∨ (R(x) ⊕ S(y))) → (T(x) ↔ x = y))")
        prof = profile(f)
        assert set(prof.counts) == set(Operator)
        assert prof.total == 9
