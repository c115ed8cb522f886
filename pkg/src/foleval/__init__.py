"""Closeness metrics, perturbations, and rank alignment for FOL statements."""

from .syntax import (
    And, Atom, Const, DanglingQuantifier, Equals, Exists, ForAll, Formula,
    Func, Iff, Implies, LexError, Not, Operator, OperatorProfile, Or,
    ParseError, Term, Token, TokenKind, UnbalancedParens, Var, Xor, parse,
    parse_text, print_formula, profile, tokenize,
)
from .perturb import (
    PerturbationKind, PerturbationOutcome, applicability_report, perturb,
    perturb_andor, perturb_negation, perturb_quantifier,
    perturb_text_minus_operator, perturb_text_minus_variable,
)
from .textmetrics import TextMetricConfig, bleu, meteor, rouge
from .logic import LEConfig, SyntaxInvalid, le_score, syntax_check
from .graphs import AlignmentResult, TripleGraph, fol_to_triples, smatch_score
from .semantic import (
    BertScoreResult, FallbackProvider, RemoteProvider, TokenEmbeddings,
    bertscore, embed,
)
from .corpus import LoadReport, Record, SchemaError, corpus_stats, load_corpus
from .scoring import (
    MetricEngine, ScoreRecord, ScoringConfig, combine, combine_all,
    score_corpus, self_match_constant,
)
from .ranking import (
    AlignmentReport, RankVector, competition_ranks, disagreement, rank,
    rmse_alignment,
)
from .judge import (
    DEFAULT_JUDGE_TEMPLATE, JudgeClient, OfflineJudge, UnparseableReply,
    judge_corpus, parse_rank_reply,
)

__version__ = "0.1.0"
