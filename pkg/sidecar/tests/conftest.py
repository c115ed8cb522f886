from __future__ import annotations

import string
from pathlib import Path

import pytest
import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

FOL_GLYPHS = "∀∃¬∧∨→↔⊕=(),"


def build_tiny_checkpoint(target: Path, hidden: int = 64, layers: int = 2,
                          seed: int = 7, position_scale: float = 0.01,
                          mixing_scale: float = 0.7) -> Path:
    """Construct a small deterministic BERT checkpoint on disk.

    Character-level WordPiece vocabulary (every ASCII letter/digit and FOL
    glyph, plus ## continuations) so any formula tokenizes with full offsets.
    Position embeddings and the layers' output projections are damped after
    seeded init so token identity dominates each vector, which is the property
    a trained encoder provides; attention still mixes context in.
    """
    target.mkdir(parents=True, exist_ok=True)
    chars = list(string.ascii_letters + string.digits) + list(FOL_GLYPHS)
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += chars
    vocab += [f"##{c}" for c in chars]

    wordpiece = models.WordPiece({tok: i for i, tok in enumerate(vocab)},
                                 unk_token="[UNK]", max_input_chars_per_word=100)
    raw = Tokenizer(wordpiece)
    raw.normalizer = normalizers.BertNormalizer(lowercase=False, strip_accents=False)
    raw.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    raw.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]", pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab.index("[CLS]")),
                        ("[SEP]", vocab.index("[SEP]"))])
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=raw, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]")
    tokenizer.save_pretrained(str(target))

    config = BertConfig(
        vocab_size=len(vocab), hidden_size=hidden, num_hidden_layers=layers,
        num_attention_heads=2, intermediate_size=hidden * 2,
        max_position_embeddings=512,
    )
    torch.manual_seed(seed)
    model = BertModel(config)
    with torch.no_grad():
        model.embeddings.position_embeddings.weight *= position_scale
        model.embeddings.token_type_embeddings.weight *= position_scale
        for layer in model.encoder.layer:
            layer.attention.output.dense.weight *= mixing_scale
            layer.output.dense.weight *= mixing_scale
    model.save_pretrained(str(target))
    return target


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("model") / "tiny-fol-bert"
    return str(build_tiny_checkpoint(path))


@pytest.fixture(scope="session")
def fixture_corpus_path() -> Path:
    return Path(__file__).resolve().parents[2] / "tests" / "data" / "fixture50.jsonl"
