"""Pre-trained encoder wrapper: one pooled vector per FOL token.

Sentences arrive as token lists. Tokens are joined with single spaces, run
through the checkpoint's tokenizer with offset mapping, and each FOL token's
vector is the mean of the subword vectors whose character spans overlap it.
Long predicate names ("WantToBeAddictedTo") split into many subwords; mean
pooling keeps their full content.
"""

from __future__ import annotations

import torch
from transformers import AutoModel, AutoTokenizer


class Encoder:
    def __init__(self, model_name: str, device: str = "cpu", max_length: int = 512):
        self.model_name = model_name
        self.device = device
        self.max_length = max_length
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name).to(device)
        self.model.eval()
        self.dim = int(self.model.config.hidden_size)

    @torch.no_grad()
    def encode(self, sentences: list[list[str]]) -> list[list[list[float]]]:
        """One dim-sized vector per input token, per sentence."""
        nonempty = [i for i, s in enumerate(sentences) if s]
        out: list[list[list[float]]] = [[] for _ in sentences]
        if not nonempty:
            return out

        texts = []
        spans = []
        for i in nonempty:
            tokens = sentences[i]
            text = " ".join(tokens)
            cursor = 0
            token_spans = []
            for tok in tokens:
                token_spans.append((cursor, cursor + len(tok)))
                cursor += len(tok) + 1
            texts.append(text)
            spans.append(token_spans)

        enc = self.tokenizer(texts, return_offsets_mapping=True, padding=True,
                             truncation=True, max_length=self.max_length,
                             return_tensors="pt")
        offsets = enc.pop("offset_mapping")
        enc = {k: v.to(self.device) for k, v in enc.items()}
        hidden = self.model(**enc).last_hidden_state.cpu()
        attention = enc["attention_mask"].cpu()

        for row, i in enumerate(nonempty):
            token_spans = spans[row]
            # subword j is real text iff attended and its span is nonempty
            subwords = [
                (int(offsets[row, j, 0]), int(offsets[row, j, 1]), j)
                for j in range(offsets.shape[1])
                if attention[row, j] and offsets[row, j, 1] > offsets[row, j, 0]
            ]
            sentence_mean = hidden[row, attention[row].bool()].mean(dim=0)
            vectors = []
            for start, end in token_spans:
                members = [j for s, e, j in subwords if s < end and e > start]
                if members:
                    vectors.append(hidden[row, members].mean(dim=0).tolist())
                else:
                    # token fell past truncation or was swallowed by cleanup
                    vectors.append(sentence_mean.tolist())
            out[i] = vectors
        return out
