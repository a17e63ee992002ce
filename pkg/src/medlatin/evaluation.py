"""Per-field accuracy between aligned gold and predicted documents.

Alignment is a hard precondition, not a best effort: the two documents must
have identical sentence counts, token counts and forms position-wise, and
any divergence raises AlignmentMismatch instead of silently skipping tokens
(the classic evaluation bug).  Accuracy is plain exact-match percentage
rounded half-up to 2 decimals; ufeats compare in canonical key-sorted form
and lemmas compare after lowercasing both sides (predicted lemmas are
produced lowercase, gold corpora may capitalize proper nouns).
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .conllu import Document
from .errors import MedlatinError

FIELDS = ("upos", "ufeats", "lemma")

_TWO_DP = Decimal("0.01")


class AlignmentMismatch(MedlatinError):
    def __init__(self, position: str, detail: str):
        self.position = position
        super().__init__(f"{position}: {detail}")


@dataclass(frozen=True)
class Mismatch:
    sent_index: int
    token_id: int
    field: str
    gold: str
    predicted: str


@dataclass(frozen=True)
class EvalReport:
    accuracy: dict[str, Decimal]
    token_count: int
    mismatches: tuple[Mismatch, ...]

    def matches(self, field: str) -> int:
        return self.token_count - sum(1 for m in self.mismatches if m.field == field)


def accuracy_percent(matches: int, total: int) -> Decimal:
    if total == 0:
        return Decimal("0.00")
    return (Decimal(100 * matches) / Decimal(total)).quantize(_TWO_DP, rounding=ROUND_HALF_UP)


def _field_value(token, field: str) -> str:
    if field == "upos":
        return token.upos
    if field == "ufeats":
        return token.feats_string()
    if field == "lemma":
        return token.lemma.lower()
    raise ValueError(f"unknown field {field!r}")


def check_alignment(gold: Document, predicted: Document) -> None:
    if len(gold.sentences) != len(predicted.sentences):
        raise AlignmentMismatch(
            "document", f"{len(gold.sentences)} gold vs {len(predicted.sentences)} "
            "predicted sentences")
    for s_idx, (g_sent, p_sent) in enumerate(zip(gold.sentences, predicted.sentences)):
        if len(g_sent.tokens) != len(p_sent.tokens):
            raise AlignmentMismatch(
                f"sentence {s_idx}", f"{len(g_sent.tokens)} gold vs "
                f"{len(p_sent.tokens)} predicted tokens")
        for g_tok, p_tok in zip(g_sent.tokens, p_sent.tokens):
            if g_tok.form != p_tok.form:
                raise AlignmentMismatch(
                    f"sentence {s_idx}, token {g_tok.id}",
                    f"form {g_tok.form!r} vs {p_tok.form!r}")


def evaluate(gold: Document, predicted: Document,
             fields: tuple[str, ...] = FIELDS) -> EvalReport:
    """Exact-match accuracy per field over position-aligned documents."""
    for f in fields:
        if f not in FIELDS:
            raise ValueError(f"unknown field {f!r}")
    check_alignment(gold, predicted)
    total = gold.token_count()
    matches = {f: 0 for f in fields}
    mismatches: list[Mismatch] = []
    for s_idx, (g_sent, p_sent) in enumerate(zip(gold.sentences, predicted.sentences)):
        for g_tok, p_tok in zip(g_sent.tokens, p_sent.tokens):
            for f in fields:
                g_val = _field_value(g_tok, f)
                p_val = _field_value(p_tok, f)
                if g_val == p_val:
                    matches[f] += 1
                else:
                    mismatches.append(Mismatch(s_idx, g_tok.id, f, g_val, p_val))
    accuracy = {f: accuracy_percent(matches[f], total) for f in fields}
    return EvalReport(accuracy, total, tuple(mismatches))


def evaluate_by_genre(pairs: dict[str, tuple[Document, Document]],
                      fields: tuple[str, ...] = FIELDS) -> dict[str, EvalReport]:
    """Independent evaluate() per genre; no cross-genre pooling.

    Alignment errors are re-raised with the offending genre named.
    """
    reports = {}
    for genre, (gold, predicted) in pairs.items():
        try:
            reports[genre] = evaluate(gold, predicted, fields)
        except AlignmentMismatch as exc:
            exc.args = (f"genre {genre!r}: {exc}",)
            raise
    return reports
