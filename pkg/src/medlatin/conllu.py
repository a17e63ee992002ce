"""CoNLL-U parsing, validation and serialization.

Single source of truth for the token data model used across the toolkit:
ten tab-separated columns, '#' comment lines, blank-line sentence
separation, UTF-8, LF line endings on output regardless of input.

Only plain single-word tokens are modelled.  Multiword-token ranges
("3-4") and empty nodes ("3.1") are rejected with a dedicated error, since
every downstream task is strictly one-tag-per-token and silently skipping
such lines would desynchronize gold/predicted alignment.  Callers that
need to ingest treebanks containing them can pass ``drop_unsupported=True``,
which drops those lines before parsing and records the fact in the
document's provenance.

Dependency-related columns (XPOS, HEAD, DEPREL, DEPS) are carried opaquely
and re-emitted verbatim; they are never interpreted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import MedlatinError

UPOS_TAGS = frozenset({
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X", "_",
})

_RANGE_ID = re.compile(r"^\d+-\d+$")
_EMPTY_NODE_ID = re.compile(r"^\d+\.\d+$")
_PLAIN_ID = re.compile(r"^\d+$")
_SENT_ID_COMMENT = re.compile(r"^#\s*sent_id\s*=\s*(.*)$")


class MalformedLine(MedlatinError):
    def __init__(self, line_no: int, detail: str):
        self.line_no = line_no
        self.detail = detail
        super().__init__(f"line {line_no}: {detail}")


class NonConsecutiveIds(MedlatinError):
    def __init__(self, sent_index: int):
        self.sent_index = sent_index
        super().__init__(f"sentence {sent_index}: token ids are not consecutive from 1")


class UnsupportedToken(MedlatinError):
    def __init__(self, line_no: int, token_id: str):
        self.line_no = line_no
        self.token_id = token_id
        super().__init__(
            f"line {line_no}: unsupported token id {token_id!r} "
            "(multiword ranges and empty nodes are not modelled; "
            "pass drop_unsupported=True to discard such lines)"
        )


class InvalidUpos(MedlatinError):
    def __init__(self, line_no: int, upos: str):
        self.line_no = line_no
        self.upos = upos
        super().__init__(f"line {line_no}: invalid UPOS tag {upos!r}")


@dataclass(frozen=True)
class Token:
    """One token line.

    ufeats is the canonical form of the FEATS column: key=value pairs with
    keys unique and sorted ascending; the empty tuple serializes as "_".
    extra_cols carries XPOS, HEAD, DEPREL and DEPS verbatim, in that order.
    """

    id: int
    form: str
    lemma: str = "_"
    upos: str = "_"
    ufeats: tuple[tuple[str, str], ...] = ()
    misc: str = "_"
    extra_cols: tuple[str, str, str, str] = ("_", "_", "_", "_")

    def feats_string(self) -> str:
        if not self.ufeats:
            return "_"
        return "|".join(f"{k}={v}" for k, v in self.ufeats)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    sent_id: str | None = None
    comments: tuple[str, ...] = ()


@dataclass(frozen=True)
class Document:
    sentences: tuple[Sentence, ...]
    source_name: str = field(default="<unnamed>", compare=False)
    provenance: tuple[str, ...] = field(default=(), compare=False)

    def token_count(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)


@dataclass(frozen=True)
class Violation:
    sent_index: int
    token_id: int
    rule: str


def feats_from_string(raw: str, line_no: int) -> tuple[tuple[str, str], ...]:
    """Parse a FEATS column into canonical (sorted, unique-key) pairs."""
    if raw == "_":
        return ()
    pairs = []
    for item in raw.split("|"):
        if "=" not in item:
            raise MalformedLine(line_no, f"feature {item!r} is not Key=Value")
        key, value = item.split("=", 1)
        if not key or not value:
            raise MalformedLine(line_no, f"feature {item!r} has an empty key or value")
        pairs.append((key, value))
    keys = [k for k, _ in pairs]
    if len(set(keys)) != len(keys):
        raise MalformedLine(line_no, f"duplicate feature key in {raw!r}")
    return tuple(sorted(pairs))


def parse_conllu(text: str, source_name: str = "<string>",
                 drop_unsupported: bool = False) -> Document:
    """Parse CoNLL-U text into a Document.

    Canonical-form input (sorted feature keys, LF endings, one blank line
    after every sentence) round-trips byte-identically through serialize().
    Non-canonical but well-formed input is accepted and canonicalized.
    """
    sentences: list[Sentence] = []
    comments: list[str] = []
    tokens: list[Token] = []
    first_comment_line = 0
    dropped = 0

    def flush() -> None:
        nonlocal comments, tokens
        if not tokens:
            return
        sent_index = len(sentences)
        for pos, tok in enumerate(tokens):
            if tok.id != pos + 1:
                raise NonConsecutiveIds(sent_index)
        sent_id = None
        for c in comments:
            m = _SENT_ID_COMMENT.match(c)
            if m:
                sent_id = m.group(1).strip()
                break
        sentences.append(Sentence(tuple(tokens), sent_id, tuple(comments)))
        comments = []
        tokens = []

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for line_no, line in enumerate(lines, start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if line == "":
            flush()
            continue
        if line.startswith("#"):
            if not tokens and not comments:
                first_comment_line = line_no
            comments.append(line)
            continue
        fields = line.split("\t")
        if len(fields) != 10:
            raise MalformedLine(line_no, f"expected 10 tab-separated fields, got {len(fields)}")
        if any(f == "" for f in fields):
            raise MalformedLine(line_no, "empty column (use '_' for absent values)")
        raw_id = fields[0]
        if _RANGE_ID.match(raw_id) or _EMPTY_NODE_ID.match(raw_id):
            if drop_unsupported:
                dropped += 1
                continue
            raise UnsupportedToken(line_no, raw_id)
        if not _PLAIN_ID.match(raw_id):
            raise MalformedLine(line_no, f"token id {raw_id!r} is not a positive integer")
        if fields[3] not in UPOS_TAGS:
            raise InvalidUpos(line_no, fields[3])
        tokens.append(Token(
            id=int(raw_id),
            form=fields[1],
            lemma=fields[2],
            upos=fields[3],
            ufeats=feats_from_string(fields[5], line_no),
            misc=fields[9],
            extra_cols=(fields[4], fields[6], fields[7], fields[8]),
        ))
    flush()
    if comments:
        raise MalformedLine(first_comment_line, "comment lines not followed by a sentence")

    provenance = ()
    if dropped:
        provenance = (f"dropped {dropped} unsupported token line(s)",)
    return Document(tuple(sentences), source_name, provenance)


def serialize(doc: Document) -> str:
    """Serialize a Document to CoNLL-U text (LF endings, one blank line per sentence)."""
    lines: list[str] = []
    for sentence in doc.sentences:
        lines.extend(sentence.comments)
        for tok in sentence.tokens:
            xpos, head, deprel, deps = tok.extra_cols
            lines.append("\t".join((
                str(tok.id), tok.form, tok.lemma, tok.upos, xpos,
                tok.feats_string(), head, deprel, deps, tok.misc,
            )))
        lines.append("")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def validate(doc: Document) -> list[Violation]:
    """Check every invariant of the data model; empty list iff the document is clean.

    Directly constructed documents can breach invariants that parse_conllu
    enforces (duplicate feature keys, gaps in ids, bad UPOS); this reports
    one Violation per breach with the sentence index, token id and rule name.
    """
    violations = []
    for s_idx, sentence in enumerate(doc.sentences):
        if not sentence.tokens:
            violations.append(Violation(s_idx, 0, "EmptySentence"))
        for pos, tok in enumerate(sentence.tokens):
            if tok.id != pos + 1:
                violations.append(Violation(s_idx, tok.id, "NonConsecutiveIds"))
            if tok.form == "":
                violations.append(Violation(s_idx, tok.id, "EmptyForm"))
            if tok.upos not in UPOS_TAGS:
                violations.append(Violation(s_idx, tok.id, "InvalidUpos"))
            keys = [k for k, _ in tok.ufeats]
            if len(set(keys)) != len(keys):
                violations.append(Violation(s_idx, tok.id, "DuplicateFeatKey"))
            elif keys != sorted(keys):
                violations.append(Violation(s_idx, tok.id, "UnsortedFeatKeys"))
    return violations


def concat_documents(docs: list[Document], source_name: str) -> Document:
    """Concatenate documents in order, merging provenance."""
    sentences: list[Sentence] = []
    provenance: list[str] = []
    for d in docs:
        sentences.extend(d.sentences)
        provenance.extend(d.provenance)
    return Document(tuple(sentences), source_name, tuple(provenance))
