"""Context-independent lemmatization keyed on (inflected form, UPOS).

The model receives only the word form and its part-of-speech tag (no
morphological features, no sentence context) and must produce the lemma.
At the wire level the query is the form and the tag joined by a colon
("adducam:VERB"); internally the pair is passed structurally so forms are
never ambiguous.

The implementation is a classifier over learned edit scripts: each training
pair (form, lemma) is compressed into a positional transformation that is
exactly invertible on the pair it was derived from, and scripts are indexed
by form-suffix keys (lengths 1-5) plus UPOS.  Lookup is a fixed cascade:

    1. UPOS == SYM                      -> "_" (symbolic tokens are never lemmatized)
    2. lexicon hit on (form, upos)      -> most frequent lemma seen in training
    3. longest suffix key with upos     -> apply its top-ranked script, if applicable
    4. longest suffix key, any upos     -> same, counts pooled across tags
    5. fallback                         -> the form itself, lowercased

Forms are lowercased before lookup and output casing is lowercase.  Staged
training merges counts additively, so continuing on a new corpus accumulates
evidence instead of restarting.

REFERENCE_SEQ2SEQ_CONFIG records the hyperparameters of the byte-level
generation setup this classifier stands in for; metadata only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .conllu import Document
from .errors import EmptyCorpus, MedlatinError

MODEL_FORMAT = "medlatin-lemmatizer/1"

MAX_SUFFIX_KEY = 5

REFERENCE_SEQ2SEQ_CONFIG = {
    "batch_size": 128,
    "epochs": 5,
    "input_sequence_length": 48,
    "output_sequence_length": 24,
    "learning_rate": 0.001,
}


class ScriptIncompatible(MedlatinError):
    pass


@dataclass(frozen=True)
class LemmaQuery:
    form: str
    upos: str

    def wire(self) -> str:
        return f"{self.form}:{self.upos}"


@dataclass(frozen=True)
class EditScript:
    """Positional transformation from an inflected form to its lemma.

    Applied in fixed order: strip/add prefix, strip/add suffix, then
    interior edits left to right (offsets are relative to the string after
    the prefix/suffix steps).
    """

    strip_prefix_len: int = 0
    prefix_add: str = ""
    strip_suffix_len: int = 0
    suffix_add: str = ""
    interior_edits: tuple[tuple[int, str, str], ...] = ()

    def key(self) -> tuple:
        return (self.strip_prefix_len, self.prefix_add, self.strip_suffix_len,
                self.suffix_add, self.interior_edits)

    def is_identity(self) -> bool:
        return self == EditScript()


def derive_edit_script(form: str, lemma: str) -> EditScript:
    """Minimal script: maximal shared prefix and suffix, one edit for the rest.

    The edit is expressed as a suffix operation when the difference reaches
    the end of the word (the common case for Latin inflection), as a prefix
    operation when it reaches only the start, and as a single interior
    replacement otherwise.  apply_edit_script(result, form) == lemma always.
    """
    p = 0
    limit = min(len(form), len(lemma))
    while p < limit and form[p] == lemma[p]:
        p += 1
    s = 0
    s_limit = min(len(form) - p, len(lemma) - p)
    while s < s_limit and form[len(form) - 1 - s] == lemma[len(lemma) - 1 - s]:
        s += 1
    form_mid = form[p:len(form) - s]
    lemma_mid = lemma[p:len(lemma) - s]
    if not form_mid and not lemma_mid:
        return EditScript()
    if s == 0:
        return EditScript(strip_suffix_len=len(form_mid), suffix_add=lemma_mid)
    if p == 0:
        return EditScript(strip_prefix_len=len(form_mid), prefix_add=lemma_mid)
    return EditScript(interior_edits=((p, form_mid, lemma_mid),))


def apply_edit_script(script: EditScript, form: str) -> str:
    """Apply a script to a form; raises ScriptIncompatible when it cannot apply."""
    text = form
    if script.strip_prefix_len > len(text):
        raise ScriptIncompatible(
            f"prefix strip {script.strip_prefix_len} exceeds length of {form!r}")
    text = script.prefix_add + text[script.strip_prefix_len:]
    if script.strip_suffix_len > len(text):
        raise ScriptIncompatible(
            f"suffix strip {script.strip_suffix_len} exceeds residue of {form!r}")
    text = text[:len(text) - script.strip_suffix_len] + script.suffix_add
    for offset, old, new in script.interior_edits:
        if offset < 0 or offset + len(old) > len(text):
            raise ScriptIncompatible(
                f"interior edit at {offset} falls outside residue {text!r}")
        if text[offset:offset + len(old)] != old:
            raise ScriptIncompatible(
                f"interior edit expects {old!r} at {offset} in {text!r}")
        text = text[:offset] + new + text[offset + len(old):]
    return text


@dataclass(frozen=True)
class LemmatizerModel:
    """Lexicon and suffix-script counts; immutable after training.

    lexicon maps (form, upos) -> {lemma: count}; scripts maps
    (suffix, upos) -> {script key tuple: count}.
    """

    lexicon: dict[tuple[str, str], dict[str, int]]
    scripts: dict[tuple[str, str], dict[tuple, int]]
    provenance: tuple = ()
    config_metadata: dict = field(default_factory=lambda: dict(REFERENCE_SEQ2SEQ_CONFIG))


def _merge_counts(target: dict, source: dict) -> None:
    for key, counter in source.items():
        bucket = target.setdefault(key, {})
        for item, count in counter.items():
            bucket[item] = bucket.get(item, 0) + count


def train_lemmatizer(corpus: Document, base: LemmatizerModel | None = None,
                     datasets: tuple[str, ...] | None = None) -> LemmatizerModel:
    """Count (form, upos, lemma) triples and index derived scripts by suffix.

    Forms and lemmas are lowercased.  SYM tokens are excluded from both the
    lexicon and the classifier; they are handled by the fixed SYM -> "_"
    rule at query time.  When a base model is given its counts are merged
    additively; an empty corpus is then allowed and yields a model that
    predicts exactly like the base.
    """
    if not corpus.sentences and base is None:
        raise EmptyCorpus(f"cannot train lemmatizer on empty corpus {corpus.source_name!r}")
    lexicon: dict[tuple[str, str], dict[str, int]] = {}
    scripts: dict[tuple[str, str], dict[tuple, int]] = {}
    if base is not None:
        _merge_counts(lexicon, base.lexicon)
        _merge_counts(scripts, base.scripts)
    for sentence in corpus.sentences:
        for token in sentence.tokens:
            if token.upos == "SYM":
                continue
            form = token.form.lower()
            lemma = token.lemma.lower()
            bucket = lexicon.setdefault((form, token.upos), {})
            bucket[lemma] = bucket.get(lemma, 0) + 1
            script_key = derive_edit_script(form, lemma).key()
            for n in range(1, min(MAX_SUFFIX_KEY, len(form)) + 1):
                suffix_bucket = scripts.setdefault((form[-n:], token.upos), {})
                suffix_bucket[script_key] = suffix_bucket.get(script_key, 0) + 1
    stage = {
        "datasets": list(datasets) if datasets is not None else [corpus.source_name],
        "was_continued": base is not None,
    }
    provenance = (base.provenance if base is not None else ()) + (stage,)
    return LemmatizerModel(lexicon, scripts, provenance, dict(REFERENCE_SEQ2SEQ_CONFIG))


def _script_from_key(key: tuple) -> EditScript:
    strip_p, add_p, strip_s, add_s, interior = key
    return EditScript(strip_p, add_p, strip_s, add_s, tuple(tuple(e) for e in interior))


def _top_script(counter: dict[tuple, int]) -> EditScript:
    """Highest count wins; ties break on the script's serialization order."""
    best_key = min(counter, key=lambda k: (-counter[k], k))
    return _script_from_key(best_key)


def lemmatize(model: LemmatizerModel, query: LemmaQuery) -> str:
    """Run the decision cascade; never fails (step 5 guarantees totality)."""
    if query.upos == "SYM":
        return "_"
    form = query.form.lower()
    entry = model.lexicon.get((form, query.upos))
    if entry:
        return min(entry, key=lambda lemma: (-entry[lemma], lemma))
    for n in range(min(MAX_SUFFIX_KEY, len(form)), 0, -1):
        counter = model.scripts.get((form[-n:], query.upos))
        if counter:
            try:
                return apply_edit_script(_top_script(counter), form)
            except ScriptIncompatible:
                continue
    for n in range(min(MAX_SUFFIX_KEY, len(form)), 0, -1):
        suffix = form[-n:]
        pooled: dict[tuple, int] = {}
        for (key_suffix, _upos), counter in model.scripts.items():
            if key_suffix == suffix:
                for script_key, count in counter.items():
                    pooled[script_key] = pooled.get(script_key, 0) + count
        if pooled:
            try:
                return apply_edit_script(_top_script(pooled), form)
            except ScriptIncompatible:
                continue
    return form


def parse_wire_query(line: str) -> LemmaQuery:
    """Parse the "form:UPOS" wire format; forms containing ':' are rejected."""
    if line.count(":") != 1:
        raise MedlatinError(
            f"query {line!r} must be exactly 'form:UPOS' with a single colon "
            "(forms containing ':' cannot be expressed in the wire format)")
    form, upos = line.split(":")
    if not form:
        raise MedlatinError(f"query {line!r} has an empty form")
    return LemmaQuery(form, upos)


def save_model(model: LemmatizerModel, path: str) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "lexicon": [
            [form, upos, sorted(counter.items())]
            for (form, upos), counter in sorted(model.lexicon.items())
        ],
        "scripts": [
            [suffix, upos, sorted(
                ([list(k[:4]) + [[list(e) for e in k[4]]], c] for k, c in counter.items()),
            )]
            for (suffix, upos), counter in sorted(model.scripts.items())
        ],
        "provenance": list(model.provenance),
        "config_metadata": model.config_metadata,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=0, sort_keys=True)
        fh.write("\n")


def load_model(path: str) -> LemmatizerModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise MedlatinError(f"{path}: not a {MODEL_FORMAT} model file")
    lexicon = {
        (form, upos): {lemma: int(c) for lemma, c in items}
        for form, upos, items in payload["lexicon"]
    }
    scripts = {}
    for suffix, upos, items in payload["scripts"]:
        counter = {}
        for serialized, count in items:
            strip_p, add_p, strip_s, add_s, interior = serialized
            key = (int(strip_p), add_p, int(strip_s), add_s,
                   tuple((int(o), old, new) for o, old, new in interior))
            counter[key] = int(count)
        scripts[(suffix, upos)] = counter
    provenance = tuple(payload["provenance"])
    return LemmatizerModel(lexicon, scripts, provenance, payload["config_metadata"])
