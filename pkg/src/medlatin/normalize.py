"""Orthographic rewrite rules for Medieval Latin gold conventions.

The gold annotation conventions this engine encodes are the ones that
dominate lemma disagreements in medieval material: the bilabial is written
``u`` for both vowel and consonant (uideo, ciuitas), and the -ti-/-ci-
group is standardized to ``-ti-`` (gratia, laurentius).  Rules are
directional, predicted -> gold; no inverse property is claimed.

k/c alternation, h insertion or omission, and ae/oe diphthong restoration
are deliberately NOT shipped as blanket rules: those alternations are
word-specific (karitas:caritas but kalendae stays kalendae), so a blanket
rewrite would create new errors.  They can be enabled via mined,
lexicon-backed rules (see mine_rules) with exception lists.

Ruleset file format, one rule per line:

    rule_id TAB pattern TAB replacement TAB position TAB comma-separated-exceptions

position is one of initial, middle, final, anywhere.  Lines starting with
'#' and blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .errors import MedlatinError

POSITIONS = ("initial", "middle", "final", "anywhere")


class RulesetFormatError(MedlatinError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    rule_id: str
    pattern: str
    replacement: str
    position: str = "anywhere"
    exceptions: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.pattern:
            raise ValueError("rule pattern must be non-empty")
        if self.pattern == self.replacement:
            raise ValueError("rule pattern must differ from replacement")
        if self.position not in POSITIONS:
            raise ValueError(f"unknown position {self.position!r}")


@dataclass(frozen=True)
class Ruleset:
    rules: tuple[RewriteRule, ...]
    name: str = "<unnamed>"

    def __post_init__(self):
        ids = [r.rule_id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise ValueError("rule_ids must be unique within a ruleset")

    def find(self, rule_id: str) -> RewriteRule | None:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        return None


def _position_ok(position: str, start: int, end: int, length: int) -> bool:
    if position == "anywhere":
        return True
    if position == "initial":
        return start == 0
    if position == "final":
        return end == length
    return start > 0 and end < length  # middle


def _apply_one(rule: RewriteRule, word: str) -> str:
    """Single left-to-right pass; replacements are never re-scanned by the same rule."""
    if word in rule.exceptions:
        return word
    pat = rule.pattern
    n = len(word)
    out = []
    i = 0
    while i < n:
        if word.startswith(pat, i) and _position_ok(rule.position, i, i + len(pat), n):
            out.append(rule.replacement)
            i += len(pat)
        else:
            out.append(word[i])
            i += 1
    return "".join(out)


def apply_rules(ruleset: Ruleset, word: str) -> str:
    """Apply rules in list order to a lowercase word; deterministic, single pass per rule."""
    for rule in ruleset.rules:
        word = _apply_one(rule, word)
    return word


def normalize_word(ruleset: Ruleset, word: str) -> str:
    """Casing-aware wrapper: rewrites on the lowercase form and restores an
    initial capital, so capitalized proper nouns stay capitalized."""
    if not word:
        return word
    lowered = word.lower()
    rewritten = apply_rules(ruleset, lowered)
    if word[0].isupper() and rewritten:
        return rewritten[0].upper() + rewritten[1:]
    return rewritten


def default_gold_ruleset() -> Ruleset:
    """The bundled predicted->gold ruleset (loaded from packaged data).

    Contains v->u (anywhere, no exceptions) and ci->ti (middle, with an
    exception list of attested legitimate -ci- lemmas); nothing for k/c, h,
    or diphthongs, per the module docstring.
    """
    text = resources.files("medlatin.data").joinpath("default_ruleset.tsv").read_text("utf-8")
    return parse_ruleset(text, name="default_gold")


def parse_ruleset(text: str, name: str = "<string>") -> Ruleset:
    rules = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) == 4:
            fields.append("")  # empty exceptions field, trailing tab lost in transit
        if len(fields) != 5:
            raise RulesetFormatError(
                f"{name} line {line_no}: expected 5 tab-separated fields, got {len(fields)}")
        rule_id, pattern, replacement, position, raw_exceptions = fields
        exceptions = frozenset(w for w in raw_exceptions.split(",") if w)
        try:
            rules.append(RewriteRule(rule_id, pattern, replacement, position, exceptions))
        except ValueError as exc:
            raise RulesetFormatError(f"{name} line {line_no}: {exc}") from exc
    return Ruleset(tuple(rules), name)


def serialize_ruleset(ruleset: Ruleset) -> str:
    lines = []
    for r in ruleset.rules:
        lines.append("\t".join((
            r.rule_id, r.pattern, r.replacement, r.position, ",".join(sorted(r.exceptions)),
        )))
    return "\n".join(lines) + ("\n" if lines else "")


def mine_rules(confusions: list, min_count: int = 1) -> Ruleset:
    """Turn mined confusion patterns into corrective rules (predicted -> gold).

    One rule per pattern with count >= min_count, ordered by descending
    count (ties by position then pattern text).  Patterns whose predicted
    side is empty are skipped: a pure insertion has no substring to anchor
    a rewrite on.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    usable = [c for c in confusions if c.count >= min_count and c.pred_sub]
    usable.sort(key=lambda c: (-c.count, c.position, c.pred_sub, c.gold_sub))
    rules = []
    seen_ids = set()
    for c in usable:
        if c.pred_sub == c.gold_sub:
            continue
        rule_id = f"mined_{c.pred_sub}_to_{c.gold_sub or 'nothing'}_{c.position}"
        if rule_id in seen_ids:
            continue
        seen_ids.add(rule_id)
        rules.append(RewriteRule(rule_id, c.pred_sub, c.gold_sub, c.position))
    return Ruleset(tuple(rules), name=f"mined_min{min_count}")
