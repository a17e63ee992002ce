"""Trainable token-classification tagger for UPOS and composite UFeats labels.

The model is an averaged perceptron over sparse binary features with greedy
left-to-right decoding: CPU-trainable in seconds, fully deterministic, and
honoring the contracts the training scenarios need: staged initialization
from a base model, a closed tagset read from the training corpus, one tag
per token.  UFeats are treated as a single composite label ("Case=Nom|
Number=Sing" with keys sorted, "_" when empty), not per-feature
classification.

Training uses teacher forcing for the previous-tag feature (gold previous
tag); decoding feeds back the predicted tag.  Ties in scoring break toward
the lexicographically smallest tag, so an untrained model with zero weights
tags everything with the first tag of the sorted tagset.

REFERENCE_FINETUNE_CONFIG holds the hyperparameters of the full-scale
fine-tuning setup this trainer stands in for; they are recorded in every
model's metadata for provenance but are not interpreted here.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .conllu import Sentence
from .errors import EmptyCorpus, MedlatinError

TASKS = ("upos", "ufeats")

BOUNDARY = "<s>"
END_BOUNDARY = "</s>"

MODEL_FORMAT = "medlatin-tagger/1"

REFERENCE_FINETUNE_CONFIG = {
    "batch_size": 12,
    "epochs": 10,
    "learning_rate": 2e-5,
    "sequence_length": 256,
}


class TaskMismatch(MedlatinError):
    pass


class IndexOutOfRange(MedlatinError):
    pass


@dataclass(frozen=True)
class TrainingStage:
    datasets: tuple[str, ...]
    epochs: int
    was_continued: bool


@dataclass(frozen=True)
class TaggerModel:
    task: str
    tagset: tuple[str, ...]
    feature_vocabulary: dict[str, int]
    weights: dict[tuple[int, int], float]
    provenance: tuple[TrainingStage, ...] = ()
    config_metadata: dict = field(default_factory=lambda: dict(REFERENCE_FINETUNE_CONFIG))


def gold_label(token, task: str) -> str:
    if task == "upos":
        return token.upos
    return token.feats_string()


def extract_features(sentence: Sentence, index: int, prev_tag: str = BOUNDARY) -> tuple[str, ...]:
    """Deterministic sparse features for one token, sorted and deduplicated.

    prev_tag is decoding state: gold previous tag during training (teacher
    forcing), predicted previous tag during greedy decoding.
    """
    if not 0 <= index < len(sentence.tokens):
        raise IndexOutOfRange(f"token index {index} out of range")
    form = sentence.tokens[index].form
    low = form.lower()
    feats = {f"w={low}", f"pt={prev_tag}"}
    for n in range(1, min(4, len(low)) + 1):
        feats.add(f"p{n}={low[:n]}")
        feats.add(f"s{n}={low[-n:]}")
    if any(ch.isdigit() for ch in form):
        feats.add("has_digit")
    if form[0].isupper():
        feats.add("is_cap")
    if form.isupper():
        feats.add("all_caps")
    prev_form = sentence.tokens[index - 1].form.lower() if index > 0 else BOUNDARY
    next_form = (sentence.tokens[index + 1].form.lower()
                 if index + 1 < len(sentence.tokens) else END_BOUNDARY)
    feats.add(f"pw={prev_form}")
    feats.add(f"nw={next_form}")
    return tuple(sorted(feats))


def _best_tag(tagset: tuple[str, ...], weights, feature_ids: list[int]) -> str:
    best_idx = 0
    best_score = None
    for t_idx in range(len(tagset)):
        score = 0.0
        for f_id in feature_ids:
            w = weights.get((f_id, t_idx))
            if w is not None:
                score += w
        if (best_score is None or score > best_score
                or (score == best_score and tagset[t_idx] < tagset[best_idx])):
            best_score = score
            best_idx = t_idx
    return tagset[best_idx]


def train(corpus, task: str, epochs: int = 5, base: TaggerModel | None = None,
          seed: int = 0, datasets: tuple[str, ...] | None = None) -> TaggerModel:
    """Averaged-perceptron training with greedy decoding and per-epoch shuffling.

    Deterministic given (corpus, task, epochs, base, seed).  When a base
    model is given, its (averaged) weights, feature vocabulary and tagset
    are the starting point and new tags/features are appended, so staged
    training continues rather than restarts.  epochs=0 performs no updates:
    the result predicts exactly like the base (or like a zero-weight model).
    """
    if task not in TASKS:
        raise TaskMismatch(f"unknown task {task!r}")
    if base is not None and base.task != task:
        raise TaskMismatch(f"base model is for {base.task!r}, requested {task!r}")
    if not corpus.sentences:
        raise EmptyCorpus(f"cannot train {task} tagger on empty corpus {corpus.source_name!r}")
    if epochs < 0:
        raise ValueError("epochs must be >= 0")

    if base is not None:
        tagset = list(base.tagset)
        vocab = dict(base.feature_vocabulary)
        w = dict(base.weights)
    else:
        tagset, vocab, w = [], {}, {}
    known = set(tagset)
    corpus_tags = sorted({gold_label(t, task) for s in corpus.sentences for t in s.tokens})
    for tag in corpus_tags:
        if tag not in known:
            tagset.append(tag)
            known.add(tag)
    tagset_t = tuple(tagset)
    tag_index = {t: i for i, t in enumerate(tagset_t)}

    def feature_ids(feats: tuple[str, ...], grow: bool) -> list[int]:
        ids = []
        for f in feats:
            f_id = vocab.get(f)
            if f_id is None:
                if not grow:
                    continue
                f_id = len(vocab)
                vocab[f] = f_id
            ids.append(f_id)
        return ids

    # Lazy averaging: acc accumulates sum-over-steps of each weight, flushed
    # at (last-touched, now] intervals; untouched keys average to their
    # starting value, which keeps epochs=0 an exact identity on the base.
    acc: dict[tuple[int, int], float] = {}
    ts: dict[tuple[int, int], int] = {}
    step = 0

    def bump(key: tuple[int, int], delta: float) -> None:
        acc[key] = acc.get(key, 0.0) + (step - ts.get(key, 0)) * w.get(key, 0.0)
        ts[key] = step
        w[key] = w.get(key, 0.0) + delta

    rng = random.Random(seed)
    order = list(range(len(corpus.sentences)))
    for _ in range(epochs):
        rng.shuffle(order)
        for s_i in order:
            sentence = corpus.sentences[s_i]
            prev = BOUNDARY
            for i in range(len(sentence.tokens)):
                feats = extract_features(sentence, i, prev)
                ids = feature_ids(feats, grow=True)
                gold = gold_label(sentence.tokens[i], task)
                pred = _best_tag(tagset_t, w, ids)
                if pred != gold:
                    g_idx, p_idx = tag_index[gold], tag_index[pred]
                    for f_id in ids:
                        bump((f_id, g_idx), 1.0)
                        bump((f_id, p_idx), -1.0)
                prev = gold
                step += 1

    if step == 0:
        averaged = dict(w)
    else:
        averaged = {}
        for key, value in w.items():
            total = acc.get(key, 0.0) + (step - ts.get(key, 0)) * value
            averaged[key] = total / step
    averaged = {k: v for k, v in averaged.items() if v != 0.0}

    stage = TrainingStage(
        datasets=datasets if datasets is not None else (corpus.source_name,),
        epochs=epochs,
        was_continued=base is not None,
    )
    provenance = (base.provenance if base is not None else ()) + (stage,)
    return TaggerModel(task, tagset_t, vocab, averaged, provenance,
                       dict(REFERENCE_FINETUNE_CONFIG))


def tag(model: TaggerModel, sentence: Sentence) -> list[str]:
    """Greedy left-to-right tagging; one tag per token, always."""
    tags: list[str] = []
    prev = BOUNDARY
    for i in range(len(sentence.tokens)):
        feats = extract_features(sentence, i, prev)
        ids = [model.feature_vocabulary[f] for f in feats if f in model.feature_vocabulary]
        predicted = _best_tag(model.tagset, model.weights, ids)
        tags.append(predicted)
        prev = predicted
    return tags


def save_model(model: TaggerModel, path: str) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "task": model.task,
        "tagset": list(model.tagset),
        "feature_vocabulary": model.feature_vocabulary,
        "weights": [[f, t, w] for (f, t), w in sorted(model.weights.items())],
        "provenance": [
            {"datasets": list(s.datasets), "epochs": s.epochs, "was_continued": s.was_continued}
            for s in model.provenance
        ],
        "config_metadata": model.config_metadata,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=0, sort_keys=True)
        fh.write("\n")


def load_model(path: str) -> TaggerModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise MedlatinError(f"{path}: not a {MODEL_FORMAT} model file")
    return TaggerModel(
        task=payload["task"],
        tagset=tuple(payload["tagset"]),
        feature_vocabulary={k: int(v) for k, v in payload["feature_vocabulary"].items()},
        weights={(int(f), int(t)): float(w) for f, t, w in payload["weights"]},
        provenance=tuple(
            TrainingStage(tuple(s["datasets"]), int(s["epochs"]), bool(s["was_continued"]))
            for s in payload["provenance"]
        ),
        config_metadata=payload["config_metadata"],
    )
