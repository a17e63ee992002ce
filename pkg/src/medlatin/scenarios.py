"""Staged-training scenario planning, execution and comparison.

Four scenario kinds cover the useful combinations of generic UD treebank
data and genre-specific Medieval Latin data:

    baseline          leave-one-genre-out cross-validation on the genre
                      subcorpora only; one model per (fold, task)
    ud_all            one model per task trained on every UD treebank,
                      tested on every genre
    ud_plus_specific  stage 1 on all UD treebanks, stage 2 on one specific
                      treebank; tested on every genre
    ud_plus_efontes   stage 1 on all UD treebanks, stage 2 on the
                      cross-validation training genres; one model per
                      (fold, task)

On the canonical registry (5 genres, 5 treebanks, 3 tasks) this yields
15 + 3 + 15 + 15 = 48 training runs, with 75 evaluation outcomes for
ud_plus_specific alone.

Execution is deterministic: per-run seeds derive from the run id, stages
continue from the previous stage's model, every trained model is persisted
with its provenance, and the results store rewrites rows keyed by
(run_id, test genre) so re-runs replace rather than duplicate.
"""

from __future__ import annotations

import dataclasses
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal

from . import lemmatizer as lemmatizer_mod
from . import tagger as tagger_mod
from .conllu import Document
from .errors import MedlatinError
from .evaluation import evaluate
from .registry import Registry, load_dataset, make_cv_splits, split_for_validation

SCENARIO_KINDS = ("baseline", "ud_all", "ud_plus_specific", "ud_plus_efontes")
TASK_ORDER = ("upos", "ufeats", "lemma")

RESULTS_FORMAT = "#format=medlatin.results.v1"
RESULTS_HEADER = "run_id\tscenario\tgenre\ttask\taccuracy"

# Aggregate accuracy figures recorded for reference alongside the scenario
# grid; the aggregation scheme behind them is not documented, so they are
# metadata only and never asserted against computed results.
REFERENCE_AGGREGATE_ACCURACY = {"lemma": 92.60, "upos": 83.29, "ufeats": 88.57}


class MissingDataset(MedlatinError):
    pass


@dataclass(frozen=True)
class Scenario:
    kind: str
    tasks: tuple[str, ...] = TASK_ORDER
    ud_name: str | None = None  # restrict ud_plus_specific to one treebank

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        for t in self.tasks:
            if t not in TASK_ORDER:
                raise ValueError(f"unknown task {t!r}")


@dataclass(frozen=True)
class TrainingRun:
    run_id: str
    scenario_label: str
    task: str
    stages: tuple[tuple[str, ...], ...]
    test_datasets: tuple[str, ...]
    stage_epochs: tuple[int, ...] | None = None  # per-stage override; None = caller default


@dataclass(frozen=True)
class RunPlan:
    scenario: Scenario
    runs: tuple[TrainingRun, ...]

    def __post_init__(self):
        ids = [r.run_id for r in self.runs]
        if len(set(ids)) != len(ids):
            raise ValueError("run_ids must be unique within a plan")

    def evaluation_count(self) -> int:
        return sum(len(r.test_datasets) for r in self.runs)


@dataclass(frozen=True)
class ResultRow:
    run_id: str
    scenario: str
    genre: str
    task: str
    accuracy: Decimal


@dataclass(frozen=True)
class ComparisonEntry:
    genre: str
    task: str
    scenario: str
    accuracy: Decimal
    is_best: bool
    is_worst: bool


@dataclass(frozen=True)
class ComparisonReport:
    entries: tuple[ComparisonEntry, ...] = field(default=())

    def best(self, genre: str, task: str) -> set[str]:
        return {e.scenario for e in self.entries
                if e.genre == genre and e.task == task and e.is_best}

    def worst(self, genre: str, task: str) -> set[str]:
        return {e.scenario for e in self.entries
                if e.genre == genre and e.task == task and e.is_worst}


def plan(scenario: Scenario, registry: Registry,
         validation_fraction: Decimal | str | float = "0.1") -> RunPlan:
    """Expand a scenario over the registry into concrete training runs."""
    genres = registry.genres()
    ud_sets = registry.ud_treebanks()
    runs: list[TrainingRun] = []

    if scenario.kind in ("baseline", "ud_plus_efontes"):
        if len(genres) < 2:
            raise MissingDataset(
                f"scenario {scenario.kind!r} needs at least 2 genre datasets")
        folds = make_cv_splits(genres, validation_fraction)
    if scenario.kind in ("ud_all", "ud_plus_specific", "ud_plus_efontes"):
        if not ud_sets:
            raise MissingDataset(f"scenario {scenario.kind!r} needs UD treebank datasets")

    if scenario.kind == "baseline":
        for task in scenario.tasks:
            for fold in folds:
                runs.append(TrainingRun(
                    run_id=f"baseline__{task}__{fold.test_dataset.lower()}",
                    scenario_label="baseline",
                    task=task,
                    stages=(fold.train_datasets,),
                    test_datasets=(fold.test_dataset,),
                ))
    elif scenario.kind == "ud_all":
        if not genres:
            raise MissingDataset("scenario 'ud_all' needs genre datasets to test on")
        for task in scenario.tasks:
            runs.append(TrainingRun(
                run_id=f"ud_all__{task}",
                scenario_label="ud_all",
                task=task,
                stages=(tuple(ud_sets),),
                test_datasets=tuple(genres),
            ))
    elif scenario.kind == "ud_plus_specific":
        if not genres:
            raise MissingDataset("scenario 'ud_plus_specific' needs genre datasets to test on")
        if scenario.ud_name is not None:
            if scenario.ud_name not in ud_sets:
                raise MissingDataset(
                    f"{scenario.ud_name!r} is not a registered UD treebank")
            selected = [scenario.ud_name]
        else:
            selected = ud_sets
        for ud in selected:
            for task in scenario.tasks:
                runs.append(TrainingRun(
                    run_id=f"ud_plus_{ud.lower()}__{task}",
                    scenario_label=f"ud_plus_{ud.lower()}",
                    task=task,
                    stages=(tuple(ud_sets), (ud,)),
                    test_datasets=tuple(genres),
                ))
    elif scenario.kind == "ud_plus_efontes":
        for task in scenario.tasks:
            for fold in folds:
                runs.append(TrainingRun(
                    run_id=f"ud_plus_efontes__{task}__{fold.test_dataset.lower()}",
                    scenario_label="ud_plus_efontes",
                    task=task,
                    stages=(tuple(ud_sets), fold.train_datasets),
                    test_datasets=(fold.test_dataset,),
                ))
    return RunPlan(scenario, tuple(runs))


def derive_seed(base_seed: int, run_id: str, stage_index: int) -> int:
    """Stable per-(run, stage) seed so partial re-execution reproduces cells."""
    return zlib.crc32(f"{base_seed}:{run_id}:{stage_index}".encode("utf-8"))


def materialize_corpus(registry: Registry, dataset_names: tuple[str, ...],
                       drop_unsupported: bool = False) -> Document:
    docs = [load_dataset(registry, name, drop_unsupported) for name in dataset_names]
    sentences: list = []
    for d in docs:
        sentences.extend(d.sentences)
    return Document(tuple(sentences), "+".join(dataset_names))


def predict_document(model, task: str, gold: Document) -> Document:
    """Copy of the gold document with the task's field replaced by predictions."""
    new_sentences = []
    for sentence in gold.sentences:
        if task in ("upos", "ufeats"):
            tags = tagger_mod.tag(model, sentence)
            new_tokens = []
            for tok, label in zip(sentence.tokens, tags):
                if task == "upos":
                    new_tokens.append(dataclasses.replace(tok, upos=label))
                else:
                    feats = () if label == "_" else tuple(
                        tuple(kv.split("=", 1)) for kv in label.split("|"))
                    new_tokens.append(dataclasses.replace(tok, ufeats=feats))
        else:
            new_tokens = [
                dataclasses.replace(
                    tok,
                    lemma=lemmatizer_mod.lemmatize(
                        model, lemmatizer_mod.LemmaQuery(tok.form, tok.upos)),
                )
                for tok in sentence.tokens
            ]
        new_sentences.append(dataclasses.replace(sentence, tokens=tuple(new_tokens)))
    return Document(tuple(new_sentences), gold.source_name)


def _train_stages(run: TrainingRun, registry: Registry, epochs: int,
                  validation_fraction, base_seed: int, drop_unsupported: bool):
    model = None
    for stage_index, stage in enumerate(run.stages):
        corpus = materialize_corpus(registry, stage, drop_unsupported)
        train_sents, _reserved = split_for_validation(corpus.sentences, validation_fraction)
        train_doc = Document(train_sents, corpus.source_name)
        stage_epochs = epochs if run.stage_epochs is None else run.stage_epochs[stage_index]
        if run.task == "lemma":
            model = lemmatizer_mod.train_lemmatizer(train_doc, base=model, datasets=stage)
        else:
            model = tagger_mod.train(
                train_doc, run.task, epochs=stage_epochs, base=model,
                seed=derive_seed(base_seed, run.run_id, stage_index), datasets=stage)
    return model


def _execute_run(run: TrainingRun, registry: Registry, epochs: int,
                 validation_fraction, base_seed: int, drop_unsupported: bool):
    try:
        model = _train_stages(run, registry, epochs, validation_fraction,
                              base_seed, drop_unsupported)
        rows = []
        for test_name in run.test_datasets:
            gold = load_dataset(registry, test_name, drop_unsupported)
            predicted = predict_document(model, run.task, gold)
            report = evaluate(gold, predicted, fields=(run.task,))
            rows.append(ResultRow(run.run_id, run.scenario_label, test_name,
                                  run.task, report.accuracy[run.task]))
        return model, rows
    except MedlatinError as exc:
        exc.args = (f"run {run.run_id!r}: {exc}",)
        raise


def execute(run_plan: RunPlan, registry: Registry, output_dir: str | None = None,
            epochs: int = 5, validation_fraction: Decimal | str | float = "0.1",
            base_seed: int = 0, jobs: int = 1,
            drop_unsupported: bool = False) -> dict[tuple[str, str, str], Decimal]:
    """Train every run, evaluate on its test sets, persist models and results.

    Returns the result grid keyed (scenario label, genre, task).  Two
    executions with the same arguments produce identical grids and
    byte-identical results files.
    """
    def work(run: TrainingRun):
        return run, _execute_run(run, registry, epochs, validation_fraction,
                                 base_seed, drop_unsupported)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(work, run_plan.runs))
    else:
        outcomes = [work(run) for run in run_plan.runs]

    all_rows: list[ResultRow] = []
    if output_dir is not None:
        models_dir = os.path.join(output_dir, "models")
        os.makedirs(models_dir, exist_ok=True)
    for run, (model, rows) in outcomes:
        all_rows.extend(rows)
        if output_dir is not None:
            path = os.path.join(models_dir, f"{run.run_id}.json")
            if run.task == "lemma":
                lemmatizer_mod.save_model(model, path)
            else:
                tagger_mod.save_model(model, path)
    if output_dir is not None:
        merge_results_file(os.path.join(output_dir, "results.tsv"), all_rows)
    return {(r.scenario, r.genre, r.task): r.accuracy for r in all_rows}


def write_results_file(path: str, rows: list[ResultRow]) -> None:
    ordered = sorted(rows, key=lambda r: (r.scenario, r.run_id, r.genre, r.task))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(RESULTS_FORMAT + "\n")
        fh.write(RESULTS_HEADER + "\n")
        for r in ordered:
            fh.write(f"{r.run_id}\t{r.scenario}\t{r.genre}\t{r.task}\t{r.accuracy}\n")


def read_results_file(path: str) -> list[ResultRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0] != RESULTS_FORMAT:
        raise MedlatinError(f"{path}: not a {RESULTS_FORMAT} results file")
    for line in lines[1:]:
        if not line or line == RESULTS_HEADER:
            continue
        run_id, scenario, genre, task, accuracy = line.split("\t")
        rows.append(ResultRow(run_id, scenario, genre, task, Decimal(accuracy)))
    return rows


def merge_results_file(path: str, new_rows: list[ResultRow]) -> None:
    """Rewrite the results store with rows keyed by (run_id, genre, task);
    incoming rows replace existing ones with the same key."""
    merged: dict[tuple[str, str, str], ResultRow] = {}
    if os.path.exists(path):
        for row in read_results_file(path):
            merged[(row.run_id, row.genre, row.task)] = row
    for row in new_rows:
        merged[(row.run_id, row.genre, row.task)] = row
    write_results_file(path, list(merged.values()))


def grid_from_rows(rows: list[ResultRow]) -> dict[tuple[str, str, str], Decimal]:
    return {(r.scenario, r.genre, r.task): r.accuracy for r in rows}


def compare(grid: dict[tuple[str, str, str], Decimal]) -> ComparisonReport:
    """Mark, per (genre, task) column, the best and worst scenario entries.

    Ties mark every tied entry; a single-entry column is both best and worst.
    """
    if not grid:
        raise ValueError("cannot compare an empty grid")
    columns: dict[tuple[str, str], dict[str, Decimal]] = {}
    for (scenario, genre, task), accuracy in grid.items():
        columns.setdefault((genre, task), {})[scenario] = accuracy
    entries = []
    for (genre, task) in sorted(columns):
        cells = columns[(genre, task)]
        best_val = max(cells.values())
        worst_val = min(cells.values())
        for scenario in sorted(cells):
            accuracy = cells[scenario]
            entries.append(ComparisonEntry(
                genre, task, scenario, accuracy,
                is_best=accuracy == best_val,
                is_worst=accuracy == worst_val,
            ))
    return ComparisonReport(tuple(entries))


def render_comparison(report: ComparisonReport) -> str:
    """Aligned text table: rows are scenarios, columns are (genre, task);
    '*' marks the best cell of a column, '!' the worst."""
    columns = sorted({(e.genre, e.task) for e in report.entries})
    scenarios = sorted({e.scenario for e in report.entries})
    cell = {(e.scenario, e.genre, e.task): e for e in report.entries}
    headers = ["scenario"] + [f"{g}/{t}" for g, t in columns]
    lines = [headers]
    for scenario in scenarios:
        row = [scenario]
        for g, t in columns:
            e = cell.get((scenario, g, t))
            if e is None:
                row.append("-")
            else:
                mark = "*" if e.is_best else ("!" if e.is_worst else "")
                row.append(f"{e.accuracy}{mark}")
        lines.append(row)
    widths = [max(len(line[i]) for line in lines) for i in range(len(headers))]
    out = []
    for line in lines:
        out.append("  ".join(val.ljust(widths[i]) for i, val in enumerate(line)).rstrip())
    return "\n".join(out) + "\n"
