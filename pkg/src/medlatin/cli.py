"""Command-line entry point: one binary, one subcommand per pipeline stage.

    corpus stats|validate     corpus statistics; declared-stats consistency
    normalize                 rewrite lemmas toward gold orthography
    tagger train|tag          UPOS / UFeats tagging
    lemmatize train|run       (form, UPOS) -> lemma
    scenario plan|run|compare staged training scenarios over a registry
    eval                      per-field accuracy of predicted vs gold
    analyze                   confusion mining, POS confusion, genre errors

Exit codes: 0 success, 1 domain error (message names the error case),
2 usage error.  A config file may supply defaults (key = value lines with
keys registry, output_dir, seed, ruleset, verbosity, scenario, tasks, ud);
pass it with --config or the MEDLATIN_CONFIG environment variable.  Flags
always win over config.  Every tabular command accepts --machine for
tab-separated output behind a versioned header line.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

from . import __version__
from . import analysis as analysis_mod
from . import lemmatizer as lemmatizer_mod
from . import normalize as normalize_mod
from . import scenarios as scenarios_mod
from . import tagger as tagger_mod
from .conllu import Document, parse_conllu, serialize, validate
from .errors import MedlatinError
from .evaluation import FIELDS, evaluate
from .registry import (Registry, compute_stats, load_dataset, load_registry,
                       reference_registry, validate_registry)

log = logging.getLogger("medlatin")

CONFIG_ENV_VAR = "MEDLATIN_CONFIG"
CONFIG_KEYS = ("registry", "output_dir", "seed", "ruleset", "verbosity",
               "scenario", "tasks", "ud")


class UsageError(Exception):
    """Bad command-line usage that argparse cannot catch itself (exit code 2)."""


def load_config(path: str) -> dict[str, str]:
    config = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise MedlatinError(f"{path} line {line_no}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise MedlatinError(f"{path} line {line_no}: unknown config key {key!r}")
            config[key] = value
    return config


def _read_doc(path: str, drop_unsupported: bool = False) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse_conllu(fh.read(), source_name=path, drop_unsupported=drop_unsupported)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _aligned(rows: list[list[str]]) -> str:
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(val.ljust(widths[i]) for i, val in enumerate(row)).rstrip()
        for row in rows
    ) + "\n"


def _emit_table(args, command: str, header: list[str], rows: list[list[str]]) -> None:
    if args.machine:
        sys.stdout.write(f"#format=medlatin.{command}.v1\n")
        sys.stdout.write("\t".join(header) + "\n")
        for row in rows:
            sys.stdout.write("\t".join(row) + "\n")
    else:
        sys.stdout.write(_aligned([header] + rows))


def _registry_from_args(args) -> Registry:
    if args.registry:
        return load_registry(args.registry)
    return reference_registry()


# ---------------------------------------------------------------- corpus

def cmd_corpus_stats(args) -> int:
    rows = []
    if args.infile:
        doc = _read_doc(args.infile, args.drop_unsupported)
        stats = compute_stats(doc)
        rows.append([args.infile, str(stats.tokens), str(stats.sentences),
                     str(stats.avg_tokens_per_sentence)])
    else:
        registry = _registry_from_args(args)
        names = args.dataset or [d.name for d in registry if d.paths]
        for name in names:
            doc = load_dataset(registry, name, args.drop_unsupported)
            stats = compute_stats(doc)
            rows.append([name, str(stats.tokens), str(stats.sentences),
                         str(stats.avg_tokens_per_sentence)])
    _emit_table(args, "corpus.stats", ["dataset", "tokens", "sentences", "avg"], rows)
    return 0


def cmd_corpus_validate(args) -> int:
    registry = _registry_from_args(args)
    verdicts = validate_registry(registry, args.tolerance)
    rows = []
    for name, verdict in verdicts.items():
        declared = registry.get(name).declared_stats
        rows.append([
            name, str(declared.tokens), str(declared.sentences),
            str(declared.avg_tokens_per_sentence),
            "consistent" if verdict.consistent else "INCONSISTENT",
            str(verdict.expected_avg),
        ])
    _emit_table(args, "corpus.validate",
                ["dataset", "tokens", "sentences", "declared_avg", "verdict", "expected_avg"],
                rows)
    return 0


# ------------------------------------------------------------- normalize

def cmd_normalize(args) -> int:
    if args.ruleset:
        with open(args.ruleset, encoding="utf-8") as fh:
            ruleset = normalize_mod.parse_ruleset(fh.read(), name=args.ruleset)
    else:
        ruleset = normalize_mod.default_gold_ruleset()
    doc = _read_doc(args.infile, args.drop_unsupported)
    new_sentences = []
    for sentence in doc.sentences:
        new_tokens = tuple(
            tok if tok.lemma == "_" else dataclasses.replace(
                tok, lemma=normalize_mod.normalize_word(ruleset, tok.lemma))
            for tok in sentence.tokens
        )
        new_sentences.append(dataclasses.replace(sentence, tokens=new_tokens))
    _write_text(args.out, serialize(Document(tuple(new_sentences), doc.source_name)))
    return 0


# ---------------------------------------------------------------- tagger

def cmd_tagger_train(args) -> int:
    docs = [_read_doc(p, args.drop_unsupported) for p in args.infile]
    sentences = tuple(s for d in docs for s in d.sentences)
    corpus = Document(sentences, "+".join(args.infile))
    base = tagger_mod.load_model(args.base) if args.base else None
    model = tagger_mod.train(corpus, args.task, epochs=args.epochs, base=base,
                             seed=args.seed, datasets=tuple(args.infile))
    tagger_mod.save_model(model, args.out)
    log.info("trained %s tagger on %d sentences -> %s",
             args.task, len(sentences), args.out)
    return 0


def cmd_tagger_tag(args) -> int:
    model = tagger_mod.load_model(args.model)
    doc = _read_doc(args.infile, args.drop_unsupported)
    predicted = scenarios_mod.predict_document(model, model.task, doc)
    _write_text(args.out, serialize(predicted))
    return 0


# ------------------------------------------------------------- lemmatize

def cmd_lemmatize_train(args) -> int:
    docs = [_read_doc(p, args.drop_unsupported) for p in args.infile]
    sentences = tuple(s for d in docs for s in d.sentences)
    corpus = Document(sentences, "+".join(args.infile))
    base = lemmatizer_mod.load_model(args.base) if args.base else None
    model = lemmatizer_mod.train_lemmatizer(corpus, base=base, datasets=tuple(args.infile))
    lemmatizer_mod.save_model(model, args.out)
    log.info("trained lemmatizer on %d sentences -> %s", len(sentences), args.out)
    return 0


def cmd_lemmatize_run(args) -> int:
    model = lemmatizer_mod.load_model(args.model)
    if args.infile:
        with open(args.infile, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    else:
        lines = sys.stdin.read().split("\n")
    out_lines = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        query = lemmatizer_mod.parse_wire_query(line)
        out_lines.append(lemmatizer_mod.lemmatize(model, query))
    _write_text(args.out, "\n".join(out_lines) + ("\n" if out_lines else ""))
    return 0


# -------------------------------------------------------------- scenario

def _scenarios_from_args(args) -> list[scenarios_mod.Scenario]:
    if args.scenario is None:
        raise UsageError("a scenario kind is required (--scenario or config key 'scenario')")
    if args.scenario != "all" and args.scenario not in scenarios_mod.SCENARIO_KINDS:
        raise UsageError(f"unknown scenario {args.scenario!r}")
    tasks = tuple(args.tasks.split(",")) if args.tasks else scenarios_mod.TASK_ORDER
    kinds = list(scenarios_mod.SCENARIO_KINDS) if args.scenario == "all" else [args.scenario]
    return [scenarios_mod.Scenario(kind, tasks, args.ud if kind == "ud_plus_specific" else None)
            for kind in kinds]


def cmd_scenario_plan(args) -> int:
    registry = _registry_from_args(args)
    rows = []
    total_runs = 0
    total_evals = 0
    for scenario in _scenarios_from_args(args):
        run_plan = scenarios_mod.plan(scenario, registry)
        total_runs += len(run_plan.runs)
        total_evals += run_plan.evaluation_count()
        for run in run_plan.runs:
            rows.append([
                run.run_id, run.scenario_label, run.task,
                " -> ".join("+".join(stage) for stage in run.stages),
                ",".join(run.test_datasets),
            ])
    _emit_table(args, "scenario.plan",
                ["run_id", "scenario", "task", "stages", "tests"], rows)
    if not args.machine:
        sys.stdout.write(f"{total_runs} runs, {total_evals} evaluations\n")
    return 0


def cmd_scenario_run(args) -> int:
    registry = _registry_from_args(args)
    out_dir = args.out or args.output_dir
    if out_dir is None:
        raise MedlatinError("scenario run needs an output directory (--out or config output_dir)")
    os.makedirs(out_dir, exist_ok=True)
    grid: dict = {}
    for scenario in _scenarios_from_args(args):
        run_plan = scenarios_mod.plan(scenario, registry, args.validation_fraction)
        log.info("executing %s: %d runs", scenario.kind, len(run_plan.runs))
        grid.update(scenarios_mod.execute(
            run_plan, registry, output_dir=out_dir, epochs=args.epochs,
            validation_fraction=args.validation_fraction, base_seed=args.seed,
            jobs=args.jobs, drop_unsupported=args.drop_unsupported))
    rows = [[scenario, genre, task, str(acc)]
            for (scenario, genre, task), acc in sorted(grid.items())]
    _emit_table(args, "scenario.run", ["scenario", "genre", "task", "accuracy"], rows)
    return 0


def cmd_scenario_compare(args) -> int:
    rows = scenarios_mod.read_results_file(args.results)
    report = scenarios_mod.compare(scenarios_mod.grid_from_rows(rows))
    if args.machine:
        machine_rows = [
            [e.scenario, e.genre, e.task, str(e.accuracy),
             "best" if e.is_best else "", "worst" if e.is_worst else ""]
            for e in report.entries
        ]
        _emit_table(args, "scenario.compare",
                    ["scenario", "genre", "task", "accuracy", "best", "worst"],
                    machine_rows)
    else:
        sys.stdout.write(scenarios_mod.render_comparison(report))
    return 0


# ------------------------------------------------------------------ eval

def cmd_eval(args) -> int:
    fields = tuple(args.fields.split(","))
    gold = _read_doc(args.gold, args.drop_unsupported)
    predicted = _read_doc(args.pred, args.drop_unsupported)
    report = evaluate(gold, predicted, fields)
    rows = [[f, str(report.accuracy[f]), str(report.matches(f)), str(report.token_count)]
            for f in fields]
    _emit_table(args, "eval", ["field", "accuracy", "matches", "tokens"], rows)
    return 0


# --------------------------------------------------------------- analyze

def _genre_pairs(args) -> dict[str, tuple[Document, Document]]:
    golds, preds = args.gold, args.pred
    if len(golds) != len(preds):
        raise MedlatinError("need as many --gold as --pred files")
    genres = args.genre or []
    if genres and len(genres) != len(golds):
        raise MedlatinError("need as many --genre labels as file pairs")
    pairs = {}
    for i, (g, p) in enumerate(zip(golds, preds)):
        label = genres[i] if genres else os.path.basename(g)
        pairs[label] = (_read_doc(g, args.drop_unsupported),
                        _read_doc(p, args.drop_unsupported))
    return pairs


def cmd_analyze(args) -> int:
    pairs = _genre_pairs(args)
    if args.report == "confusions":
        errors = []
        for gold, pred in pairs.values():
            errors.extend(analysis_mod.lemma_error_pairs(gold, pred, args.include_sym))
        patterns = analysis_mod.mine_confusions(errors)
        by_position: dict[str, int] = {}
        rows = []
        for cp in patterns:
            rank = by_position.get(cp.position, 0) + 1
            by_position[cp.position] = rank
            if rank <= args.top_k:
                rows.append([cp.position, cp.label(), str(cp.count)])
        _emit_table(args, "analyze.confusions", ["position", "pattern", "count"], rows)
    elif args.report == "pos":
        matrix: dict = {}
        for gold, pred in pairs.values():
            for key, count in analysis_mod.pos_confusions(gold, pred).items():
                matrix[key] = matrix.get(key, 0) + count
        ordered = sorted(matrix.items(), key=lambda kv: (-kv[1], kv[0]))
        rows = [[g, p, str(c)] for (g, p), c in ordered]
        _emit_table(args, "analyze.pos", ["gold_upos", "pred_upos", "count"], rows)
    else:  # genres
        reports = {genre: evaluate(gold, pred, (args.field,))
                   for genre, (gold, pred) in pairs.items()}
        dist = analysis_mod.genre_distribution(reports, args.field)
        rows = []
        for genre in dist.counts:
            share = "-" if dist.shares is None else f"{dist.shares[genre]:.4f}"
            rows.append([genre, str(dist.counts[genre]), share])
        _emit_table(args, "analyze.genres", ["genre", "errors", "share"], rows)
    return 0


# ------------------------------------------------------------ validation

def cmd_corpus_check(args) -> int:
    doc = _read_doc(args.infile, args.drop_unsupported)
    violations = validate(doc)
    rows = [[str(v.sent_index), str(v.token_id), v.rule] for v in violations]
    _emit_table(args, "corpus.check", ["sentence", "token", "rule"], rows)
    return 0 if not violations else 1


# ------------------------------------------------------------- plumbing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medlatin",
        description="Training, evaluation and error analysis for Medieval Latin "
                    "lemmatization and morphosyntactic tagging.")
    parser.add_argument("--version", action="version", version=f"medlatin {__version__}")
    parser.add_argument("--config", help="config file (key = value); "
                        f"or set ${CONFIG_ENV_VAR}")
    parser.add_argument("--machine", action="store_true",
                        help="tab-separated output with a versioned header line")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--drop-unsupported", action="store_true",
                        help="drop multiword-range and empty-node lines instead of failing")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = sub.add_parser("corpus", help="corpus statistics and validation")
    corpus_sub = corpus.add_subparsers(dest="subcommand", required=True)
    p = corpus_sub.add_parser("stats", help="token/sentence counts and averages")
    p.add_argument("--registry")
    p.add_argument("--dataset", action="append")
    p.add_argument("--in", dest="infile")
    p.set_defaults(func=cmd_corpus_stats)
    p = corpus_sub.add_parser("validate", help="check declared statistics for consistency")
    p.add_argument("--registry")
    p.add_argument("--tolerance", default="0.05")
    p.set_defaults(func=cmd_corpus_validate)
    p = corpus_sub.add_parser("check", help="report data-model violations in a file")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_corpus_check)

    p = sub.add_parser("normalize", help="rewrite lemmas toward gold orthography")
    p.add_argument("--ruleset", help="ruleset file (default: bundled gold ruleset)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--field", choices=["lemma"], default="lemma")
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalize)

    tagger = sub.add_parser("tagger", help="UPOS / UFeats tagging")
    tagger_sub = tagger.add_subparsers(dest="subcommand", required=True)
    p = tagger_sub.add_parser("train")
    p.add_argument("--task", choices=list(tagger_mod.TASKS), required=True)
    p.add_argument("--in", dest="infile", action="append", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--base", help="continue training from this model")
    p.set_defaults(func=cmd_tagger_train)
    p = tagger_sub.add_parser("tag")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tagger_tag)

    lemmatize = sub.add_parser("lemmatize", help="(form, UPOS) -> lemma")
    lemmatize_sub = lemmatize.add_subparsers(dest="subcommand", required=True)
    p = lemmatize_sub.add_parser("train")
    p.add_argument("--in", dest="infile", action="append", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--base", help="merge counts on top of this model")
    p.set_defaults(func=cmd_lemmatize_train)
    p = lemmatize_sub.add_parser("run", help="read form:UPOS lines, emit one lemma per line")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", help="query file (default: stdin)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lemmatize_run)

    scenario = sub.add_parser("scenario", help="staged training scenarios")
    scenario_sub = scenario.add_subparsers(dest="subcommand", required=True)
    for name, func in (("plan", cmd_scenario_plan), ("run", cmd_scenario_run)):
        p = scenario_sub.add_parser(name)
        p.add_argument("--scenario",
                       choices=list(scenarios_mod.SCENARIO_KINDS) + ["all"])
        p.add_argument("--registry")
        p.add_argument("--tasks", help="comma-separated subset of upos,ufeats,lemma")
        p.add_argument("--ud", help="restrict ud_plus_specific to one treebank")
        if name == "run":
            p.add_argument("--out", help="output directory (models/ and results.tsv)")
            p.add_argument("--epochs", type=int, default=5)
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--jobs", type=int, default=1)
            p.add_argument("--validation-fraction", default="0.1")
        p.set_defaults(func=func)
    p = scenario_sub.add_parser("compare")
    p.add_argument("--results", required=True)
    p.set_defaults(func=cmd_scenario_compare)

    p = sub.add_parser("eval", help="accuracy of predicted vs gold CoNLL-U")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--fields", default=",".join(FIELDS))
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="error analysis reports")
    p.add_argument("--gold", action="append", required=True)
    p.add_argument("--pred", action="append", required=True)
    p.add_argument("--genre", action="append",
                   help="label for each --gold/--pred pair (genres report)")
    p.add_argument("--report", choices=["confusions", "pos", "genres"], required=True)
    p.add_argument("--field", default="lemma",
                   help="field for the genres report (default lemma)")
    p.add_argument("--top-k", type=int, default=5,
                   help="patterns per position in the confusions report")
    p.add_argument("--include-sym", action="store_true",
                   help="keep SYM-token errors in confusion mining")
    p.set_defaults(func=cmd_analyze)

    return parser


def _apply_config(args) -> None:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = load_config(path) if path else {}
    args.output_dir = config.get("output_dir")
    for key in ("registry", "ruleset", "scenario", "tasks", "ud"):
        if getattr(args, key, None) is None and key in config:
            setattr(args, key, config[key])
    if getattr(args, "seed", None) is None:
        args.seed = int(config.get("seed", "0"))
    if args.verbose == 0 and "verbosity" in config:
        args.verbose = int(config["verbosity"])


def run_cli(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(args)
        level = logging.WARNING
        if args.verbose == 1:
            level = logging.INFO
        elif args.verbose >= 2:
            level = logging.DEBUG
        logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except (MedlatinError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
