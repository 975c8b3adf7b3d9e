"""Command-line entry point: ``untrans <subcommand> [options]``.

Data goes to stdout (or ``--out``); diagnostics and the run manifest go to
stderr. Exit status is 0 on success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import logging
import sys
import time

from . import __version__
from .annotate import annotate_corpus, annotation_stats, load_human_annotations
from .corpus import (
    BilingualDictionary,
    FrequencyTable,
    PronunciationDictionary,
    dump_corpus,
    load_bilingual_dictionary,
    load_corpus,
    load_frequency_table,
    load_pronunciation_dict,
)
from .errors import DomainError
from .evaluation import (
    AblationReport,
    EvalReport,
    ablation,
    cross_validate,
    format_table,
    write_pr_csv,
)
from .features import ABLATION_GROUPS, FEATURE_VERSION, FeatureConfig, Resources, gold_examples, write_feature_matrix
from .model import DEFAULT_GRID, TrainConfig, dumps, load_model, train
from .tagger import tag_sentence, tag_stream, talk_events

log = logging.getLogger("untrans")

COMMANDS = ("annotate", "stats", "train", "cv", "ablate", "predict", "stream", "report")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _add_common(p):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write data here instead of stdout")
    p.add_argument("--config", help="JSON file of option defaults (flags win)")
    p.add_argument("--manifest", help="write the run manifest here instead of stderr")


def _add_resources(p, corpus=True):
    if corpus:
        p.add_argument("--corpus", required=True)
    p.add_argument("--dict", action="append", default=[], metavar="TSV",
                   help="bilingual dictionary (repeatable)")
    p.add_argument("--freq", help="word<TAB>count frequency table")
    p.add_argument("--pron", help="CMU pronunciation dictionary")


def _add_features(p):
    p.add_argument("--window", type=int, default=8, help="sliding window size k")
    p.add_argument("--bins", type=int, default=9, help="word frequency bins")
    p.add_argument("--timing-horizon", type=float, default=5.0, help="seconds m for the speech-rate count")
    p.add_argument("--ablate", action="append", default=[], choices=ABLATION_GROUPS + ("history",),
                   help="drop a feature group (repeatable)")


def _add_training(p):
    p.add_argument("--rank", default="B", choices=("B", "A", "S"))
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--class-weight", default="inverse-frequency", choices=("inverse-frequency", "uniform"))


def build_parser():
    parser = argparse.ArgumentParser(prog="untrans", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("annotate", help="tag untranslated terms (IO) in a corpus")
    _add_resources(p)
    p.add_argument("--human", action="append", default=[], help="human annotation TSV (repeatable)")
    p.add_argument("--rank", action="append", choices=("B", "A", "S"),
                   help="interpreter rank(s) to annotate (default: all present)")
    _add_common(p)

    p = sub.add_parser("stats", help="annotation statistics of an annotated corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=("text", "json", "kv"), default="text")
    _add_common(p)

    p = sub.add_parser("train", help="train a tagger on an annotated corpus")
    _add_resources(p)
    _add_features(p)
    _add_training(p)
    p.add_argument("-C", type=float, default=1.0, help="SVM penalty term")
    p.add_argument("--dump-features", metavar="TSV", help="also write the training feature matrix")
    _add_common(p)

    for name, helptext in (("cv", "leave-one-talk-out cross-validation"),
                           ("ablate", "cross-validation with feature ablation")):
        p = sub.add_parser(name, help=helptext)
        _add_resources(p)
        _add_features(p)
        _add_training(p)
        p.add_argument("--grid", default="default",
                       help="'default' or comma-separated C values")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--pr-csv", help="write precision-recall points as CSV")
        p.add_argument("--bootstrap", type=int, default=1000, help="bootstrap iterations")
        if name == "ablate":
            p.add_argument("--ranks", default="B", help="comma-separated ranks, e.g. B,A,S")
            p.add_argument("--groups", default=",".join(ABLATION_GROUPS),
                           help="comma-separated groups to ablate one at a time")
        _add_common(p)

    p = sub.add_parser("predict", help="tag a corpus with a trained model (TSV)")
    _add_resources(p)
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--rank", default="B", help="rank whose gold tags fill the gold column")
    _add_common(p)

    p = sub.add_parser("stream", help="replay a corpus as a timed token stream")
    _add_resources(p)
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--speed", type=float, default=0.0, help="replay speed factor; 0 = no pacing")
    _add_common(p)

    p = sub.add_parser("report", help="render a saved cv/ablate JSON report")
    p.add_argument("--input", required=True)
    p.add_argument("--pr-csv")
    p.add_argument("--metric", choices=("mean_ap", "pooled_ap"), default="mean_ap")
    _add_common(p)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config, encoding="utf-8") as fh:
            defaults = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read --config: {exc}")
    defaults = {k.replace("-", "_"): v for k, v in defaults.items()}
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            dests = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in defaults.items() if k in dests})


# ---------------------------------------------------------------------------


def _resources(args):
    dictionary = load_bilingual_dictionary(args.dict) if args.dict else BilingualDictionary()
    freq = load_frequency_table(args.freq) if args.freq else FrequencyTable()
    pron = load_pronunciation_dict(args.pron) if args.pron else PronunciationDictionary()
    return Resources(freq, dictionary, pron)


def _feature_config(args):
    cfg = FeatureConfig(window_size=args.window, frequency_bins=args.bins,
                        timing_horizon=args.timing_horizon)
    return cfg.without(*args.ablate) if args.ablate else cfg


def _grid(text):
    if text == "default":
        return DEFAULT_GRID
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise DomainError(f"bad --grid value {text!r}") from None


def _input_paths(args):
    paths = []
    for key in ("corpus", "model", "freq", "pron", "input", "config"):
        v = getattr(args, key, None)
        if v:
            paths.append(v)
    paths += list(getattr(args, "dict", []) or []) + list(getattr(args, "human", []) or [])
    return paths


def _manifest(args, argv):
    resolved = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    return {
        "command": args.command,
        "argv": list(argv),
        "config": resolved,
        "inputs": {p: _sha256(p) for p in _input_paths(args)},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "feature_registry": FEATURE_VERSION,
    }


def cmd_annotate(args, out):
    talks = load_corpus(args.corpus)
    dictionary = load_bilingual_dictionary(args.dict) if args.dict else BilingualDictionary()
    human = [h for path in args.human for h in load_human_annotations(path)]
    annotated = annotate_corpus(talks, dictionary, human, ranks=args.rank)
    review = sum(1 for t in annotated for tr in t.triples for s in tr.terms if s.needs_review)
    if review:
        log.warning("%d term judgements default to untranslated and need human review", review)
    dump_corpus(annotated, out)


def cmd_stats(args, out):
    stats = annotation_stats(load_corpus(args.corpus))
    if args.format == "json":
        out.write(json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n")
    elif args.format == "kv":
        for k, v in stats.key_values().items():
            out.write(f"{k}\t{v}\n")
    else:
        out.write(stats.format_text() + "\n")


def cmd_train(args, out):
    talks = load_corpus(args.corpus)
    resources = _resources(args)
    fconfig = _feature_config(args)
    examples = gold_examples(talks, args.rank, fconfig, resources)
    if args.dump_features:
        with open(args.dump_features, "w", encoding="utf-8") as fh:
            write_feature_matrix(examples, fh)
    tconfig = TrainConfig(C=args.C, epochs=args.epochs, seed=args.seed, class_weight_mode=args.class_weight)
    model = train([(v, y) for v, y, _ in examples], tconfig, FEATURE_VERSION)
    model.feature_config = fconfig.to_dict()
    out.write(dumps(model))


def _cv_kwargs(args):
    return dict(
        grid=_grid(args.grid),
        train_config=TrainConfig(epochs=args.epochs, seed=args.seed, class_weight_mode=args.class_weight),
        resources=_resources(args), jobs=args.jobs, bootstrap_iterations=args.bootstrap,
    )


def _emit_reports(args, reports, out):
    if args.format == "json":
        payload = {r: rep.to_dict() for r, rep in reports.items()}
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        out.write(format_table(reports) + "\n")
    if args.pr_csv:
        with open(args.pr_csv, "w", encoding="utf-8") as fh:
            write_pr_csv(reports, fh)


def cmd_cv(args, out):
    talks = load_corpus(args.corpus)
    label = "all" if not args.ablate else "-" + ",-".join(args.ablate)
    rep = cross_validate(talks, args.rank, feature_config=_feature_config(args), label=label, **_cv_kwargs(args))
    _emit_reports(args, {args.rank: rep}, out)


def cmd_ablate(args, out):
    talks = load_corpus(args.corpus)
    groups = [g for g in args.groups.split(",") if g]
    kwargs = _cv_kwargs(args)
    reports = {}
    for rank in [r for r in args.ranks.split(",") if r]:
        if rank not in ("B", "A", "S"):
            raise DomainError(f"unknown rank {rank!r}")
        reports[rank] = ablation(talks, rank, groups, feature_config=_feature_config(args), **kwargs)
    _emit_reports(args, reports, out)


def _model_and_config(args):
    model = load_model(args.model)
    fconfig = FeatureConfig.from_dict(model.feature_config) if model.feature_config else FeatureConfig()
    return model, fconfig


def _fmt_score(score):
    return "" if score is None else repr(score)


def cmd_predict(args, out):
    talks = load_corpus(args.corpus)
    model, fconfig = _model_and_config(args)
    resources = _resources(args)
    out.write("talk_id\tsentence_index\ttoken_index\tsurface\tis_candidate\tscore\tlabel\tgold\n")
    for talk in talks:
        for triple in talk.triples:
            gold = triple.gold.get(args.rank)
            preds = tag_sentence(model, fconfig, triple.source, resources, args.threshold)
            for i, p in enumerate(preds):
                out.write(f"{talk.talk_id}\t{triple.source.sentence_index}\t{i}\t{p.token.surface}\t"
                          f"{int(p.is_candidate)}\t{_fmt_score(p.score)}\t{p.label}\t"
                          f"{gold[i] if gold else ''}\n")


def stream_replay(talks, model, fconfig, resources, threshold, speed, out, sleep=time.sleep):
    """Replay talks as timed token events; one output line per token."""
    for talk in talks:
        events = list(talk_events(talk))
        prev = None
        for ev, p in zip(events, tag_stream(model, fconfig, iter(events), resources, threshold)):
            if speed > 0 and prev is not None:
                delay = (ev.token.start_time - prev) / speed
                if delay > 0:
                    sleep(delay)
            prev = ev.token.start_time
            line = (f"{ev.talk_id}\t{ev.sentence_index}\t{ev.token.sent_word_index}\t"
                    f"{ev.token.surface}\t{_fmt_score(p.score)}\t{p.label}")
            if p.is_candidate and p.score > threshold:
                line += "\tALERT"
            out.write(line + "\n")
            out.flush()


def cmd_stream(args, out):
    talks = load_corpus(args.corpus)
    model, fconfig = _model_and_config(args)
    if args.speed < 0:
        raise DomainError("--speed must be >= 0")
    stream_replay(talks, model, fconfig, _resources(args), args.threshold, args.speed, out)


def cmd_report(args, out):
    with open(args.input, encoding="utf-8") as fh:
        payload = json.load(fh)
    reports = {}
    for rank, d in payload.items():
        if "rows" in d:
            reports[rank] = AblationReport(d["rank"], [(r["label"], EvalReport.from_dict(r["report"])) for r in d["rows"]])
        else:
            reports[rank] = EvalReport.from_dict(d)
    out.write(format_table(reports, args.metric) + "\n")
    if args.pr_csv:
        with open(args.pr_csv, "w", encoding="utf-8") as fh:
            write_pr_csv(reports, fh)


HANDLERS = {
    "annotate": cmd_annotate, "stats": cmd_stats, "train": cmd_train, "cv": cmd_cv,
    "ablate": cmd_ablate, "predict": cmd_predict, "stream": cmd_stream, "report": cmd_report,
}


@contextlib.contextmanager
def _output(path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
    else:
        yield sys.stdout


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        with _output(args.out) as out:
            HANDLERS[args.command](args, out)
        manifest = json.dumps(_manifest(args, argv), sort_keys=True)
        if args.manifest:
            with open(args.manifest, "w", encoding="utf-8") as fh:
                fh.write(manifest + "\n")
        else:
            print(f"manifest\t{manifest}", file=sys.stderr)
    except (DomainError, OSError) as exc:
        print(f"untrans {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
