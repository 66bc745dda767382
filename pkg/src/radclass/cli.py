"""Command-line interface: ``radclass <command> [options]``.

Exit status is 0 on success, 1 on runtime failures, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
import zlib
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from .corpus import CorpusError, LabeledCorpus, LabelSchema, Report, SplitSpec
from .eval import (confusion, format_cv, format_metrics, kfold_cv, micro_macro, multiclass_roc,
                   roc_auc, welch_ttest)
from .eval.report import FORMATS, _csv, _table, dumps
from .models import FAMILIES
from .ngram_baseline import NgramRules, NoGapError, ThresholdModel, classify, fit_baseline, load_terms
from .pipeline import STRATEGIES, ModelFileError, TextClassifier
from .preprocess import CleanConfig, preprocess


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    task: str = "binary"
    family: str = "logreg"
    features: str = "count"
    C: float = 1.0
    strategy: str = "ovr"
    seed: int = 0
    positive: str | None = None

    def __post_init__(self):
        if self.task not in ("binary", "multiclass"):
            raise UsageError(f"unknown task {self.task!r}")
        if not self.C > 0:
            raise UsageError("C must be positive")
        if self.task == "binary" and not self.positive:
            raise UsageError("binary task needs --positive CLASS")


def child_seed(seed: int, name: str) -> int:
    """Independent, reproducible seed for one pipeline stage."""
    ss = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(name.encode()),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# IO helpers


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _emit(args, text: str) -> None:
    with _output(getattr(args, "out", None)) as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _fmt(args) -> str:
    return "json" if getattr(args, "json", False) else args.format


def _load_any(manifest, task: str | None = None, positive: str | None = None) -> LabeledCorpus:
    labels = corpus_mod.read_manifest_labels(manifest)
    if task == "binary" and positive and set(labels) <= {positive, f"non-{positive}"}:
        schema = LabelSchema.binary(positive)
        return corpus_mod.load_corpus(manifest, schema)
    schema = LabelSchema.multiclass(labels or [corpus_mod.OTHER])
    corpus = corpus_mod.load_corpus(manifest, schema)
    if task == "binary":
        corpus = corpus_mod.to_binary(corpus, positive)
    return corpus


def _read_reports(path) -> list[Report]:
    src = sys.stdin if path in (None, "-") else open(path, encoding="utf-8")
    try:
        out = []
        for lineno, line in enumerate(src, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                out.append(Report(str(rec["id"]), rec.get("text", ""), rec.get("source")))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"{path or '<stdin>'}:{lineno}: malformed record ({exc})") from None
        return out
    finally:
        if src is not sys.stdin:
            src.close()


def _run_config(args) -> RunConfig:
    return RunConfig(args.task, args.family if isinstance(args.family, str) else args.family[0],
                     args.features, args.C, args.strategy, args.seed, args.positive)


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args) -> int:
    sizes = [int(s) for s in str(args.docs_per_class).split(",")]
    per_class = sizes[0] if len(sizes) == 1 else sizes
    names = args.class_names.split(",") if args.class_names else None
    corpus = corpus_mod.synthesize_corpus(args.n_classes, per_class, args.vocab_per_class, args.overlap,
                                          child_seed(args.seed, "synth"), class_names=names)
    with _output(args.out) as fh:
        for r in corpus.reports:
            fh.write(json.dumps({"id": r.id, "text": r.text, "label": corpus.labels[r.id]}) + "\n")
    return 0


def cmd_ingest(args) -> int:
    if args.text_dir:
        if args.labels:
            with open(args.labels, encoding="utf-8") as fh:
                found = sorted({row["label"] for row in csv.DictReader(fh)})
        else:
            found = []
        corpus = corpus_mod.load_text_dir(args.text_dir, LabelSchema.multiclass(found), args.labels)
        if args.manifest_out:
            corpus_mod.write_manifest(corpus, args.manifest_out)
    else:
        corpus = _load_any(args.manifest)
    stats = corpus_mod.corpus_stats(corpus)
    fmt = _fmt(args)
    if fmt == "json":
        _emit(args, dumps(stats))
    else:
        rows = [[c, stats["per_class_counts"][c], stats["fractions"][c]] for c in stats["per_class_counts"]]
        if fmt == "csv":
            _emit(args, _csv(["class", "count", "fraction"], rows))
        else:
            _emit(args, _table(["class", "count", "fraction"], [[c, n, f"{f:.4f}"] for c, n, f in rows])
                  + f"\nunlabeled: {stats['unlabeled_count']}")
    return 0


def cmd_split(args) -> int:
    corpus = _load_any(args.manifest)
    spec = SplitSpec(args.train_fraction, child_seed(args.seed, "split"), not args.no_stratify)
    train, test = corpus_mod.split(corpus, spec)
    corpus_mod.write_manifest(train, args.train_out)
    corpus_mod.write_manifest(test, args.test_out)
    summary = {"train": corpus_mod.corpus_stats(train), "test": corpus_mod.corpus_stats(test),
               "train_size": len(train), "test_size": len(test)}
    _emit(args, dumps(summary) if _fmt(args) == "json" else
          f"train: {len(train)} reports -> {args.train_out}\ntest: {len(test)} reports -> {args.test_out}")
    return 0


def _fit(cfg: RunConfig, corpus: LabeledCorpus, family: str | None = None) -> TextClassifier:
    return TextClassifier.fit(corpus, family or cfg.family, cfg.features, cfg.C, cfg.strategy)


def cmd_train(args) -> int:
    cfg = _run_config(args)
    corpus = _load_any(args.train, cfg.task, cfg.positive)
    model = _fit(cfg, corpus)
    model.save(args.model_out)
    m = model.model
    n_members = len(m.members) if hasattr(m, "members") else 1
    summary = {"model": str(args.model_out), "task": cfg.task, "family": model.family,
               "strategy": model.strategy, "features": model.weighting, "n_reports": len(corpus),
               "n_features": model.vocabulary.size, "classes": list(model.classes), "n_members": n_members}
    _emit(args, dumps(summary) if _fmt(args) == "json" else
          "\n".join(f"{k}: {v}" for k, v in summary.items()))
    return 0


def cmd_predict(args) -> int:
    model = TextClassifier.load(args.model)
    reports = _read_reports(args.input)
    with _output(args.out) as fh:
        for rec in model.predict_records(reports):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return 0


def _evaluate(truth: list[str], preds: list[str], scores: list[dict] | None, positive: str | None):
    classes = sorted(set(truth) | set(preds) | (set(scores[0]) if scores else set()))
    if positive is not None:
        if positive not in classes:
            raise CorpusError(f"positive class {positive!r} not found")
        neg = [c for c in classes if c != positive]
        if len(neg) != 1:
            raise CorpusError("--positive given but labels are not binary")
        classes = [neg[0], positive]
    cm = confusion(truth, preds, classes)
    rep = micro_macro(cm)
    auc = {}
    y = np.array([classes.index(t) for t in truth])
    if scores and all(c in scores[0] for c in classes):
        S = np.array([[s[c] for c in classes] for s in scores])
        if positive is not None and len(set(y)) == 2:
            auc["binary"] = roc_auc(S[:, 1], y == 1).auc
        elif len(classes) > 2 and np.all(np.isfinite(S)):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                micro, macro = multiclass_roc(S, y, len(classes))
            auc["micro"], auc["macro"] = micro.auc, macro.auc
    rep = type(rep)(**{**rep.__dict__, "auc": auc})
    return cm, rep


def cmd_eval(args) -> int:
    truth_corpus = _load_any(args.truth, "binary" if args.positive else None, args.positive)
    preds = {}
    scores = {}
    with open(args.predictions, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                try:
                    rec = json.loads(line)
                    preds[rec["id"]] = rec["label"]
                    scores[rec["id"]] = rec.get("probabilities") or rec.get("scores")
                except (json.JSONDecodeError, KeyError) as exc:
                    raise CorpusError(f"{args.predictions}:{lineno}: malformed prediction ({exc})") from None
    ids = [r.id for r in truth_corpus.reports if r.id in truth_corpus.labels]
    missing = [i for i in ids if i not in preds]
    if missing:
        raise CorpusError(f"no prediction for {len(missing)} report(s), first: {missing[0]!r}")
    truth = [truth_corpus.labels[i] for i in ids]
    score_list = [scores[i] for i in ids] if all(scores[i] for i in ids) else None
    cm, rep = _evaluate(truth, [preds[i] for i in ids], score_list, args.positive)
    fmt = _fmt(args)
    if fmt == "json":
        _emit(args, dumps({"confusion": cm.to_dict(), "metrics": rep.to_dict()}))
    else:
        _emit(args, format_metrics(rep, fmt))
    return 0


def cmd_cv(args) -> int:
    cfg = _run_config(args)
    corpus = _load_any(args.train, cfg.task, cfg.positive)
    seed = child_seed(args.seed, "cv")
    reports = {}
    for family in args.family:
        name = f"{family} ({cfg.features})"
        reports[name] = kfold_cv(corpus, args.k, lambda c, f=family: _fit(cfg, c, f), seed)
    _emit(args, format_cv(reports, _fmt(args)))
    return 0


def cmd_baseline(args) -> int:
    if args.action == "fit":
        if not args.train or not args.positive:
            raise UsageError("baseline fit needs --train and --positive")
        corpus = _load_any(args.train, "binary", args.positive)
        clean = CleanConfig()
        streams = [preprocess(r.text, clean) for r in corpus.reports]
        flags = [corpus.labels[r.id] == args.positive for r in corpus.reports]
        terms = load_terms(args.terms)
        order = args.order if args.order == "auto" else int(args.order)
        try:
            model = fit_baseline(streams, flags, terms, NgramRules(), order, args.limits)
        except NoGapError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        model.save(args.model_out)
        s = model.stats
        t = welch_ttest(s.positive.mean, s.positive.std, s.positive.n, s.negative.mean, s.negative.std, s.negative.n)
        summary = {"model": str(args.model_out), "order": model.order, "n_bigrams": len(model.sets.bigrams),
                   "n_trigrams": len(model.sets.trigrams), "midpoint": model.midpoint,
                   "threshold": model.threshold, "positive": s.positive.__dict__, "negative": s.negative.__dict__,
                   "ttest": t.__dict__}
        _emit(args, dumps(summary) if _fmt(args) == "json" else
              "\n".join(f"{k}: {v}" for k, v in summary.items()))
        return 0
    if not args.model:
        raise UsageError("baseline predict needs --model")
    model = ThresholdModel.load(args.model)
    positive = args.positive or "positive"
    reports = _read_reports(args.input)
    clean = CleanConfig()
    with _output(args.out) as fh:
        for r in reports:
            tokens = preprocess(r.text, clean)
            label = positive if classify(tokens, model) else f"non-{positive}"
            fh.write(json.dumps({"id": r.id, "label": label, "fraction": model.fraction(tokens)},
                                sort_keys=True) + "\n")
    return 0


def cmd_coeffs(args) -> int:
    model = TextClassifier.load(args.model)
    top, bottom = model.coefficients(args.n, args.class_name)
    fmt = _fmt(args)
    if fmt == "json":
        _emit(args, dumps({"highest": top, "lowest": bottom}))
    elif fmt == "csv":
        _emit(args, _csv(["rank", "highest", "lowest"], [[i + 1, a, b] for i, (a, b) in enumerate(zip(top, bottom))]))
    else:
        _emit(args, _table(["Words with highest coefficients", "Words with lowest coefficients"],
                           [[", ".join(top), ", ".join(bottom)]]))
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_run_flags(p, multi_family: bool = False):
    p.add_argument("--task", choices=("binary", "multiclass"), default="binary")
    p.add_argument("--positive", help="positive class for binary tasks")
    if multi_family:
        p.add_argument("--family", nargs="+", choices=FAMILIES, default=["logreg"])
    else:
        p.add_argument("--family", choices=FAMILIES, default="logreg")
    p.add_argument("--features", choices=("count", "tfidf"), default="count")
    p.add_argument("-C", "--C", type=float, default=1.0, dest="C")
    p.add_argument("--strategy", choices=STRATEGIES, default="ovr")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=FORMATS, default="table")
    common.add_argument("--json", action="store_true", help="shorthand for --format json")
    common.add_argument("--config", help="JSON file of option defaults; flags override it")

    parser = argparse.ArgumentParser(prog="radclass", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["synth"] = sub.add_parser("synth", parents=[common], help="write a synthetic JSONL corpus")
    p.add_argument("--n-classes", type=int, default=2)
    p.add_argument("--docs-per-class", default="50", help="int, or comma list of per-class counts")
    p.add_argument("--vocab-per-class", type=int, default=30)
    p.add_argument("--overlap", type=float, default=0.0)
    p.add_argument("--class-names")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_synth)

    p = subs["ingest"] = sub.add_parser("ingest", parents=[common], help="load a corpus and report statistics")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--manifest")
    g.add_argument("--text-dir")
    p.add_argument("--labels", help="CSV with id,label columns (with --text-dir)")
    p.add_argument("--manifest-out", help="write the ingested directory as a JSONL manifest")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_ingest)

    p = subs["split"] = sub.add_parser("split", parents=[common], help="seeded train/test split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--train-fraction", default="0.75")
    p.add_argument("--no-stratify", action="store_true")
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_split)

    p = subs["train"] = sub.add_parser("train", parents=[common], help="train a classifier")
    p.add_argument("--train", required=True, help="labeled JSONL manifest")
    _add_run_flags(p)
    p.add_argument("--model-out", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_train)

    p = subs["predict"] = sub.add_parser("predict", parents=[common], help="JSONL in, JSONL predictions out")
    p.add_argument("--model", required=True)
    p.add_argument("--input", help="JSONL reports (default stdin)")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_predict)

    p = subs["eval"] = sub.add_parser("eval", parents=[common], help="score predictions against labels")
    p.add_argument("--predictions", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--positive", help="positive class (binary evaluation)")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_eval)

    p = subs["cv"] = sub.add_parser("cv", parents=[common], help="k-fold cross validation")
    p.add_argument("--train", required=True)
    _add_run_flags(p, multi_family=True)
    p.add_argument("-k", "--k", type=int, default=10, dest="k")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_cv)

    p = subs["baseline"] = sub.add_parser("baseline", parents=[common], help="n-gram threshold baseline")
    p.add_argument("action", choices=("fit", "predict"))
    p.add_argument("--train")
    p.add_argument("--positive")
    p.add_argument("--terms", help="term list file (default: packaged chest X-ray terms)")
    p.add_argument("--order", choices=("2", "3", "auto"), default="3")
    p.add_argument("--limits", choices=("std", "extreme"), default="std")
    p.add_argument("--model", help="fitted baseline (predict)")
    p.add_argument("--model-out", default="baseline.json")
    p.add_argument("--input")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_baseline)

    p = subs["coeffs"] = sub.add_parser("coeffs", parents=[common], help="highest/lowest coefficient tokens")
    p.add_argument("--model", required=True)
    p.add_argument("-n", type=int, default=9)
    p.add_argument("--class", dest="class_name")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_coeffs)
    return parser, subs


def main(argv=None) -> int:
    parser, subs = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        subs[args.command].set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        subs[args.command].print_usage(sys.stderr)
        print(f"radclass {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (CorpusError, ModelFileError, ValueError, OSError, KeyError) as exc:
        print(f"radclass {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
