"""Command-line entry point: ``advtext <command> [options]``.

Every command reads the same flat configuration (see ``parse_config``); each
configuration key is also a ``--flag``. Exit status is 0 on success, 1 for
configuration errors, 2 for data errors and 3 for anything else.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from . import __version__
from .attack import AttackConfig, AttackResult, craft
from .candidates import KeywordSets, build_keyword_sets
from .classifier import ModelConfig, load_model, save_model, train
from .errors import AdvTextError, ConfigError, DataError, EmptyDocument
from .evaluation import evaluate_attack, markdown_table, retrain_with_adversarial, write_histogram_csv
from .lexicons import load_lexicons
from .scoring import rank_words
from .textcore import load_corpus

log = logging.getLogger("advtext")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

MODEL_FILE = "model.advtxt"
RETRAINED_FILE = "model_retrained.advtxt"
ATTACKS_FILE = "attacks.jsonl"
KEYWORDS_FILE = "keywords.json"
REPORT_BEFORE = "report_before.json"
REPORT_AFTER = "report_after.json"
REPORT_MD = "report.md"
HISTOGRAM_FILE = "histogram.csv"
CONFIG_ECHO = "config.json"


def _desk(name):
    return str(resources.files("advtext") / "data" / "desk" / name)


_PATH_KEYS = ("train_corpus", "test_corpus", "embeddings", "dictionary", "thesaurus",
              "pos_lexicon", "model", "out")


@dataclass(frozen=True)
class RunConfig:
    # inputs (defaults point at the shipped desk fixture)
    train_corpus: str = _desk("train.csv")
    test_corpus: str = _desk("test.csv")
    corpus_format: str = "csv"
    embeddings: str = _desk("embeddings.txt")
    dictionary: str = _desk("dictionary.txt")
    thesaurus: str = _desk("thesaurus.tsv")
    pos_lexicon: str = _desk("pos_lexicon.tsv")
    model: Optional[str] = None
    out: str = "advtext-out"
    # classifier
    hidden_units: int = 64
    epochs: int = 10
    learning_rate: float = 0.05
    batch_size: int = 32
    l2: float = 1e-4
    architecture: str = "mean-pool"
    conv_window: int = 3
    # attack
    method: str = "loo"
    max_changes: int = 20
    adverb_threshold: float = 0.5
    rerank_each_step: bool = False
    use_genre_keywords: bool = True
    require_pos_match_all: bool = False
    grad_scalar: str = "dot"
    # keyword extraction
    min_count: int = 5
    ratio_threshold: float = 3.0
    seed: int = 0

    def model_config(self) -> ModelConfig:
        return ModelConfig(hidden_units=self.hidden_units, epochs=self.epochs,
                           learning_rate=self.learning_rate, batch_size=self.batch_size,
                           seed=self.seed, l2=self.l2, architecture=self.architecture,
                           conv_window=self.conv_window)

    def attack_config(self, **changes) -> AttackConfig:
        cfg = AttackConfig(method=self.method, max_changes=self.max_changes,
                           adverb_threshold=self.adverb_threshold,
                           rerank_each_step=self.rerank_each_step,
                           use_genre_keywords=self.use_genre_keywords,
                           require_pos_match_all=self.require_pos_match_all,
                           grad_scalar=self.grad_scalar)
        return replace(cfg, **changes)

    def parameters(self) -> dict:
        """Everything except file locations; embedded in reports."""
        return {k: v for k, v in asdict(self).items() if k not in _PATH_KEYS}

    def validate(self, need=("train_corpus", "test_corpus", "embeddings", "dictionary",
                             "thesaurus", "pos_lexicon")) -> "RunConfig":
        for key in need:
            value = getattr(self, key)
            if not value:
                raise ConfigError(f"{key} is not set", field=key)
            if not Path(value).exists():
                raise ConfigError(f"{key}: no such file or directory: {value}", field=key)
        if self.corpus_format not in ("csv", "directory"):
            raise ConfigError("corpus_format must be 'csv' or 'directory'", field="corpus_format")
        self.model_config()
        self.attack_config()
        if self.min_count < 1:
            raise ConfigError("min_count must be positive", field="min_count")
        if not self.ratio_threshold > 1:
            raise ConfigError("ratio_threshold must exceed 1", field="ratio_threshold")
        return self


_KINDS = {f.name: f.type for f in fields(RunConfig)}


def _convert(key, raw: str):
    kind = _KINDS[key]
    raw = raw.strip()
    try:
        if kind == "bool":
            value = configparser.ConfigParser.BOOLEAN_STATES.get(raw.lower())
            if value is None:
                raise ValueError(f"not a boolean: {raw!r}")
            return value
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}", field=key) from None
    if kind == "Optional[str]" and raw.lower() in ("", "none"):
        return None
    return raw


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` and ``;`` start comments.

    Relative paths are resolved against the file's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", field="config")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string("[run]\n" + path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}", field="config") from None
    values = {}
    for raw_key, raw in parser.items("run"):
        key = raw_key.replace("-", "_")
        if key not in _KINDS:
            raise ConfigError(f"{path}: unknown key {raw_key!r}", field=raw_key)
        value = _convert(key, raw)
        if key in _PATH_KEYS and value is not None and not Path(value).is_absolute():
            value = str(path.parent / value)
        values[key] = value
    return values


def parse_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    """Defaults, then the config file (if any), then ``overrides`` (flag values,
    either typed or as strings)."""
    values = read_config_file(path) if path else {}
    for key, value in (overrides or {}).items():
        key = key.replace("-", "_")
        if key not in _KINDS:
            raise ConfigError(f"unknown key {key!r}", field=key)
        values[key] = _convert(key, value) if isinstance(value, str) else value
    return RunConfig(**values)


# -- steps shared by the subcommands and the pipeline ------------------------------

def load_inputs(cfg: RunConfig):
    lex = load_lexicons(cfg.embeddings, cfg.dictionary, cfg.thesaurus, cfg.pos_lexicon)
    return lex


def read_corpus(path, cfg: RunConfig, lex):
    return load_corpus(path, format=cfg.corpus_format, lexicon=lex.pos)


def step_train(cfg, lex, train_corpus):
    return train(train_corpus, lex.embeddings, cfg.model_config())


def step_keywords(cfg, train_corpus) -> KeywordSets:
    return build_keyword_sets(train_corpus, cfg.min_count, cfg.ratio_threshold)


def step_attack(cfg, model, lex, ks, corpus):
    acfg = cfg.attack_config()
    results = []
    for doc in corpus.documents:
        if len(doc) == 0:
            raise EmptyDocument(f"document {doc.id!r} has no tokens")
        results.append(craft(model, doc, lex, ks, acfg))
    return results


def step_evaluate(cfg, model, corpus, results):
    return evaluate_attack(model, corpus, results, config=cfg.parameters())


def step_retrain(cfg, model, lex, ks, train_corpus):
    return retrain_with_adversarial(model, train_corpus, lex, ks, cfg.attack_config(),
                                    cfg.model_config())


def _dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def write_attacks(results, path):
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")


def read_attacks(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(AttackResult.from_dict(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: bad attack record ({exc})") from None
    return out


def write_report(report, path, retrain=None):
    data = report.to_dict()
    if retrain is not None:
        data["retrain"] = retrain
    _dump_json(data, path)


def run_pipeline(cfg: RunConfig) -> int:
    """Train, attack the test split, evaluate, retrain on adversarial training
    samples and evaluate the retrained model on the clean and adversarial test sets."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(asdict(cfg), out / CONFIG_ECHO)
    lex = load_inputs(cfg)
    train_corpus = read_corpus(cfg.train_corpus, cfg, lex)
    test_corpus = read_corpus(cfg.test_corpus, cfg, lex)

    log.info("training on %d documents", len(train_corpus))
    model = step_train(cfg, lex, train_corpus)
    save_model(model, out / MODEL_FILE)
    ks = step_keywords(cfg, train_corpus)
    _dump_json(ks.to_dict(), out / KEYWORDS_FILE)

    log.info("attacking %d test documents", len(test_corpus))
    results = step_attack(cfg, model, lex, ks, test_corpus)
    write_attacks(results, out / ATTACKS_FILE)
    before = step_evaluate(cfg, model, test_corpus, results)
    write_report(before, out / REPORT_BEFORE)
    write_histogram_csv(before, out / HISTOGRAM_FILE)

    log.info("retraining with adversarial training samples")
    rr = step_retrain(cfg, model, lex, ks, train_corpus)
    save_model(rr.model, out / RETRAINED_FILE)
    after = step_evaluate(cfg, rr.model, test_corpus, results)
    write_report(after, out / REPORT_AFTER, _retrain_summary(rr))
    title = "with genre keywords" if cfg.use_genre_keywords else "without genre keywords"
    (out / REPORT_MD).write_text(markdown_table(before, after, title=title), encoding="utf-8")
    log.info("accuracy %.4f -> %.4f adversarial; retrained %.4f clean, %.4f adversarial",
             before.accuracy_original, before.accuracy_adversarial,
             after.accuracy_original, after.accuracy_adversarial)
    return EXIT_OK


def _retrain_summary(rr):
    return {"augmented_size": rr.augmented_size, "n_added": rr.n_added}


# -- subcommands --------------------------------------------------------------------

def _model_path(cfg, args):
    path = cfg.model or str(Path(cfg.out) / MODEL_FILE)
    if not Path(path).is_file():
        raise ConfigError(f"model: no such file: {path}", field="model")
    return path


def _keywords(cfg, args, lex):
    if getattr(args, "keywords", None):
        try:
            return KeywordSets.from_dict(json.loads(Path(args.keywords).read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            raise DataError(f"{args.keywords}: cannot read keyword sets ({exc})") from None
    return step_keywords(cfg, read_corpus(cfg.train_corpus, cfg, lex))


def cmd_train(cfg, args):
    cfg.validate(need=("train_corpus", "embeddings", "pos_lexicon"))
    lex = load_inputs(cfg)
    model = step_train(cfg, lex, read_corpus(cfg.train_corpus, cfg, lex))
    path = Path(args.model_out) if args.model_out else Path(cfg.out) / MODEL_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, path)
    log.info("wrote %s (final loss %.4f)", path, model.loss_history[-1])


def cmd_keywords(cfg, args):
    cfg.validate(need=("train_corpus", "pos_lexicon"))
    lex = load_inputs(cfg)
    ks = step_keywords(cfg, read_corpus(cfg.train_corpus, cfg, lex))
    _dump_json(ks.to_dict(), args.json_out)


def cmd_score(cfg, args):
    cfg.validate(need=("embeddings", "pos_lexicon"))
    model = load_model(_model_path(cfg, args))
    lex = load_inputs(cfg)
    if args.text is not None:
        from .textcore import make_document
        doc = make_document("text", args.text, model.label_order[0], lexicon=lex.pos)
    else:
        corpus = read_corpus(args.corpus or cfg.test_corpus, cfg, lex)
        docs = {d.id: d for d in corpus.documents}
        if args.doc not in docs:
            raise DataError(f"no document with id {args.doc!r}")
        doc = docs[args.doc]
    ranking = rank_words(model, doc, cfg.method, cfg.grad_scalar)
    _dump_json([e.to_dict() for e in ranking])


def cmd_attack(cfg, args):
    cfg.validate()
    model = load_model(_model_path(cfg, args))
    lex = load_inputs(cfg)
    corpus = read_corpus(args.corpus or cfg.test_corpus, cfg, lex)
    results = step_attack(cfg, model, lex, _keywords(cfg, args, lex), corpus)
    path = Path(args.results_out) if args.results_out else Path(cfg.out) / ATTACKS_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    write_attacks(results, path)
    log.info("%d/%d attacks succeeded; wrote %s", sum(r.success for r in results), len(results), path)


def cmd_evaluate(cfg, args):
    cfg.validate(need=("test_corpus", "embeddings", "pos_lexicon"))
    model = load_model(_model_path(cfg, args))
    lex = load_inputs(cfg)
    corpus = read_corpus(args.corpus or cfg.test_corpus, cfg, lex)
    attacks = args.attacks or str(Path(cfg.out) / ATTACKS_FILE)
    if not Path(attacks).is_file():
        raise ConfigError(f"attacks: no such file: {attacks}", field="attacks")
    report = step_evaluate(cfg, model, corpus, read_attacks(attacks))
    write_report(report, args.report)
    if args.markdown:
        Path(args.markdown).write_text(markdown_table(report), encoding="utf-8")
    if args.histogram:
        write_histogram_csv(report, args.histogram)


def cmd_retrain(cfg, args):
    cfg.validate(need=("train_corpus", "embeddings", "dictionary", "thesaurus", "pos_lexicon"))
    model = load_model(_model_path(cfg, args))
    lex = load_inputs(cfg)
    train_corpus = read_corpus(cfg.train_corpus, cfg, lex)
    ks = _keywords(cfg, args, lex)
    rr = step_retrain(cfg, model, lex, ks, train_corpus)
    path = Path(args.model_out) if args.model_out else Path(cfg.out) / RETRAINED_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    save_model(rr.model, path)
    _dump_json(_retrain_summary(rr))


def cmd_pipeline(cfg, args):
    return run_pipeline(cfg)


def cmd_make_fixture(cfg, args):
    from .fixture import write_fixture
    write_fixture(args.fixture_out)
    log.info("wrote desk fixture to %s", args.fixture_out)


# -- argument parsing ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _config_flags():
    p = _Parser(add_help=False)
    g = p.add_argument_group("configuration (each overrides the config file)")
    g.add_argument("--config", help="flat key = value configuration file")
    for f in fields(RunConfig):
        if f.name == "out":
            continue
        flag = "--" + f.name.replace("_", "-")
        g.add_argument(flag, dest=f.name, default=None, metavar=f.name.upper())
    g.add_argument("--no-genre-keywords", dest="use_genre_keywords", action="store_const",
                   const="false", help="same as --use-genre-keywords false")
    g.add_argument("--rerank", dest="rerank_each_step", action="store_const", const="true",
                   help="same as --rerank-each-step true")
    g.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _config_flags()
    parser = _Parser(prog="advtext", description="Craft and evaluate adversarial text samples.")
    parser.add_argument("--version", action="version", version=f"advtext {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = add("train", cmd_train, "train the classifier on the training corpus")
    p.add_argument("--out", dest="out", help="output directory (model.advtxt is written there)")
    p.add_argument("--model-out", help="explicit path for the trained model")

    p = add("keywords", cmd_keywords, "print class and genre keyword sets as JSON")
    p.add_argument("--out", dest="json_out", help="write JSON here instead of stdout")

    p = add("score", cmd_score, "print word contribution scores of one document as JSON")
    p.add_argument("--corpus", help="corpus holding the document (default: test corpus)")
    who = p.add_mutually_exclusive_group(required=True)
    who.add_argument("--doc", help="document id")
    who.add_argument("--text", help="raw text to score")

    p = add("attack", cmd_attack, "craft adversarial samples for every document of a corpus")
    p.add_argument("--corpus", help="corpus to attack (default: test corpus)")
    p.add_argument("--keywords", help="keyword sets JSON from 'advtext keywords'")
    p.add_argument("--out", dest="results_out", help="JSON-lines output (default: OUT/attacks.jsonl)")

    p = add("evaluate", cmd_evaluate, "compute the evaluation report for saved attack results")
    p.add_argument("--corpus", help="attacked corpus (default: test corpus)")
    p.add_argument("--attacks", help="JSON-lines attack results")
    p.add_argument("--out", dest="report", help="report JSON path (default: stdout)")
    p.add_argument("--markdown", help="also write a markdown table here")
    p.add_argument("--histogram", help="also write the edit-count histogram CSV here")

    p = add("retrain", cmd_retrain, "retrain with adversarial versions of the training documents")
    p.add_argument("--keywords", help="keyword sets JSON from 'advtext keywords'")
    p.add_argument("--out", dest="model_out", help="retrained model path (default: OUT/model_retrained.advtxt)")

    p = add("pipeline", cmd_pipeline, "run train, attack, evaluate, retrain and re-evaluate")
    p.add_argument("--out", dest="out", help="output directory for all artifacts")

    p = sub.add_parser("make-fixture", help="write the synthetic desk fixture")
    p.add_argument("--out", dest="fixture_out", required=True, help="target directory")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_make_fixture)
    return parser


def config_from_args(args) -> RunConfig:
    overrides = {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    return parse_config(getattr(args, "config", None), overrides)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"advtext: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(args) if args.command != "make-fixture" else None
        status = args.func(cfg, args)
        return EXIT_OK if status is None else status
    except ConfigError as exc:
        print(f"advtext: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, EmptyDocument, OSError) as exc:
        print(f"advtext: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AdvTextError as exc:
        print(f"advtext: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        log.exception("unexpected failure")
        print(f"advtext: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
