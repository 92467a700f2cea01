"""Command line: train, parse, evaluate, bench.

Exit status 0 on success, 1 on usage errors, 2 on data or model errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from depframe.bench import benchmark, lengths_from_corpus
from depframe.conllu import ConlluError, read_conllu_file, write_conllu_file
from depframe.decoders import DECODERS
from depframe.evaluation import EvalConfig, evaluate
from depframe.runner import MetricLogger, ModelCheckpoint, ModelConfig, TrainingAborted, train
from depframe.sparse_model import SparseParser
from depframe.trees import DependencyTree, TreeError
from depframe.vocab import Vocabulary

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _vocab_path(model: str) -> str:
    return model + ".vocab"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="depframe", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    t = sub.add_parser("train", help="train the sparse parser")
    t.add_argument("--train", required=True, help="training CoNLL-U")
    t.add_argument("--dev", help="development CoNLL-U")
    t.add_argument("--model", required=True, help="output model path")
    t.add_argument("--config", help="key = value config file; flags override it")
    t.add_argument("--decoder", choices=["eisner", "cle"])
    t.add_argument("--loss", choices=["hinge", "structured-hinge", "crossentropy"])
    t.add_argument("--learner", choices=["perceptron", "mira"])
    t.add_argument("--strategy", choices=["bucket", "padded", "budget"])
    t.add_argument("--epochs", type=int)
    t.add_argument("--batch-size", type=int)
    t.add_argument("--token-budget", type=int)
    t.add_argument("--seed", type=int)
    t.add_argument("--patience", type=int)
    t.add_argument("--min-freq", type=int, dest="min_frequency")
    t.add_argument("--hash-bits", type=int)
    t.add_argument("--mira-c", type=float)
    t.add_argument("--no-lowercase", dest="lowercase", action="store_const", const=False)
    t.add_argument("--no-num-norm", dest="num_norm", action="store_const", const=False)
    t.add_argument("--ignore-punct", dest="ignore_punctuation", action="store_const", const=True)
    t.add_argument("--label-prefix", action="store_const", const=True)
    t.add_argument("--checkpoint", action="store_true", help="write <model>.epoch<k> and <model>.best")

    r = sub.add_parser("parse", help="parse CoNLL-U with a trained model")
    r.add_argument("--model", required=True)
    r.add_argument("--vocab", help="defaults to <model>.vocab")
    r.add_argument("--input", required=True)
    r.add_argument("--output", required=True)
    r.add_argument("--decoder", choices=["eisner", "cle"], default="cle")

    e = sub.add_parser("evaluate", help="UAS/LAS of a prediction file")
    e.add_argument("--gold", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--ignore-punct", action="store_true")
    e.add_argument("--label-prefix", action="store_true")

    b = sub.add_parser("bench", help="time decoders on random scores")
    b.add_argument("--decoder", choices=sorted(DECODERS), default="eisner")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", help="take sentence lengths from this CoNLL-U file")
    src.add_argument("--lengths", help="comma-separated sentence lengths")
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--csv", help="write timings CSV here")
    b.add_argument("--validate", action="store_true", help="check every decoded tree")
    return p


_CONFIG_KEYS = ("decoder", "loss", "learner", "strategy", "epochs", "batch_size", "token_budget", "seed",
                "patience", "min_frequency", "hash_bits", "mira_c", "lowercase", "num_norm",
                "ignore_punctuation", "label_prefix")


def cmd_train(args) -> int:
    overrides = {k: getattr(args, k) for k in _CONFIG_KEYS}
    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    config = ModelConfig.from_text(text, **overrides)
    config.validate()
    train_data = read_conllu_file(args.train)
    dev_data = read_conllu_file(args.dev) if args.dev else []
    callbacks = [MetricLogger(args.model + ".history.jsonl")]
    if args.checkpoint:
        callbacks.append(ModelCheckpoint(args.model))
    model, history = train(config, train_data, dev_data, callbacks)
    model.save(args.model)
    model.vocab.save(_vocab_path(args.model))
    Path(args.model + ".config").write_text(config.to_text(), encoding="utf-8")
    last = history.records[-1]
    print(f"trained {len(history.records)} epochs; best epoch {history.best_epoch}; "
          f"last dev uas {last.dev_uas}")
    return 0


def cmd_parse(args) -> int:
    vocab = Vocabulary.load(args.vocab or _vocab_path(args.model))
    parser = SparseParser.load(args.model, vocab)
    sentences = read_conllu_file(args.input)
    trees = [parser.parse(s, args.decoder) for s in sentences]
    write_conllu_file(args.output, sentences, trees)
    return 0


def cmd_evaluate(args) -> int:
    gold = read_conllu_file(args.gold)
    pred = read_conllu_file(args.pred)
    trees = [DependencyTree(s.heads, s.deprels) for s in pred]
    result = evaluate(gold, trees, EvalConfig(args.ignore_punct, args.label_prefix))
    print(result.format())
    return 0


def cmd_bench(args) -> int:
    if args.corpus:
        lengths = lengths_from_corpus(args.corpus)
    else:
        try:
            lengths = [int(x) for x in args.lengths.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"--lengths must be comma-separated integers, got {args.lengths!r}") from None
    report = benchmark(args.decoder, lengths, args.trials, args.seed, validate=args.validate)
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    print(report.summary())
    for row in report.rows:
        print(f"n={row.n:4d} trials={row.trials:4d} mean={row.mean_seconds:.6f}s std={row.std_seconds:.6f}s")
    return 0


COMMANDS = {"train": cmd_train, "parse": cmd_parse, "evaluate": cmd_evaluate, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, ConlluError, TreeError, TrainingAborted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
