"""Train the sparse parser on a UD treebank and report UAS/LAS without punctuation.

    python scripts/train_ud.py /path/to/UD_English-EWT [--epochs 30] [--decoder cle]

Expects the usual ``*-ud-{train,dev,test}.conllu`` file names.
"""
import argparse
import logging
from pathlib import Path

from depframe.conllu import read_conllu_file
from depframe.evaluation import EvalConfig, evaluate
from depframe.runner import MetricLogger, ModelConfig, train


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("treebank")
    ap.add_argument("--out", default="results/ud")
    ap.add_argument("--config", help="key = value file; flags below override it")
    ap.add_argument("--epochs", type=int)
    ap.add_argument("--decoder", choices=["eisner", "cle"])
    ap.add_argument("--learner", choices=["perceptron", "mira"])
    ap.add_argument("--patience", type=int)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    root = Path(args.treebank)
    split = {k: next(root.glob(f"*-ud-{k}.conllu")) for k in ("train", "dev", "test")}
    text = Path(args.config).read_text() if args.config else ""
    config = ModelConfig.from_text(text, epochs=args.epochs, decoder=args.decoder, learner=args.learner,
                                   patience=args.patience, ignore_punctuation=True)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_data = read_conllu_file(split["train"])
    dev = read_conllu_file(split["dev"])
    model, history = train(config, train_data, dev, [MetricLogger(out / "history.jsonl")])
    model.save(out / "model")
    model.vocab.save(out / "model.vocab")
    print(f"best epoch {history.best_epoch} of {len(history.records)}")
    for name in ("dev", "test"):
        data = dev if name == "dev" else read_conllu_file(split["test"])
        r = evaluate(data, model.run(data), EvalConfig(ignore_punctuation=True))
        print(f"{name}: UAS {100 * r.uas:.2f}  LAS {100 * r.las:.2f}  (no punctuation)")


if __name__ == "__main__":
    main()
