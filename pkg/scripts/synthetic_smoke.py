"""Train on a synthetic separable treebank and print the learning curve.

    python scripts/synthetic_smoke.py [--sentences 200] [--learner mira]
"""
import argparse

from depframe.runner import ModelConfig, train
from depframe.synthetic import separable_treebank


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sentences", type=int, default=200)
    ap.add_argument("--epochs", type=int, default=10)
    ap.add_argument("--learner", choices=["perceptron", "mira"], default="perceptron")
    ap.add_argument("--decoder", choices=["eisner", "cle"], default="cle")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    data = separable_treebank(args.sentences + 50, seed=args.seed)
    config = ModelConfig(decoder=args.decoder, learner=args.learner, epochs=args.epochs,
                         hash_bits=18, min_frequency=1)
    _, history = train(config, data[: args.sentences], data[args.sentences :])
    for r in history.records:
        print(f"epoch {r.epoch:2d}  head errors {r.head_errors:5d}  dev UAS {r.dev_uas:.4f}  LAS {r.dev_las:.4f}")


if __name__ == "__main__":
    main()
