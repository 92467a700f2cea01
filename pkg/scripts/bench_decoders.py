"""Time every decoder on random scores and write one CSV per decoder.

    python scripts/bench_decoders.py --out results/bench [--corpus dev.conllu]

Without --corpus the lengths come from a UD-like gamma law (mean 16). A
second pass over n = 10, 20, ..., 80 gives the per-length mean/std curve.
"""
import argparse
from pathlib import Path

from depframe.bench import benchmark, lengths_from_corpus
from depframe.decoders import DECODERS
from depframe.synthetic import ud_like_lengths


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/bench")
    ap.add_argument("--corpus")
    ap.add_argument("--sentences", type=int, default=2000)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--curve-trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--skip-reference", action="store_true", help="the pure-Python decoders are slow")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lengths = lengths_from_corpus(args.corpus) if args.corpus else ud_like_lengths(args.sentences, args.seed)
    names = [n for n in sorted(DECODERS) if not (args.skip_reference and n.endswith("reference"))]
    for name in names:
        report = benchmark(name, lengths, args.trials, args.seed)
        (out / f"{name}_corpus.csv").write_text(report.to_csv(), encoding="utf-8")
        print(report.summary())

    curve = list(range(10, 81, 10))
    for name in names:
        report = benchmark(name, curve, args.curve_trials, args.seed)
        (out / f"{name}_curve.csv").write_text(report.to_csv(), encoding="utf-8")
        for row in report.rows:
            print(f"{name:16s} n={row.n:3d} mean={row.mean_seconds * 1e3:8.4f} ms std={row.std_seconds * 1e3:8.4f} ms")


if __name__ == "__main__":
    main()
