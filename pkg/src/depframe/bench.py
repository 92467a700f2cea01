"""Decoder timing over random uniform score matrices.

One trial decodes every sentence length in the dataset once; the report's
total is the mean wall-clock time of a trial.
"""
from __future__ import annotations

import csv
import io
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from depframe.conllu import read_conllu_file
from depframe.decoders import get_decoder, prepare_scores
from depframe.trees import check_arborescence, is_projective


@dataclass(frozen=True)
class LengthRow:
    n: int
    trials: int
    mean_seconds: float
    std_seconds: float


@dataclass
class BenchReport:
    decoder: str
    sentence_count: int
    trials: int
    total_seconds: float
    rows: list[LengthRow]
    timings: list[tuple[int, int, float]] = field(default_factory=list)  # (n, trial, seconds)

    @property
    def sentences_per_second(self) -> float:
        return self.sentence_count / self.total_seconds

    def row(self, n: int) -> LengthRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["decoder", "n", "trial", "seconds"])
        for n, trial, sec in self.timings:
            w.writerow([self.decoder, n, trial, f"{sec:.9f}"])
        out.write("\n")
        w.writerow(["decoder", "n", "trials", "mean_seconds", "std_seconds"])
        for r in self.rows:
            w.writerow([self.decoder, r.n, r.trials, f"{r.mean_seconds:.9f}", f"{r.std_seconds:.9f}"])
        out.write("\n")
        w.writerow(["decoder", "sentences", "trials", "total_seconds", "sentences_per_second"])
        w.writerow([self.decoder, self.sentence_count, self.trials, f"{self.total_seconds:.6f}",
                    f"{self.sentences_per_second:.1f}"])
        return out.getvalue()

    def summary(self) -> str:
        return (f"{self.decoder}: {self.sentence_count} sentences, {self.total_seconds:.4f} s per pass, "
                f"{self.sentences_per_second:.0f} sents/s")


def generate_random_scores(n: int, seed: int | np.random.Generator) -> np.ndarray:
    """(n+1, n+1) matrix with entries i.i.d. uniform on [0, 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.random((n + 1, n + 1))


def lengths_from_corpus(path) -> list[int]:
    return [len(s) for s in read_conllu_file(path)]


def _validate(name: str, heads) -> None:
    check_arborescence(heads)
    if name.startswith("eisner") and not is_projective(heads):
        raise AssertionError(f"{name} returned a non-projective tree")


def benchmark(decoder: str, lengths: Sequence[int], trials_per_length: int = 10, seed: int = 1,
              validate: bool = False, warmup: int = 3) -> BenchReport:
    if trials_per_length < 3:
        raise ValueError("need at least 3 trials")
    if not lengths:
        raise ValueError("no sentence lengths to benchmark")
    fn = get_decoder(decoder)
    rng = np.random.default_rng(seed)
    for n in sorted(set(lengths))[:warmup] or [1]:
        fn(generate_random_scores(n, rng))
    per_length: dict[int, list[float]] = defaultdict(list)
    timings = []
    trial_totals = []
    for trial in range(trials_per_length):
        total = 0.0
        for n in lengths:
            s = prepare_scores(generate_random_scores(n, rng))
            start = time.perf_counter()
            tree = fn(s)
            elapsed = time.perf_counter() - start
            if validate:
                _validate(decoder, tree.heads)
            total += elapsed
            per_length[n].append(elapsed)
            timings.append((n, trial, elapsed))
        trial_totals.append(total)
    rows = [
        LengthRow(n, len(v), float(np.mean(v)), float(np.std(v, ddof=1)) if len(v) > 1 else 0.0)
        for n, v in sorted(per_length.items())
    ]
    return BenchReport(decoder, len(lengths), trials_per_length, float(np.mean(trial_totals)), rows, timings)
