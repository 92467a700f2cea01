"""Batching strategies: length buckets, fixed-size padding, token budgets.

Every batch keeps the ROOT column at position 0, so a sentence of n tokens
occupies n + 1 columns.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from depframe.vocab import PAD, EncodedSentence


@dataclass(frozen=True)
class Batch:
    word_ids: np.ndarray  # (B, Lmax + 1)
    upos_ids: np.ndarray
    lengths: np.ndarray  # (B,)
    mask: np.ndarray  # (B, Lmax + 1), True on ROOT and real tokens
    gold_heads: np.ndarray  # (B, Lmax), PAD beyond each length
    gold_label_ids: np.ndarray
    sentence_indices: np.ndarray

    def __len__(self) -> int:
        return len(self.lengths)


def make_batch(data: Sequence[EncodedSentence], indices: Sequence[int]) -> Batch:
    lengths = np.array([data[i].length for i in indices], dtype=np.int64)
    width = int(lengths.max())
    b = len(indices)
    words = np.full((b, width + 1), PAD, dtype=np.int64)
    tags = np.full((b, width + 1), PAD, dtype=np.int64)
    heads = np.full((b, width), PAD, dtype=np.int64)
    labels = np.full((b, width), PAD, dtype=np.int64)
    for row, i in enumerate(indices):
        s = data[i]
        n = s.length
        words[row, : n + 1] = s.word_ids
        tags[row, : n + 1] = s.upos_ids
        heads[row, :n] = s.gold_heads
        labels[row, :n] = s.gold_label_ids
    mask = np.arange(width + 1)[None, :] <= lengths[:, None]
    return Batch(words, tags, lengths, mask, heads, labels, np.asarray(indices, dtype=np.int64))


def _rng(seed: int | None):
    return None if seed is None else np.random.default_rng(seed)


def bucket_batches(data: Sequence[EncodedSentence], batch_size: int, shuffle_seed: int | None = None) -> list[Batch]:
    """Batches of equal-length sentences only."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    rng = _rng(shuffle_seed)
    buckets: dict[int, list[int]] = defaultdict(list)
    for i, s in enumerate(data):
        buckets[s.length].append(i)
    groups = []
    for length in sorted(buckets):
        idx = buckets[length]
        if rng is not None:
            idx = [idx[j] for j in rng.permutation(len(idx))]
        groups.extend(idx[k : k + batch_size] for k in range(0, len(idx), batch_size))
    if rng is not None:
        groups = [groups[j] for j in rng.permutation(len(groups))]
    return [make_batch(data, g) for g in groups]


def padded_batches(data: Sequence[EncodedSentence], batch_size: int, shuffle_seed: int | None = None) -> list[Batch]:
    """Consecutive chunks of ``batch_size`` (after an optional shuffle)."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    order = list(range(len(data)))
    if shuffle_seed is not None:
        order = [int(j) for j in np.random.default_rng(shuffle_seed).permutation(len(data))]
    return [make_batch(data, order[k : k + batch_size]) for k in range(0, len(order), batch_size)]


def token_budget_batches(data: Sequence[EncodedSentence], token_budget: int, shuffle_seed: int | None = None) -> list[Batch]:
    """Length-sorted greedy packing with B * (Lmax + 1) <= token_budget."""
    for i, s in enumerate(data):
        if s.length + 1 > token_budget:
            raise ValueError(f"sentence {i} ({s.length} tokens + root) exceeds token budget {token_budget}")
    order = sorted(range(len(data)), key=lambda i: (data[i].length, i))
    groups: list[list[int]] = []
    current: list[int] = []
    for i in order:
        width = data[i].length + 1
        if current and (len(current) + 1) * width > token_budget:
            groups.append(current)
            current = []
        current.append(i)
    if current:
        groups.append(current)
    if shuffle_seed is not None:
        groups = [groups[j] for j in np.random.default_rng(shuffle_seed).permutation(len(groups))]
    return [make_batch(data, g) for g in groups]


STRATEGIES: dict[str, Callable[..., list[Batch]]] = {
    "bucket": bucket_batches,
    "padded": padded_batches,
    "budget": token_budget_batches,
}


def get_strategy(name: str) -> Callable[..., list[Batch]]:
    try:
        return STRATEGIES[name]
    except KeyError:
        raise KeyError(f"unknown batching strategy {name!r}; choose from {sorted(STRATEGIES)}") from None


def epoch_seed(seed: int | None, epoch: int) -> int | None:
    return None if seed is None else seed + epoch
