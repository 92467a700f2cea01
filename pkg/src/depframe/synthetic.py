"""Synthetic treebanks for tests, benchmarks and smoke runs."""
from __future__ import annotations

import numpy as np

from depframe.conllu import Sentence, Token
from depframe.decoders import cle, eisner


def separable_treebank(num_sentences: int = 200, seed: int = 0, num_tags: int = 6,
                       min_len: int = 3, max_len: int = 10, projective: bool = False) -> list[Sentence]:
    """Gold trees are argmax trees of a hidden (head tag, dependent tag) score table.

    Any model with a head-tag x dependent-tag feature can reproduce the table,
    so the treebank is linearly separable. Labels are a fixed function of the
    tag pair.
    """
    rng = np.random.default_rng(seed)
    tags = [f"T{i}" for i in range(num_tags)]
    # row num_tags is the root
    table = rng.normal(size=(num_tags + 1, num_tags))
    label_of = rng.integers(0, 4, size=(num_tags + 1, num_tags))
    decode = eisner if projective else cle
    out = []
    for _ in range(num_sentences):
        n = int(rng.integers(min_len, max_len + 1))
        pos = rng.integers(0, num_tags, size=n)
        ext = np.concatenate([[num_tags], pos])
        scores = table[ext[:, None], pos[None, :]]
        s = np.zeros((n + 1, n + 1))
        s[:, 1:] = scores
        heads = decode(s).heads
        toks = []
        for d, h in enumerate(heads, start=1):
            p = pos[d - 1]
            form = f"w{p}_{int(rng.integers(0, 3))}"
            toks.append(Token(d, form, "_", tags[p], "_", "_", h, f"rel{label_of[ext[h], p]}", "_", "_"))
        out.append(Sentence(tuple(toks)))
    return out


def ud_like_lengths(num_sentences: int, seed: int = 0, mean: float = 16.0, max_len: int = 120) -> list[int]:
    """Sentence lengths from a gamma law with the given mean (shape 2)."""
    rng = np.random.default_rng(seed)
    lengths = np.clip(np.rint(rng.gamma(2.0, mean / 2.0, size=num_sentences)), 1, max_len)
    return [int(x) for x in lengths]
