"""First-order decoders: score matrix in, maximum-scoring tree out.

``scores[h, d]`` is the score of the arc h -> d over n tokens plus the
artificial root at index 0. Column 0 and the diagonal are never consumed;
they are masked here so callers need not pre-mask.
"""
from __future__ import annotations

import functools
import itertools
from typing import Callable, Sequence

import numpy as np

from depframe.decoders import _kernels
from depframe.decoders.reference import cle_reference_heads, eisner_reference_heads
from depframe.trees import DependencyTree, is_arborescence, is_projective, tree_score

MAX_BRUTE_FORCE = 8


def prepare_scores(scores, n: int | None = None) -> np.ndarray:
    """Masked float64 copy of a square matrix or a flat row-major buffer."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim == 1:
        if n is None:
            side = int(round(np.sqrt(arr.size)))
            if side * side != arr.size:
                raise ValueError(f"flat buffer of size {arr.size} is not square")
            n = side - 1
        if arr.size != (n + 1) ** 2:
            raise ValueError(f"flat buffer of size {arr.size} does not match n={n}")
        arr = arr.reshape(n + 1, n + 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"score matrix must be square, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n + 1:
        raise ValueError(f"score matrix of shape {arr.shape} does not match n={n}")
    if arr.shape[0] < 2:
        raise ValueError("cannot decode a sentence with n = 0 tokens")
    out = arr.copy()
    np.fill_diagonal(out, -np.inf)
    out[:, 0] = -np.inf
    consumed = out[:, 1:][~np.eye(out.shape[0], dtype=bool)[:, 1:]]
    if not np.all(np.isfinite(consumed)):
        raise ValueError("score matrix has non-finite arc scores")
    return out


def _tree(heads) -> DependencyTree:
    return DependencyTree([int(h) for h in heads])


def eisner(scores, n: int | None = None) -> DependencyTree:
    """Best projective tree; several tokens may attach to the root."""
    s = prepare_scores(scores, n)
    return _tree(_kernels.eisner_kernel(s)[1:])


def _single_root(kernel, s: np.ndarray) -> np.ndarray:
    m = s.shape[0]
    best_heads, best = None, -np.inf
    for child in range(1, m):
        t = s.copy()
        keep = t[0, child]
        t[0, 1:] = -np.inf
        t[0, child] = keep
        heads = np.asarray(kernel(t))
        sc = tree_score(s, heads)
        if best_heads is None or sc > best:
            best_heads, best = heads, sc
    return best_heads


def cle(scores, n: int | None = None, single_root: bool = False) -> DependencyTree:
    """Maximum spanning arborescence rooted at 0 (non-projective allowed)."""
    s = prepare_scores(scores, n)
    if single_root:
        heads = _single_root(lambda t: _kernels.cle_kernel(t)[1:], s)
    else:
        heads = _kernels.cle_kernel(s)[1:]
    return _tree(heads)


def eisner_reference(scores, n: int | None = None) -> DependencyTree:
    s = prepare_scores(scores, n)
    return _tree(eisner_reference_heads(s.tolist()))


def cle_reference(scores, n: int | None = None, single_root: bool = False) -> DependencyTree:
    s = prepare_scores(scores, n)
    if single_root:
        return _tree(_single_root(lambda t: cle_reference_heads(t.tolist()), s))
    return _tree(cle_reference_heads(s.tolist()))


def brute_force_best(scores, projective_only: bool) -> tuple[list[int], float]:
    """Exact best tree by exhaustive search, for n <= 8.

    Ties go to the lexicographically smallest head array.
    """
    s = prepare_scores(scores)
    n = s.shape[0] - 1
    if n > MAX_BRUTE_FORCE:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_FORCE}, got {n}")
    heads, best = _kernels.brute_force_kernel(s, projective_only)
    return [int(h) for h in heads[1:]], float(best)


@functools.lru_cache(maxsize=None)
def enumerate_trees(n: int, projective_only: bool) -> tuple[tuple[int, ...], ...]:
    """Every valid head array for n tokens, lexicographically ordered."""
    trees = []
    for heads in itertools.product(range(n + 1), repeat=n):
        if is_arborescence(heads) and (not projective_only or is_projective(heads)):
            trees.append(heads)
    return tuple(trees)


def brute_force_enumerate(scores, projective_only: bool) -> tuple[list[int], float]:
    """Unpruned enumeration; only practical for n <= 6."""
    s = prepare_scores(scores)
    best_heads, best = None, -np.inf
    for heads in enumerate_trees(s.shape[0] - 1, projective_only):
        sc = tree_score(s, heads)
        if best_heads is None or sc > best:
            best_heads, best = list(heads), sc
    return best_heads, float(best)


Decoder = Callable[..., DependencyTree]

DECODERS: dict[str, Decoder] = {
    "eisner": eisner,
    "cle": cle,
    "eisner-reference": eisner_reference,
    "cle-reference": cle_reference,
}


def get_decoder(name: str) -> Decoder:
    try:
        return DECODERS[name]
    except KeyError:
        raise KeyError(f"unknown decoder {name!r}; choose from {sorted(DECODERS)}") from None


def decode(name: str, scores, n: int | None = None) -> DependencyTree:
    return get_decoder(name)(scores, n)


def loss_augmented(decoder: Decoder, gold_heads: Sequence[int], margin: float = 1.0) -> Decoder:
    """Wrap ``decoder`` so every non-gold arc gets ``margin`` added first.

    The decoded tree then maximizes score + margin * Hamming(tree, gold).
    """
    gold = np.asarray(gold_heads, dtype=np.int64)

    def wrapped(scores, n: int | None = None, **kw):
        s = prepare_scores(scores, n)
        aug = s + margin
        aug[gold, np.arange(1, len(gold) + 1)] -= margin
        return decoder(aug, **kw)

    return wrapped


__all__ = [
    "DECODERS",
    "brute_force_best",
    "brute_force_enumerate",
    "cle",
    "cle_reference",
    "decode",
    "eisner",
    "eisner_reference",
    "enumerate_trees",
    "get_decoder",
    "loss_augmented",
    "prepare_scores",
]
