"""Losses of the form f(scores, y_p, y_g) -> (value, d value / d scores).

Gradients follow the descent convention: callers subtract lr * grad.
Column 0 and the diagonal of the gradient are always zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from depframe.trees import DependencyTree


@dataclass(frozen=True)
class LossOutput:
    value: float
    grad: np.ndarray


def _check(scores, tree: DependencyTree) -> np.ndarray:
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"score matrix must be square, got shape {s.shape}")
    if s.shape[0] != len(tree) + 1:
        raise ValueError(f"score matrix for n={s.shape[0] - 1} but tree has {len(tree)} tokens")
    return s


def _candidates(m: int) -> np.ndarray:
    ok = ~np.eye(m, dtype=bool)
    ok[:, 0] = False
    return ok


def arc_hinge(scores, y_g: DependencyTree, y_p: DependencyTree | None = None, margin: float = 1.0) -> LossOutput:
    """Per-dependent margin loss against the best competing head."""
    s = _check(scores, y_g)
    m = s.shape[0]
    gold = np.asarray(y_g.heads)
    deps = np.arange(1, m)
    masked = np.where(_candidates(m), s, -np.inf)
    masked[gold, deps] = -np.inf
    grad = np.zeros_like(s)
    if m == 2:
        return LossOutput(0.0, grad)
    rival = masked[:, 1:].argmax(axis=0)
    terms = margin + masked[rival, deps] - s[gold, deps]
    active = terms > 0
    grad[rival[active], deps[active]] += 1.0
    grad[gold[active], deps[active]] -= 1.0
    return LossOutput(float(terms[active].sum()), grad)


def structured_hinge(scores, y_p: DependencyTree, y_g: DependencyTree, margin: float = 1.0) -> LossOutput:
    """Hamming-margin hinge between a predicted tree and the gold tree."""
    s = _check(scores, y_g)
    if len(y_p) != len(y_g):
        raise ValueError(f"predicted tree has {len(y_p)} tokens, gold {len(y_g)}")
    deps = np.arange(1, s.shape[0])
    pred = np.asarray(y_p.heads)
    gold = np.asarray(y_g.heads)
    hamming = float(np.count_nonzero(pred != gold))
    value = margin * hamming + s[pred, deps].sum() - s[gold, deps].sum()
    grad = np.zeros_like(s)
    if value <= 0:
        return LossOutput(0.0, grad)
    np.add.at(grad, (pred, deps), 1.0)
    np.add.at(grad, (gold, deps), -1.0)
    return LossOutput(float(value), grad)


def head_cross_entropy(scores, y_g: DependencyTree, y_p: DependencyTree | None = None) -> LossOutput:
    """Softmax over candidate heads of each dependent."""
    s = _check(scores, y_g)
    m = s.shape[0]
    cand = _candidates(m)
    if not np.all(np.isfinite(s[cand])):
        raise ValueError("non-finite arc score")
    masked = np.where(cand, s, -np.inf)[:, 1:]
    top = masked.max(axis=0)
    z = np.exp(masked - top)
    total = z.sum(axis=0)
    probs = z / total
    deps = np.arange(1, m)
    gold = np.asarray(y_g.heads)
    logp = masked[gold, deps - 1] - top - np.log(total)
    grad = np.zeros_like(s)
    grad[:, 1:] = probs
    grad[gold, deps] -= 1.0
    return LossOutput(float(-logp.sum()), grad)


def _hinge(scores, y_p, y_g, **kw):
    return arc_hinge(scores, y_g, y_p, **kw)


def _structured(scores, y_p, y_g, **kw):
    if y_p is None:
        raise ValueError("structured-hinge needs a predicted tree")
    return structured_hinge(scores, y_p, y_g, **kw)


def _xent(scores, y_p, y_g, **kw):
    return head_cross_entropy(scores, y_g, y_p)


# uniform signature: loss(scores, y_p, y_g)
LOSSES: dict[str, Callable[..., LossOutput]] = {
    "hinge": _hinge,
    "structured-hinge": _structured,
    "crossentropy": _xent,
}

NEEDS_PREDICTION = {"structured-hinge"}


def get_loss(name: str) -> Callable[..., LossOutput]:
    try:
        return LOSSES[name]
    except KeyError:
        raise KeyError(f"unknown loss {name!r}; choose from {sorted(LOSSES)}") from None
