"""Dependency trees as head arrays, with well-formedness checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class TreeError(ValueError):
    """Head array that is not a spanning arborescence rooted at 0."""


@dataclass(frozen=True)
class DependencyTree:
    """``heads[d-1]`` is the head of token ``d``; 0 is the artificial root."""

    heads: tuple[int, ...]
    labels: tuple[str, ...] = field(default=())

    def __init__(self, heads: Sequence[int], labels: Sequence[str] = ()):
        object.__setattr__(self, "heads", tuple(int(h) for h in heads))
        object.__setattr__(self, "labels", tuple(labels))
        if self.labels and len(self.labels) != len(self.heads):
            raise ValueError(f"{len(self.labels)} labels for {len(self.heads)} heads")

    def __len__(self) -> int:
        return len(self.heads)

    def arcs(self) -> list[tuple[int, int]]:
        return [(h, d) for d, h in enumerate(self.heads, start=1)]

    def with_labels(self, labels: Sequence[str]) -> "DependencyTree":
        return DependencyTree(self.heads, labels)


def check_arborescence(heads: Sequence[int]) -> None:
    """Raise TreeError naming offending tokens unless ``heads`` is a tree."""
    n = len(heads)
    if n == 0:
        raise TreeError("empty head array")
    bad = [d for d, h in enumerate(heads, start=1) if not 0 <= h <= n or h == d]
    if bad:
        raise TreeError(f"tokens {bad} have out-of-range or self-loop heads")
    # 0 = unvisited, 1 = on current path, 2 = reaches root
    state = [0] * (n + 1)
    state[0] = 2
    for start in range(1, n + 1):
        path = []
        v = start
        while state[v] == 0:
            state[v] = 1
            path.append(v)
            v = heads[v - 1]
        if state[v] == 1:
            cycle = path[path.index(v):]
            raise TreeError(f"tokens {sorted(cycle)} form a cycle")
        for u in path:
            state[u] = 2


def is_arborescence(heads: Sequence[int]) -> bool:
    try:
        check_arborescence(heads)
    except TreeError:
        return False
    return True


def is_projective(heads: Sequence[int]) -> bool:
    """True when no two arcs cross (root arcs included)."""
    spans = [(min(h, d), max(h, d)) for d, h in enumerate(heads, start=1)]
    spans.sort()
    for i, (a1, b1) in enumerate(spans):
        for a2, b2 in spans[i + 1:]:
            if a2 >= b1:
                break
            if a1 < a2 < b1 < b2:
                return False
    return True


def tree_score(scores: np.ndarray, heads: Sequence[int]) -> float:
    heads = np.asarray(heads, dtype=np.int64)
    deps = np.arange(1, len(heads) + 1)
    return float(scores[heads, deps].sum())


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError(f"head arrays differ in length: {len(a)} vs {len(b)}")
    return sum(1 for x, y in zip(a, b) if x != y)
