"""Attachment scores with explicit punctuation and label-prefix handling."""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from depframe.conllu import Sentence
from depframe.trees import DependencyTree


@dataclass(frozen=True)
class EvalConfig:
    ignore_punctuation: bool = False
    label_prefix_match: bool = False


@dataclass(frozen=True)
class EvalResult:
    correct_arcs: int
    correct_labeled_arcs: int
    total_arcs: int

    @property
    def uas(self) -> float:
        return self.correct_arcs / self.total_arcs

    @property
    def las(self) -> float:
        return self.correct_labeled_arcs / self.total_arcs

    @property
    def uas_exact(self) -> Fraction:
        return Fraction(self.correct_arcs, self.total_arcs)

    @property
    def las_exact(self) -> Fraction:
        return Fraction(self.correct_labeled_arcs, self.total_arcs)

    def format(self) -> str:
        return (
            f"uas {self.uas:.4f} ({self.correct_arcs}/{self.total_arcs})\n"
            f"las {self.las:.4f} ({self.correct_labeled_arcs}/{self.total_arcs})"
        )


def is_punctuation(form: str) -> bool:
    """Non-empty and made only of Unicode P* category characters."""
    return bool(form) and all(unicodedata.category(ch).startswith("P") for ch in form)


def labels_match(predicted: str, gold: str, prefix_mode: bool = False) -> bool:
    if prefix_mode:
        return predicted.split(":", 1)[0] == gold.split(":", 1)[0]
    return predicted == gold


def evaluate(
    gold: Sequence[Sentence],
    predicted: Sequence[DependencyTree],
    config: EvalConfig = EvalConfig(),
) -> EvalResult:
    """Micro-averaged UAS/LAS over every counted dependent token."""
    if len(gold) != len(predicted):
        raise ValueError(f"{len(gold)} gold sentences but {len(predicted)} predictions")
    correct = labeled = total = 0
    for i, (sent, tree) in enumerate(zip(gold, predicted)):
        if len(sent) != len(tree):
            raise ValueError(f"sentence {i}: gold has {len(sent)} tokens, prediction {len(tree)}")
        labels = tree.labels or ("",) * len(tree)
        for tok, head, label in zip(sent.tokens, tree.heads, labels):
            if config.ignore_punctuation and is_punctuation(tok.form):
                continue
            total += 1
            if head == tok.head:
                correct += 1
                if labels_match(label, tok.deprel, config.label_prefix_match):
                    labeled += 1
    if total == 0:
        raise ValueError("no arcs left to score")
    return EvalResult(correct, labeled, total)
