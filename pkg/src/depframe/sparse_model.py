"""Sparse-feature first-order parser trained online.

Arc scores are dot products of hashed feature vectors with a single weight
vector; learning is an averaged perceptron or a single-best passive-aggressive
(MIRA) step. Relation labels come from a second-stage multiclass perceptron
over the same hashed space, with the label conjoined into each hash.
"""
from __future__ import annotations

import io
import json
import logging
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from depframe.conllu import Sentence
from depframe.decoders import get_decoder, loss_augmented
from depframe.features import TEMPLATE_VERSION, TEMPLATES, FeatureSet, PreparedSentence, _mix, stable_hash
from depframe.trees import DependencyTree, hamming
from depframe.vocab import Vocabulary

log = logging.getLogger(__name__)

MAGIC = b"DEPFRAME-SPARSE\n"


@dataclass
class SparseWeights:
    """Raw weights plus the accumulator that yields their running average.

    An update made while processing the t-th sentence (1-based) adds
    ``(t - 1) * delta`` to ``w_sum``; the average of the weights after every
    sentence so far is then ``w - w_sum / update_count``.
    """

    w: np.ndarray
    w_sum: np.ndarray
    update_count: int = 0

    @classmethod
    def zeros(cls, dim: int) -> "SparseWeights":
        return cls(np.zeros(dim), np.zeros(dim))

    def averaged(self) -> np.ndarray:
        return self.w - self.w_sum / max(1, self.update_count)

    def add(self, ids: np.ndarray, values) -> None:
        values = np.broadcast_to(np.asarray(values, dtype=np.float64), ids.shape)
        np.add.at(self.w, ids, values)
        np.add.at(self.w_sum, ids, self.update_count * values)

    def tick(self) -> None:
        self.update_count += 1

    def copy(self) -> "SparseWeights":
        return SparseWeights(self.w.copy(), self.w_sum.copy(), self.update_count)


@dataclass
class ArcFeatures:
    """Feature hashes of every arc of one sentence."""

    raw: np.ndarray  # uint64 (n+1, n+1, T)
    ids: np.ndarray  # int64 (n+1, n+1, T); -1 on ignored cells

    @property
    def n(self) -> int:
        return self.ids.shape[0] - 1


def sentence_fields(sentence: Sentence, vocab: Vocabulary | None) -> tuple[list[str], list[str]]:
    if vocab is None:
        return [t.form for t in sentence.tokens], sentence.upos
    return [vocab.form_or_unk(t.form) for t in sentence.tokens], sentence.upos


def arc_features(sentence: Sentence, feature_set: FeatureSet, vocab: Vocabulary | None = None) -> ArcFeatures:
    prep = feature_set.prepare(*sentence_fields(sentence, vocab))
    raw = feature_set.all_raw_ids(prep)
    return ArcFeatures(raw, feature_set.reduce_matrix(raw))


def extract_arc_features(sentence: Sentence, h: int, d: int, feature_set: FeatureSet,
                         vocab: Vocabulary | None = None) -> list[int]:
    prep = feature_set.prepare(*sentence_fields(sentence, vocab))
    return [int(x) for x in feature_set.arc_ids(prep, h, d)]


def score_all_arcs(feats: ArcFeatures, weights: SparseWeights | np.ndarray, averaged: bool = False) -> np.ndarray:
    if isinstance(weights, SparseWeights):
        w = weights.averaged() if averaged else weights.w
    else:
        w = weights
    scores = w[np.maximum(feats.ids, 0)].sum(axis=-1)
    scores[feats.ids[..., 0] < 0] = 0.0
    return scores


def _tree_ids(feats: ArcFeatures, heads: Sequence[int]) -> np.ndarray:
    deps = np.arange(1, feats.n + 1)
    return feats.ids[np.asarray(heads), deps]  # (n, T)


def feature_difference(feats: ArcFeatures, y_p: DependencyTree, y_g: DependencyTree) -> tuple[np.ndarray, np.ndarray]:
    """Sparse phi(gold) - phi(pred) after hash collisions, as (ids, values)."""
    gold = _tree_ids(feats, y_g.heads).ravel()
    pred = _tree_ids(feats, y_p.heads).ravel()
    ids = np.concatenate([gold, pred])
    vals = np.concatenate([np.ones(gold.size), -np.ones(pred.size)])
    uniq, inv = np.unique(ids, return_inverse=True)
    summed = np.bincount(inv, weights=vals, minlength=uniq.size)
    nz = summed != 0
    return uniq[nz], summed[nz]


def perceptron_update(weights: SparseWeights, feats: ArcFeatures, y_p: DependencyTree, y_g: DependencyTree) -> SparseWeights:
    if len(y_p) != len(y_g) or len(y_g) != feats.n:
        raise ValueError("tree lengths do not match the sentence")
    wrong = [d for d, (p, g) in enumerate(zip(y_p.heads, y_g.heads), start=1) if p != g]
    if wrong:
        deps = np.array(wrong)
        gold = feats.ids[np.asarray(y_g.heads)[deps - 1], deps].ravel()
        pred = feats.ids[np.asarray(y_p.heads)[deps - 1], deps].ravel()
        weights.add(gold, 1.0)
        weights.add(pred, -1.0)
    weights.tick()
    return weights


def mira_update(weights: SparseWeights, feats: ArcFeatures, y_p: DependencyTree, y_g: DependencyTree,
                C: float = 1.0) -> SparseWeights:
    if len(y_p) != len(y_g) or len(y_g) != feats.n:
        raise ValueError("tree lengths do not match the sentence")
    margin = hamming(y_p.heads, y_g.heads)
    if margin:
        ids, vals = feature_difference(feats, y_p, y_g)
        # gold - pred score under the raw weights
        gap = float(weights.w[ids] @ vals)
        loss = margin - gap
        sq = float(vals @ vals)
        if loss > 0:
            if sq == 0.0:
                log.warning("passive-aggressive step skipped: feature difference vanished under hashing")
            else:
                tau = min(C, loss / sq)
                weights.add(ids, tau * vals)
    weights.tick()
    return weights


@dataclass
class LabelModel:
    labels: tuple[str, ...]
    weights: SparseWeights
    hash_dimension: int

    def __post_init__(self):
        if not self.labels:
            raise ValueError("empty label inventory")
        self._codes = np.array([stable_hash("l=" + lab) for lab in self.labels], dtype=np.uint64)

    def _ids(self, raw_arcs: np.ndarray) -> np.ndarray:
        """(k, T) raw arc hashes -> (k, L, T) label-conjoined weight ids."""
        mixed = _mix(raw_arcs[:, None, :], self._codes[None, :, None])
        return (mixed & np.uint64(self.hash_dimension - 1)).astype(np.int64)

    def _raw_arcs(self, feats: ArcFeatures, heads: Sequence[int]) -> np.ndarray:
        deps = np.arange(1, feats.n + 1)
        return feats.raw[np.asarray(heads), deps]

    def predict(self, feats: ArcFeatures, heads: Sequence[int], weights: np.ndarray | None = None) -> list[str]:
        w = self.weights.w if weights is None else weights
        scores = w[self._ids(self._raw_arcs(feats, heads))].sum(axis=-1)
        return [self.labels[i] for i in scores.argmax(axis=1)]

    def update(self, feats: ArcFeatures, gold: DependencyTree) -> int:
        """One perceptron pass over the gold arcs; returns label mistakes."""
        index = {lab: i for i, lab in enumerate(self.labels)}
        ids = self._ids(self._raw_arcs(feats, gold.heads))
        mistakes = 0
        for k, lab in enumerate(gold.labels):
            g = index.get(lab)
            if g is not None:
                scores = self.weights.w[ids[k]].sum(axis=-1)
                p = int(scores.argmax())
                if p != g:
                    self.weights.add(ids[k, g], 1.0)
                    self.weights.add(ids[k, p], -1.0)
                    mistakes += 1
            self.weights.tick()
        return mistakes


def predict_labels(feats: ArcFeatures, heads: Sequence[int], label_model: LabelModel, averaged: bool = True) -> list[str]:
    w = label_model.weights.averaged() if averaged else label_model.weights.w
    return label_model.predict(feats, heads, w)


LEARNERS = ("perceptron", "mira")


@dataclass
class SparseParser:
    """First-order hashed-feature parser with a second-stage labeler."""

    vocab: Vocabulary
    feature_set: FeatureSet = field(default_factory=FeatureSet)
    learner: str = "perceptron"
    C: float = 1.0
    arc_weights: SparseWeights | None = None
    label_model: LabelModel | None = None

    def __post_init__(self):
        if self.learner not in LEARNERS:
            raise KeyError(f"unknown learner {self.learner!r}; choose from {list(LEARNERS)}")
        dim = self.feature_set.hash_dimension
        if self.arc_weights is None:
            self.arc_weights = SparseWeights.zeros(dim)
        if self.label_model is None:
            self.label_model = LabelModel(tuple(self.vocab.deprels.entries), SparseWeights.zeros(dim), dim)
        self._frozen: tuple[np.ndarray, np.ndarray] | None = None

    def features(self, sentence: Sentence) -> ArcFeatures:
        return arc_features(sentence, self.feature_set, self.vocab)

    def scores(self, feats: ArcFeatures, averaged: bool = False) -> np.ndarray:
        if averaged:
            return score_all_arcs(feats, self.frozen()[0])
        return score_all_arcs(feats, self.arc_weights.w)

    def train_step(self, sentence: Sentence, gold: DependencyTree, decoder_name: str,
                   loss_fn=None, augment: bool = False) -> tuple[float, int]:
        """Decode with raw weights, update arcs and labels; returns (loss, head errors)."""
        feats = self.features(sentence)
        s = self.scores(feats)
        decoder = get_decoder(decoder_name)
        if augment:
            decoder = loss_augmented(decoder, gold.heads)
        pred = decoder(s)
        loss = loss_fn(s, pred, gold).value if loss_fn is not None else 0.0
        if self.learner == "mira":
            mira_update(self.arc_weights, feats, pred, gold, self.C)
        else:
            perceptron_update(self.arc_weights, feats, pred, gold)
        self.label_model.update(feats, gold)
        self._frozen = None
        return loss, hamming(pred.heads, gold.heads)

    def frozen(self) -> tuple[np.ndarray, np.ndarray]:
        """Averaged (arc, label) weights used for prediction."""
        if self._frozen is None:
            self._frozen = (self.arc_weights.averaged(), self.label_model.weights.averaged())
        return self._frozen

    def parse(self, sentence: Sentence, decoder_name: str) -> DependencyTree:
        feats = self.features(sentence)
        arc_w, label_w = self.frozen()
        tree = get_decoder(decoder_name)(score_all_arcs(feats, arc_w))
        return tree.with_labels(self.label_model.predict(feats, tree.heads, label_w))

    def snapshot(self) -> "SparseParser":
        """Inference-only copy holding the current averaged weights."""
        arc_w, label_w = self.frozen()
        dim = self.feature_set.hash_dimension
        return SparseParser(
            self.vocab, self.feature_set, self.learner, self.C,
            SparseWeights(arc_w.copy(), np.zeros(dim)),
            LabelModel(self.label_model.labels, SparseWeights(label_w.copy(), np.zeros(dim)), dim),
        )

    # model file: MAGIC, u64 header length, JSON header, arc then label weights as <f8

    def header(self) -> dict:
        return {
            "format": 1,
            "hash_dimension": self.feature_set.hash_dimension,
            "template_version": TEMPLATE_VERSION,
            "templates": [name for name, _ in TEMPLATES],
            "labels": list(self.label_model.labels),
            "learner": self.learner,
            "C": self.C,
            "weights": "averaged",
        }

    def to_bytes(self) -> bytes:
        arc_w, label_w = self.frozen()
        head = json.dumps(self.header(), sort_keys=True).encode("utf-8")
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<Q", len(head)))
        buf.write(head)
        buf.write(arc_w.astype("<f8").tobytes())
        buf.write(label_w.astype("<f8").tobytes())
        return buf.getvalue()

    def save(self, path) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes, vocab: Vocabulary) -> "SparseParser":
        if not data.startswith(MAGIC):
            raise ValueError("not a sparse parser model file")
        off = len(MAGIC)
        (hlen,) = struct.unpack_from("<Q", data, off)
        off += 8
        header = json.loads(data[off : off + hlen].decode("utf-8"))
        off += hlen
        if header.get("template_version") != TEMPLATE_VERSION:
            raise ValueError(f"model templates {header.get('template_version')!r} != {TEMPLATE_VERSION!r}")
        dim = int(header["hash_dimension"])
        if len(data) - off != 2 * 8 * dim:
            raise ValueError("model file truncated or dimension mismatch")
        labels = tuple(header["labels"])
        if labels != tuple(vocab.deprels.entries):
            raise ValueError("vocabulary label inventory does not match the model")
        arc_w = np.frombuffer(data, dtype="<f8", count=dim, offset=off).astype(np.float64)
        label_w = np.frombuffer(data, dtype="<f8", count=dim, offset=off + 8 * dim).astype(np.float64)
        return cls(
            vocab, FeatureSet(dim), header["learner"], float(header["C"]),
            SparseWeights(arc_w, np.zeros(dim)),
            LabelModel(labels, SparseWeights(label_w, np.zeros(dim)), dim),
        )

    @classmethod
    def load(cls, path, vocab: Vocabulary) -> "SparseParser":
        with open(path, "rb") as f:
            return cls.from_bytes(f.read(), vocab)
