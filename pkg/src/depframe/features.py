"""Hashed first-order arc features.

Each template is emitted twice: once bare and once conjoined with the
direction and binned distance of the arc. Boundary positions use sentinel
values, so every arc gets exactly ``num_features`` ids.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

TEMPLATE_VERSION = "first-order-v1"

ROOT_FORM = "<root-form>"
ROOT_POS = "<root-pos>"
BOS = "<bos>"
EOS = "<eos>"

# (name, fields); field names key the per-arc values assembled in raw_ids
TEMPLATES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("bias", ()),
    ("hf", ("hf",)),
    ("hp", ("hp",)),
    ("hf.hp", ("hf", "hp")),
    ("df", ("df",)),
    ("dp", ("dp",)),
    ("df.dp", ("df", "dp")),
    ("hf.df", ("hf", "df")),
    ("hf.dp", ("hf", "dp")),
    ("hp.df", ("hp", "df")),
    ("hp.dp", ("hp", "dp")),
    ("hf.hp.df.dp", ("hf", "hp", "df", "dp")),
    ("hf.hp.dp", ("hf", "hp", "dp")),
    ("hp.df.dp", ("hp", "df", "dp")),
    ("hp.hp+1.dp-1.dp", ("hp", "hp+1", "dp-1", "dp")),
    ("hp-1.hp.dp-1.dp", ("hp-1", "hp", "dp-1", "dp")),
    ("hp.hp+1.dp.dp+1", ("hp", "hp+1", "dp", "dp+1")),
    ("hp-1.hp.dp.dp+1", ("hp-1", "hp", "dp", "dp+1")),
    ("hp.between.dp", ("hp", "between", "dp")),
)

_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@lru_cache(maxsize=1 << 18)
def stable_hash(text: str) -> int:
    """64-bit BLAKE2b digest; identical on every platform and run."""
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "little")


def _mix(a: np.ndarray, b) -> np.ndarray:
    """Order-sensitive 64-bit combine: splitmix64 finalizer of a * phi + b."""
    with np.errstate(over="ignore"):
        x = a * _GOLDEN + b
        x = x ^ (x >> np.uint64(30))
        x = x * _MUL1
        x = x ^ (x >> np.uint64(27))
        x = x * _MUL2
        x = x ^ (x >> np.uint64(31))
    return x


def _distance_bin(h: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Signed bin: 1..5 exact, 6 for 6-10, 7 for >10; negative when h > d."""
    dist = np.abs(h - d)
    b = np.where(dist <= 5, dist, np.where(dist <= 10, 6, 7))
    return np.where(h < d, b, -b)


@dataclass
class PreparedSentence:
    """Per-position string hashes (index 0 = root)."""

    forms: np.ndarray  # uint64, length n + 1
    tags: np.ndarray  # uint64, length n + 3: [BOS, root, tokens..., EOS]
    tag_bits: np.ndarray  # uint64 one-bit masks per position, length n + 1

    @property
    def n(self) -> int:
        return len(self.forms) - 1


@dataclass(frozen=True)
class FeatureSet:
    hash_dimension: int = 1 << 22
    templates: tuple[str, ...] = field(default=tuple(name for name, _ in TEMPLATES))

    def __post_init__(self):
        if self.hash_dimension < (1 << 16) or self.hash_dimension & (self.hash_dimension - 1):
            raise ValueError("hash_dimension must be a power of two >= 2**16")
        if self.templates != tuple(name for name, _ in TEMPLATES):
            raise ValueError(f"template list does not match {TEMPLATE_VERSION}")

    @property
    def num_features(self) -> int:
        return 2 * len(TEMPLATES)

    def prepare(self, forms: Sequence[str], tags: Sequence[str]) -> PreparedSentence:
        f = np.array([stable_hash(ROOT_FORM)] + [stable_hash("f=" + w) for w in forms], dtype=np.uint64)
        p = [stable_hash(ROOT_POS)] + [stable_hash("p=" + t) for t in tags]
        padded = np.array([stable_hash(BOS)] + p + [stable_hash(EOS)], dtype=np.uint64)
        bits = np.array([np.uint64(1) << np.uint64(int(x) % 64) for x in p], dtype=np.uint64)
        return PreparedSentence(f, padded, bits)

    def raw_ids(self, sent: PreparedSentence, h: np.ndarray, d: np.ndarray) -> np.ndarray:
        """Unreduced 64-bit feature hashes, shape (len(h), num_features)."""
        h = np.asarray(h, dtype=np.int64)
        d = np.asarray(d, dtype=np.int64)
        n = sent.n
        if np.any((h < 0) | (h > n) | (d < 1) | (d > n) | (h == d)):
            raise IndexError(f"arc index out of range for n={n}")
        values = {
            "hf": sent.forms[h],
            "df": sent.forms[d],
            "hp": sent.tags[h + 1],
            "dp": sent.tags[d + 1],
            "hp-1": sent.tags[h],
            "hp+1": sent.tags[h + 2],
            "dp-1": sent.tags[d],
            "dp+1": sent.tags[d + 2],
            "between": _between_masks(sent.tag_bits, h, d),
        }
        dist = _distance_bin(h, d).astype(np.int64).astype(np.uint64)
        out = np.empty((len(h), self.num_features), dtype=np.uint64)
        for k, (name, fields) in enumerate(TEMPLATES):
            acc = np.full(len(h), np.uint64(stable_hash("t=" + name)), dtype=np.uint64)
            for fld in fields:
                acc = _mix(acc, values[fld])
            out[:, 2 * k] = acc
            out[:, 2 * k + 1] = _mix(acc, dist)
        return out

    def reduce(self, raw: np.ndarray) -> np.ndarray:
        return (raw & np.uint64(self.hash_dimension - 1)).astype(np.int64)

    def arc_ids(self, sent: PreparedSentence, h: int, d: int) -> np.ndarray:
        return self.reduce(self.raw_ids(sent, np.array([h]), np.array([d])))[0]

    def all_arc_ids(self, sent: PreparedSentence) -> np.ndarray:
        """Feature ids for every arc, shape (n+1, n+1, T); invalid cells hold -1."""
        return self.reduce_matrix(self.all_raw_ids(sent))

    def all_raw_ids(self, sent: PreparedSentence) -> np.ndarray:
        n = sent.n
        h, d = np.meshgrid(np.arange(n + 1), np.arange(1, n + 1), indexing="ij")
        keep = h != d
        raw = np.zeros((n + 1, n + 1, self.num_features), dtype=np.uint64)
        raw[h[keep], d[keep]] = self.raw_ids(sent, h[keep], d[keep])
        return raw

    def reduce_matrix(self, raw: np.ndarray) -> np.ndarray:
        ids = self.reduce(raw)
        m = raw.shape[0]
        ids[:, 0] = -1
        ids[np.arange(m), np.arange(m)] = -1
        return ids


def _between_masks(bits: np.ndarray, h: np.ndarray, d: np.ndarray) -> np.ndarray:
    """OR of tag bits strictly between h and d, per arc."""
    m = len(bits)
    # table[a, b] = OR of bits[a+1 .. b-1] for a < b
    table = np.zeros((m, m), dtype=np.uint64)
    for a in range(m):
        acc = np.bitwise_or.accumulate(bits[a + 1 :]) if a + 1 < m else np.zeros(0, dtype=np.uint64)
        # span (a, b) excludes b itself: shift by one
        if m - a - 2 > 0:
            table[a, a + 2 :] = acc[: m - a - 2]
    lo = np.minimum(h, d)
    hi = np.maximum(h, d)
    return table[lo, hi]
