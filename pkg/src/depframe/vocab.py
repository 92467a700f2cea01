"""Token, POS and relation vocabularies."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from depframe.conllu import Sentence

PAD, ROOT, UNK = 0, 1, 2
SPECIALS = ("<pad>", "<root>", "<unk>")
NUM = "<num>"

_NUMBER = re.compile(r"^[+-]?[0-9.,]*[0-9][0-9.,]*$")


def normalize(form: str, lowercase: bool = True, numbers: bool = True) -> str:
    if numbers and _NUMBER.match(form):
        return NUM
    return form.lower() if lowercase else form


class _Map:
    """Frozen surface <-> id map with the special entries in front."""

    def __init__(self, entries: Iterable[str] = ()):
        self._items: list[str] = list(SPECIALS)
        for e in entries:
            if e not in SPECIALS:
                self._items.append(e)
        self._index = {s: i for i, s in enumerate(self._items)}
        if len(self._index) != len(self._items):
            raise ValueError("duplicate vocabulary entry")

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, item: str) -> bool:
        return item in self._index

    def __getitem__(self, item: str) -> int:
        return self._index.get(item, UNK)

    def lookup(self, idx: int) -> str:
        return self._items[idx]

    @property
    def entries(self) -> list[str]:
        return self._items[len(SPECIALS):]


@dataclass(frozen=True)
class EncodedSentence:
    word_ids: np.ndarray
    upos_ids: np.ndarray
    gold_heads: np.ndarray
    gold_label_ids: np.ndarray

    @property
    def length(self) -> int:
        return len(self.gold_heads)


class Vocabulary:
    def __init__(self, forms: Iterable[str] = (), upos: Iterable[str] = (), deprels: Iterable[str] = (),
                 lowercase: bool = True, num_norm: bool = True):
        self.forms = _Map(forms)
        self.upos = _Map(upos)
        self.deprels = _Map(deprels)
        self.lowercase = lowercase
        self.num_norm = num_norm

    def normalize(self, form: str) -> str:
        return normalize(form, self.lowercase, self.num_norm)

    @classmethod
    def fit(cls, sentences: Sequence[Sentence], min_frequency: int = 2,
            pretrained_forms: Iterable[str] | None = None,
            lowercase: bool = True, num_norm: bool = True) -> "Vocabulary":
        if not sentences:
            raise ValueError("cannot fit a vocabulary on an empty treebank")
        if min_frequency < 1:
            raise ValueError("min_frequency must be >= 1")
        pretrained = set(pretrained_forms or ())
        counts: Counter[str] = Counter()
        order: dict[str, None] = {}
        upos: dict[str, None] = {}
        deprels: dict[str, None] = {}
        for sent in sentences:
            for tok in sent.tokens:
                f = normalize(tok.form, lowercase, num_norm)
                counts[f] += 1
                order.setdefault(f)
                upos.setdefault(tok.upos)
                deprels.setdefault(tok.deprel)
        forms = [f for f in order if counts[f] >= min_frequency or f in pretrained]
        return cls(forms, upos, deprels, lowercase, num_norm)

    def encode(self, sentence: Sentence) -> EncodedSentence:
        words = [ROOT] + [self.forms[self.normalize(t.form)] for t in sentence.tokens]
        tags = [ROOT] + [self.upos[t.upos] for t in sentence.tokens]
        return EncodedSentence(
            word_ids=np.array(words, dtype=np.int64),
            upos_ids=np.array(tags, dtype=np.int64),
            gold_heads=np.array(sentence.heads, dtype=np.int64),
            gold_label_ids=np.array([self.deprels[t.deprel] for t in sentence.tokens], dtype=np.int64),
        )

    def decode_forms(self, encoded: EncodedSentence) -> list[str]:
        return [self.forms.lookup(i) for i in encoded.word_ids[1:]]

    def form_or_unk(self, form: str) -> str:
        f = self.normalize(form)
        return f if f in self.forms else SPECIALS[UNK]

    # serialization: "[section]" headers then "<id>\t<surface>" lines

    def dumps(self) -> str:
        lines = [f"[options]", f"lowercase\t{int(self.lowercase)}", f"num_norm\t{int(self.num_norm)}"]
        for name, m in (("forms", self.forms), ("upos", self.upos), ("deprels", self.deprels)):
            lines.append(f"[{name}]")
            lines.extend(f"{i}\t{m.lookup(i)}" for i in range(len(m)))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Vocabulary":
        sections: dict[str, list[tuple[str, str]]] = {}
        current = None
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                current = sections.setdefault(line[1:-1], [])
                continue
            if current is None or "\t" not in line:
                raise ValueError(f"vocabulary line {lineno}: malformed entry {line!r}")
            key, value = line.split("\t", 1)
            current.append((key, value))
        opts = dict(sections.get("options", []))
        maps = {}
        for name in ("forms", "upos", "deprels"):
            rows = sections.get(name)
            if rows is None:
                raise ValueError(f"vocabulary missing section [{name}]")
            ids = [int(k) for k, _ in rows]
            if ids != list(range(len(rows))) or [v for _, v in rows[:3]] != list(SPECIALS):
                raise ValueError(f"vocabulary section [{name}] ids are not contiguous from 0")
            maps[name] = [v for _, v in rows]
        return cls(maps["forms"], maps["upos"], maps["deprels"],
                   lowercase=opts.get("lowercase", "1") == "1", num_norm=opts.get("num_norm", "1") == "1")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as f:
            return cls.loads(f.read())

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.dumps() == other.dumps()
