"""CoNLL-U reading/writing and gold tree extraction.

Multiword-token ranges (``1-2``) and empty nodes (``1.1``) are dropped on
read and never written back; everything else round-trips verbatim.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Sequence

from depframe.trees import DependencyTree, TreeError, check_arborescence

COLUMNS = ("id", "form", "lemma", "upos", "xpos", "feats", "head", "deprel", "deps", "misc")


class ConlluError(ValueError):
    """Malformed CoNLL-U input."""


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str = "_"
    upos: str = "_"
    xpos: str = "_"
    feats: str = "_"
    head: int = 0
    deprel: str = "_"
    deps: str = "_"
    misc: str = "_"

    def to_line(self) -> str:
        return "\t".join(str(getattr(self, c)) for c in COLUMNS)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    @property
    def upos(self) -> list[str]:
        return [t.upos for t in self.tokens]

    @property
    def heads(self) -> list[int]:
        return [t.head for t in self.tokens]

    @property
    def deprels(self) -> list[str]:
        return [t.deprel for t in self.tokens]


def _parse_int(value: str, what: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConlluError(f"line {lineno}: non-integer {what} {value!r}") from None


def _finish(tokens: list[Token], comments: list[str], start: int) -> Sentence:
    n = len(tokens)
    for i, tok in enumerate(tokens, start=1):
        if tok.id != i:
            raise ConlluError(f"sentence at line {start}: token ids not contiguous (expected {i}, got {tok.id})")
        if not 0 <= tok.head <= n:
            raise ConlluError(f"sentence at line {start}: head {tok.head} of token {tok.id} out of range [0, {n}]")
    return Sentence(tuple(tokens), tuple(comments))


def read_conllu(stream: IO[str] | IO[bytes] | str) -> list[Sentence]:
    """Parse every sentence in ``stream`` (a file object or raw text)."""
    if isinstance(stream, str):
        text = stream
    else:
        text = stream.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    sentences: list[Sentence] = []
    tokens: list[Token] = []
    comments: list[str] = []
    start = 1
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            if tokens:
                sentences.append(_finish(tokens, comments, start))
            elif comments:
                raise ConlluError(f"line {lineno}: comment block without tokens")
            tokens, comments = [], []
            start = lineno + 1
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}")
        if "-" in cols[0] or "." in cols[0]:
            continue
        tid = _parse_int(cols[0], "id", lineno)
        head = _parse_int(cols[6], "head", lineno)
        tokens.append(Token(tid, cols[1], cols[2], cols[3], cols[4], cols[5], head, cols[7], cols[8], cols[9]))
    if tokens:
        sentences.append(_finish(tokens, comments, start))
    elif comments:
        raise ConlluError("trailing comment block without tokens")
    return sentences


def read_conllu_file(path) -> list[Sentence]:
    with open(path, encoding="utf-8", newline="") as f:
        return read_conllu(f)


def write_conllu(sentences: Sequence[Sentence], predicted: Sequence[DependencyTree] | None = None) -> str:
    """Serialize sentences; HEAD/DEPREL come from ``predicted`` when given."""
    if predicted is not None and len(predicted) != len(sentences):
        raise ValueError(f"{len(predicted)} predicted trees for {len(sentences)} sentences")
    out = io.StringIO()
    for i, sent in enumerate(sentences):
        tokens: Iterable[Token] = sent.tokens
        if predicted is not None:
            tokens = _apply_tree(sent, predicted[i], i)
        for c in sent.comments:
            out.write(c + "\n")
        for tok in tokens:
            out.write(tok.to_line() + "\n")
        out.write("\n")
    return out.getvalue()


def write_conllu_file(path, sentences, predicted=None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(write_conllu(sentences, predicted))


def _apply_tree(sent: Sentence, tree: DependencyTree, index: int) -> list[Token]:
    if len(tree) != len(sent):
        raise ValueError(f"sentence {index}: tree has {len(tree)} heads for {len(sent)} tokens")
    labels = tree.labels if tree.labels else [t.deprel for t in sent.tokens]
    return [replace(t, head=int(h), deprel=lab) for t, h, lab in zip(sent.tokens, tree.heads, labels)]


def gold_tree(sentence: Sentence) -> DependencyTree:
    """The annotated tree of ``sentence``; raises TreeError unless well formed."""
    heads = sentence.heads
    check_arborescence(heads)
    return DependencyTree(heads, sentence.deprels)


__all__ = [
    "ConlluError",
    "Token",
    "Sentence",
    "TreeError",
    "read_conllu",
    "read_conllu_file",
    "write_conllu",
    "write_conllu_file",
    "gold_tree",
]
