"""Training orchestration: config, epoch loop, early stopping, callbacks."""
from __future__ import annotations

import dataclasses
import json
import logging
import shutil
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Protocol, Sequence

from depframe.batching import epoch_seed, get_strategy
from depframe.conllu import Sentence, gold_tree
from depframe.decoders import DECODERS, get_decoder
from depframe.evaluation import EvalConfig, evaluate
from depframe.features import FeatureSet
from depframe.loss import LOSSES, NEEDS_PREDICTION, get_loss
from depframe.sparse_model import LEARNERS, SparseParser
from depframe.trees import DependencyTree
from depframe.vocab import Vocabulary

log = logging.getLogger(__name__)


@dataclass
class ModelConfig:
    decoder: str = "cle"
    loss: str = "hinge"
    learner: str = "perceptron"
    strategy: str = "bucket"
    epochs: int = 30
    batch_size: int = 32
    token_budget: int = 5000
    seed: int = 1
    patience: int = 0
    ignore_punctuation: bool = False
    label_prefix: bool = False
    mira_c: float = 1.0
    hash_bits: int = 22
    min_frequency: int = 2
    lowercase: bool = True
    num_norm: bool = True

    @property
    def eval_config(self) -> EvalConfig:
        return EvalConfig(self.ignore_punctuation, self.label_prefix)

    def validate(self) -> None:
        checks = (
            ("decoder", self.decoder, DECODERS),
            ("loss", self.loss, LOSSES),
            ("learner", self.learner, LEARNERS),
            ("strategy", self.strategy, ("bucket", "padded", "budget")),
        )
        for what, name, registry in checks:
            if name not in registry:
                raise KeyError(f"unknown {what} {name!r}; choose from {sorted(registry)}")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.patience < 0:
            raise ValueError("patience must be >= 0")

    def to_text(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)}\n" for f in dataclasses.fields(self))

    @classmethod
    def from_text(cls, text: str, **overrides: Any) -> "ModelConfig":
        """Flat ``key = value`` lines; ``#`` starts a comment."""
        values: dict[str, Any] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(values)

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> "ModelConfig":
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in values.items():
            if key not in types:
                raise KeyError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(value, types[key])
        return cls(**kwargs)


def _coerce(value: Any, type_name: str) -> Any:
    if not isinstance(value, str):
        return value
    if type_name == "bool":
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    if type_name == "int":
        return int(value)
    if type_name == "float":
        return float(value)
    return value


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    head_errors: int
    dev_uas: float | None
    dev_las: float | None
    seconds: float


@dataclass
class TrainingHistory:
    records: list[EpochRecord] = field(default_factory=list)
    best_epoch: int | None = None
    stopped_early: bool = False

    def to_jsonl(self) -> str:
        return "".join(json.dumps(dataclasses.asdict(r), sort_keys=True) + "\n" for r in self.records)

    def save(self, path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


class TrainingAborted(RuntimeError):
    def __init__(self, message: str, history: TrainingHistory):
        super().__init__(message)
        self.history = history


class Parser(Protocol):
    """What the training loop needs from a scorer/learner."""

    def train_step(self, sentence: Sentence, gold: DependencyTree, decoder_name: str,
                   loss_fn=None, augment: bool = False) -> tuple[float, int]: ...

    def parse(self, sentence: Sentence, decoder_name: str) -> DependencyTree: ...

    def snapshot(self) -> "Parser": ...


class Callback:
    def on_train_begin(self, model: "Model") -> None:
        pass

    def on_epoch_end(self, model: "Model", record: EpochRecord, improved: bool) -> None:
        pass

    def on_train_end(self, model: "Model", history: TrainingHistory) -> None:
        pass


class MetricLogger(Callback):
    """One JSON record per epoch, flushed immediately."""

    def __init__(self, path):
        self.path = Path(path)

    def on_train_begin(self, model):
        self.path.write_text("", encoding="utf-8")

    def on_epoch_end(self, model, record, improved):
        with self.path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(dataclasses.asdict(record), sort_keys=True) + "\n")


class ModelCheckpoint(Callback):
    """Writes ``<prefix>.epoch<k>`` every epoch and copies improvements to ``<prefix>.best``."""

    def __init__(self, prefix):
        self.prefix = str(prefix)

    def on_epoch_end(self, model, record, improved):
        path = f"{self.prefix}.epoch{record.epoch}"
        model.parser.save(path)
        if improved:
            shutil.copyfile(path, f"{self.prefix}.best")


class Patience:
    """Counts epochs without a strictly better score."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best: float | None = None
        self.wait = 0

    def step(self, score: float) -> bool:
        """Record ``score``; True when it is a new best."""
        if self.best is None or score > self.best:
            self.best = score
            self.wait = 0
            return True
        self.wait += 1
        return False

    @property
    def exhausted(self) -> bool:
        return self.patience > 0 and self.wait >= self.patience


class Model:
    """A parser plus the decoder, loss, learner and batching it trains with."""

    def __init__(self, parser, decoder: str = "cle", loss: str = "hinge", optimizer: str | None = None,
                 strategy: str = "bucket", vocab: Vocabulary | None = None, seed: int = 1,
                 eval_config: EvalConfig = EvalConfig()):
        get_decoder(decoder)
        self.loss_fn = get_loss(loss)
        get_strategy(strategy)
        if optimizer is not None and hasattr(parser, "learner"):
            if optimizer not in LEARNERS:
                raise KeyError(f"unknown learner {optimizer!r}; choose from {list(LEARNERS)}")
            parser.learner = optimizer
        self.parser = parser
        self.decoder = decoder
        self.loss = loss
        self.strategy = strategy
        self.vocab = vocab if vocab is not None else getattr(parser, "vocab", None)
        self.seed = seed
        self.eval_config = eval_config

    def _batches(self, encoded, batch_size: int, token_budget: int | None, epoch: int):
        fn = get_strategy(self.strategy)
        size = token_budget if self.strategy == "budget" else batch_size
        if self.strategy == "budget" and size is None:
            raise ValueError("budget strategy needs a token budget")
        return fn(encoded, size, epoch_seed(self.seed, epoch))

    def train(self, train: Sequence[Sentence], dev: Sequence[Sentence] = (), epochs: int = 30,
              batch_size: int = 32, token_budget: int | None = None, patience: int = 0,
              callbacks: Iterable[Callback] = ()) -> TrainingHistory:
        if not train:
            raise ValueError("empty training data")
        if patience > 0 and not dev:
            raise ValueError("patience needs a non-empty dev set")
        callbacks = list(callbacks)
        golds = [gold_tree(s) for s in train]
        encoded = [self.vocab.encode(s) for s in train]
        augment = self.loss in NEEDS_PREDICTION
        history = TrainingHistory()
        stopper = Patience(patience)
        best = None
        try:
            for cb in callbacks:
                cb.on_train_begin(self)
            for epoch in range(1, epochs + 1):
                start = time.perf_counter()
                total_loss, errors = 0.0, 0
                for batch in self._batches(encoded, batch_size, token_budget, epoch):
                    for i in batch.sentence_indices:
                        loss, err = self.parser.train_step(train[i], golds[i], self.decoder, self.loss_fn, augment)
                        total_loss += loss
                        errors += err
                uas = las = None
                improved = False
                if dev:
                    result = evaluate(dev, self.run(dev), self.eval_config)
                    uas, las = result.uas, result.las
                    improved = stopper.step(uas)
                    if improved:
                        best = self.parser.snapshot()
                        history.best_epoch = epoch
                record = EpochRecord(epoch, total_loss, errors, uas, las, time.perf_counter() - start)
                history.records.append(record)
                log.info("epoch %d loss %.3f errors %d dev uas %s", epoch, total_loss, errors, uas)
                for cb in callbacks:
                    cb.on_epoch_end(self, record, improved)
                if stopper.exhausted:
                    history.stopped_early = True
                    break
        except Exception as exc:
            raise TrainingAborted(f"training aborted in epoch {len(history.records) + 1}: {exc}", history) from exc
        self.parser = best if best is not None else self.parser.snapshot()
        for cb in callbacks:
            cb.on_train_end(self, history)
        return history

    def run(self, data: Sequence[Sentence]) -> list[DependencyTree]:
        return [self.parser.parse(s, self.decoder) for s in data]

    def save(self, path) -> None:
        self.parser.save(path)


def build_model(config: ModelConfig, train_data: Sequence[Sentence],
                pretrained_forms: Iterable[str] | None = None) -> Model:
    config.validate()
    vocab = Vocabulary.fit(train_data, config.min_frequency, pretrained_forms,
                           lowercase=config.lowercase, num_norm=config.num_norm)
    parser = SparseParser(vocab, FeatureSet(1 << config.hash_bits), config.learner, config.mira_c)
    return Model(parser, config.decoder, config.loss, config.learner, config.strategy, vocab,
                 config.seed, config.eval_config)


def train(config: ModelConfig, train_data: Sequence[Sentence], dev_data: Sequence[Sentence] = (),
          callbacks: Iterable[Callback] = ()) -> tuple[Model, TrainingHistory]:
    """Fit a vocabulary and a sparse parser; return the best-dev model."""
    if not train_data:
        raise ValueError("empty training data")
    if config.patience > 0 and not dev_data:
        raise ValueError("patience needs a non-empty dev set")
    model = build_model(config, train_data)
    history = model.train(train_data, dev_data, config.epochs, config.batch_size,
                          config.token_budget, config.patience, callbacks)
    return model, history


def run(model: Model, data: Sequence[Sentence]) -> list[DependencyTree]:
    return model.run(data)
