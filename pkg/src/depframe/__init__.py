"""Modular graph-based dependency parsing."""
from depframe.conllu import (
    Sentence,
    Token,
    gold_tree,
    read_conllu,
    read_conllu_file,
    write_conllu,
    write_conllu_file,
)
from depframe.decoders import cle, eisner
from depframe.evaluation import EvalConfig, EvalResult, evaluate
from depframe.runner import Model, ModelConfig, train
from depframe.trees import DependencyTree
from depframe.vocab import Vocabulary

__version__ = "0.1.0"

__all__ = [
    "DependencyTree",
    "EvalConfig",
    "EvalResult",
    "Model",
    "ModelConfig",
    "Sentence",
    "Token",
    "Vocabulary",
    "cle",
    "eisner",
    "evaluate",
    "gold_tree",
    "read_conllu",
    "read_conllu_file",
    "train",
    "write_conllu",
    "write_conllu_file",
]
