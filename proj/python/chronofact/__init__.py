"""Temporal claim verification: event extraction, chronology, neural verifier."""

import json

from . import _chronofact
from ._chronofact import (
    ConfigError,
    Error,
    ValidationError,
    chronological_sort,
    godel_aggregate,
    hard_rule,
    macro_f1,
    micro_f1,
)

__all__ = [
    "ConfigError",
    "Error",
    "Model",
    "ValidationError",
    "chronological_sort",
    "extract_events",
    "generate",
    "godel_aggregate",
    "hard_rule",
    "macro_f1",
    "micro_f1",
    "parse_temporal_expression",
    "train",
]


def extract_events(text):
    return json.loads(_chronofact.extract_events(text))


def parse_temporal_expression(text):
    raw = _chronofact.parse_temporal_expression(text)
    return None if raw is None else json.loads(raw)


def generate(subjects, splits, seed=0, order_only=False):
    """splits: mapping or list of (name, count). Returns {split: [record dict]}."""
    pairs = list(splits.items()) if isinstance(splits, dict) else list(splits)
    raw = _chronofact.generate(subjects, pairs, seed, order_only)
    return {name: [json.loads(r) for r in rows] for name, rows in raw.items()}


def train(config_text, train_path, val_path, checkpoint_path):
    """Returns (best validation macro F1, diverged)."""
    return _chronofact.train(config_text, str(train_path), str(val_path or ""), str(checkpoint_path))


class Model:
    def __init__(self, handle):
        self._h = handle

    @classmethod
    def load(cls, path, encoder_seed=0):
        return cls(_chronofact.Model.load(str(path), encoder_seed))

    @classmethod
    def fresh(cls, config_text="", seed=0):
        return cls(_chronofact.Model.fresh(config_text, seed))

    def save(self, path):
        self._h.save(str(path))

    def checksum(self):
        return self._h.checksum()

    def parameter_count(self):
        return self._h.parameter_count()

    def verify(self, claim, evidence):
        return json.loads(self._h.verify_json(claim, list(evidence)))
