"""Experiment engine: deterministic splits, recognition scoring, sweeps.

A sweep builds one memory per training-set size, scoring held-out
recognition (precision/recall) and cue/retrieval agreement at each step.
Registers only ever grow, so the per-step memories are built
incrementally and mean register entropy is non-decreasing in the number
of instances per class.  Every number emitted is a pure function of
(corpus, config, steps, seed list).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .codec import QuantizerConfig, encode
from .memory import AssociativeMemory
from .relation import CueFunction

__all__ = [
    "split_records",
    "build_memory",
    "score_recognition",
    "column_agreement",
    "mean_retrieval_agreement",
    "SweepRow",
    "RecognitionScore",
    "run_sweep",
    "sweep_csv",
    "DEFAULT_STEPS",
]

DEFAULT_STEPS = (1, 2, 5, 10, 25, 50, 100)
TRAIN_FRACTION = 0.8
# Fixed split seed: the train/test assignment of a record depends only on
# its index in the corpus.
_SPLIT_SEED = 13


def _index_fraction(index: int, seed: int = _SPLIT_SEED) -> float:
    digest = hashlib.sha256(f"{seed}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "little") / 2.0 ** 64


def split_records(records, train_fraction: float = TRAIN_FRACTION):
    """Deterministic train/test split by hashing each record's index."""
    train, test = [], []
    for index, record in enumerate(records):
        (train if _index_fraction(index) < train_fraction else test).append(record)
    return train, test


def build_memory(
    encoded: list[tuple[str, CueFunction]],
    cfg: QuantizerConfig,
    labels=None,
) -> AssociativeMemory:
    """Register every encoded (label, cue) pair into a fresh memory."""
    if labels is None:
        labels = sorted({label for label, _ in encoded})
    memory = AssociativeMemory(labels, cfg.n_cols, cfg.levels)
    for label, cue in encoded:
        memory.register(label, cue)
    return memory


@dataclass
class ItemResult:
    index: int
    label: str
    selected: str | None
    correct: bool
    verdicts: dict[str, bool]


@dataclass
class RecognitionScore:
    """Per-item verdicts plus per-class and overall precision/recall.

    Per-class precision is ``None`` when the class was never selected.
    Overall precision counts 0 when nothing was selected at all;
    rejections count against recall only.
    """

    items: list[ItemResult]
    per_label_precision: dict[str, float | None]
    per_label_recall: dict[str, float]
    precision: float
    recall: float


def score_recognition(
    memory: AssociativeMemory,
    encoded: list[tuple[str, CueFunction]],
) -> RecognitionScore:
    items: list[ItemResult] = []
    for index, (label, cue) in enumerate(encoded):
        report = memory.recognize(cue)
        items.append(
            ItemResult(
                index=index,
                label=label,
                selected=report.selected,
                correct=report.selected == label,
                verdicts=report.verdicts,
            )
        )

    labels = list(memory.labels)
    for item in items:  # classes present in the corpus but absent from memory
        if item.label not in labels:
            labels.append(item.label)

    per_label_precision: dict[str, float | None] = {}
    per_label_recall: dict[str, float] = {}
    for label in labels:
        selected = [item for item in items if item.selected == label]
        truly = [item for item in items if item.label == label]
        correct = sum(1 for item in selected if item.correct)
        per_label_precision[label] = correct / len(selected) if selected else None
        per_label_recall[label] = correct / len(truly) if truly else 0.0

    selected_total = sum(1 for item in items if item.selected is not None)
    correct_total = sum(1 for item in items if item.correct)
    precision = correct_total / selected_total if selected_total else 0.0
    recall = correct_total / len(items) if items else 0.0
    return RecognitionScore(items, per_label_precision, per_label_recall, precision, recall)


def column_agreement(cue: CueFunction, retrieved: CueFunction) -> float:
    """Fraction of all columns where the retrieval reproduces the cue."""
    matches = sum(1 for col, row in retrieved if cue.get(col) == row)
    return matches / cue.n_cols


def mean_retrieval_agreement(
    memory: AssociativeMemory,
    cues: list[CueFunction],
    seeds,
    sigma: float = 1.0,
) -> float:
    """Mean cue/retrieval agreement over all given cues and seeds."""
    total = 0.0
    runs = 0
    for cue in cues:
        for seed in seeds:
            _, retrieved = memory.retrieve(cue, seed, sigma)
            total += column_agreement(cue, retrieved)
            runs += 1
    return total / runs if runs else 0.0


@dataclass
class SweepRow:
    instances_per_class: int
    mean_entropy: float
    precision: float
    recall: float
    agreement: float
    per_label_precision: dict[str, float | None] = field(default_factory=dict)
    per_label_recall: dict[str, float] = field(default_factory=dict)


def run_sweep(
    records,
    cfg: QuantizerConfig,
    steps=DEFAULT_STEPS,
    seeds=(0, 1, 2, 3, 4),
    sigma: float = 1.0,
    cues_per_class: int = 10,
) -> tuple[list[str], list[SweepRow]]:
    """Sweep training size over ``steps`` and score each resulting memory.

    The corpus is split 80/20 by the fixed index hash; step ``s`` trains
    on the first ``s`` training instances of every class (in file order)
    and scores recognition on the full held-out split.  Agreement is
    measured by retrieving the first ``min(s, cues_per_class)`` training
    cues of every class under each seed: registered cues are always
    accepted, so the metric is defined at every step and equals 1.0 while
    the registers are still entropy-free.
    """
    steps = list(steps)
    if not steps or any(b <= a for a, b in zip(steps, steps[1:])):
        raise ValueError(f"steps must be strictly increasing and non-empty, got {steps}")
    if steps[0] < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one retrieval seed")

    labels = sorted({label for label, _ in records})
    if not labels:
        raise ValueError("corpus is empty")
    train, test = split_records(records)
    train_cues: dict[str, list[CueFunction]] = {label: [] for label in labels}
    for label, image in train:
        train_cues[label].append(encode(image, cfg))
    test_encoded = [(label, encode(image, cfg)) for label, image in test]

    largest = steps[-1]
    for label in labels:
        if len(train_cues[label]) < largest:
            raise ValueError(
                f"too few instances: step {largest} needs {largest} training "
                f"instances per class, class {label!r} has {len(train_cues[label])}"
            )

    memory = AssociativeMemory(labels, cfg.n_cols, cfg.levels)
    rows: list[SweepRow] = []
    done = 0
    for step in steps:
        for label in labels:
            for cue in train_cues[label][done:step]:
                memory.register(label, cue)
        done = step

        entropies = memory.entropies()
        mean_entropy = float(np.mean(list(entropies.values())))
        score = score_recognition(memory, test_encoded)
        agreement_cues = [
            cue
            for label in labels
            for cue in train_cues[label][: min(step, cues_per_class)]
        ]
        agreement = mean_retrieval_agreement(memory, agreement_cues, seeds, sigma)
        rows.append(
            SweepRow(
                instances_per_class=step,
                mean_entropy=mean_entropy,
                precision=score.precision,
                recall=score.recall,
                agreement=agreement,
                per_label_precision=score.per_label_precision,
                per_label_recall=score.per_label_recall,
            )
        )
    return labels, rows


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def sweep_csv(labels: list[str], rows: list[SweepRow]) -> str:
    """Render sweep rows as CSV, one row per step."""
    header = ["instances_per_class", "mean_entropy", "precision", "recall", "agreement"]
    header += [f"precision_{label}" for label in labels]
    header += [f"recall_{label}" for label in labels]
    lines = [",".join(header)]
    for row in rows:
        fields = [
            str(row.instances_per_class),
            _fmt(row.mean_entropy),
            _fmt(row.precision),
            _fmt(row.recall),
            _fmt(row.agreement),
        ]
        fields += [_fmt(row.per_label_precision.get(label)) for label in labels]
        fields += [_fmt(row.per_label_recall.get(label, 0.0)) for label in labels]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"
