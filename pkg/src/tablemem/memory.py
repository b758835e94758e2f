"""Associative memory over a labeled family of same-shaped relation tables.

One register (a :class:`~tablemem.relation.RelationTable`) per class
label.  Registering a function unions it into its register; recognition
tests a cue against every register independently and selects the
accepting register with the lowest entropy; retrieval reduces the
selected register around the cue.

Per-register verdicts and entropies never depend on one another, so they
may be computed in parallel.  Registration mutates exactly one register
and must be exclusive with queries on that register; queries on distinct
registers never contend.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .relation import (
    CueFunction,
    RelationTable,
    containment,
    entropy,
    reduction,
)

__all__ = [
    "AssociativeMemory",
    "RecognitionReport",
    "RetrievalUndefinedError",
    "BundleFormatError",
    "bundle_to_bytes",
    "bundle_from_bytes",
    "save_bundle",
    "load_bundle",
]

_BUNDLE_MAGIC = b"AMB1\n"


class RetrievalUndefinedError(ValueError):
    """No register accepts the cue, so there is nothing to retrieve from."""


class BundleFormatError(ValueError):
    """A memory bundle file is malformed."""


@dataclass(frozen=True)
class RecognitionReport:
    """Outcome of presenting one cue to every register.

    ``selected`` is the accepting label with the lowest register entropy
    (ties broken by label order), or ``None`` when no register accepts.
    """

    verdicts: dict[str, bool]
    entropies: dict[str, float]
    selected: str | None

    @property
    def accepted(self) -> tuple[str, ...]:
        return tuple(label for label, ok in self.verdicts.items() if ok)


class AssociativeMemory:
    """A labeled collection of equally shaped registers."""

    def __init__(self, labels: Iterable[str], n_cols: int, n_rows: int):
        labels = tuple(str(label) for label in labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"labels must be unique, got {labels!r}")
        if n_cols < 1 or n_rows < 1:
            raise ValueError(f"registers need at least 1x1 cells, got {n_cols}x{n_rows}")
        self._labels = labels
        self._n_cols = int(n_cols)
        self._n_rows = int(n_rows)
        self._registers = {label: RelationTable(n_cols, n_rows) for label in labels}

    @classmethod
    def _from_registers(
        cls,
        labels: tuple[str, ...],
        n_cols: int,
        n_rows: int,
        registers: dict[str, RelationTable],
    ) -> "AssociativeMemory":
        memory = object.__new__(cls)
        memory._labels = labels
        memory._n_cols = n_cols
        memory._n_rows = n_rows
        memory._registers = registers
        return memory

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def n_cols(self) -> int:
        return self._n_cols

    @property
    def n_rows(self) -> int:
        return self._n_rows

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: str) -> bool:
        return label in self._registers

    def __getitem__(self, label: str) -> RelationTable:
        """The live register for ``label``; treat it as read-only."""
        try:
            return self._registers[label]
        except KeyError:
            raise KeyError(f"unknown label {label!r}; memory holds {list(self._labels)}") from None

    def items(self) -> Iterator[tuple[str, RelationTable]]:
        return ((label, self._registers[label]) for label in self._labels)

    def register(self, label: str, obj: CueFunction) -> None:
        """Union ``obj`` into the register for ``label``.

        All other registers are untouched, so verdicts against them cannot
        change, and the target register's entropy can only grow or stay.
        """
        if label not in self._registers:
            raise ValueError(f"unknown label {label!r}; memory holds {list(self._labels)}")
        if not isinstance(obj, CueFunction):
            raise TypeError(f"can only register a CueFunction, got {type(obj).__name__}")
        self._registers[label].union_update(obj)

    def entropies(self) -> dict[str, float]:
        return {label: entropy(self._registers[label]) for label in self._labels}

    def recognize(self, cue: CueFunction) -> RecognitionReport:
        """Test ``cue`` against every register and pick the best match.

        Verdicts are independent containment tests, one per register.
        Among accepting registers the one with the lowest entropy wins;
        lower entropy means a more specific register, hence stronger
        evidence.  Ties go to the earlier label.
        """
        verdicts = {label: containment(cue, self._registers[label]) for label in self._labels}
        entropies = self.entropies()
        selected = None
        best = None
        for label in self._labels:
            if verdicts[label] and (best is None or entropies[label] < best):
                best = entropies[label]
                selected = label
        return RecognitionReport(verdicts=verdicts, entropies=entropies, selected=selected)

    def retrieve(
        self,
        cue: CueFunction,
        rng_seed: int,
        sigma: float = 1.0,
    ) -> tuple[str, CueFunction]:
        """Recognize ``cue`` and reduce the selected register around it.

        Raises :class:`RetrievalUndefinedError` when no register accepts
        the cue.  The retrieved function is always contained in the
        selected register.
        """
        report = self.recognize(cue)
        if report.selected is None:
            raise RetrievalUndefinedError("retrieval undefined: no register accepts the cue")
        return report.selected, reduction(cue, self._registers[report.selected], rng_seed, sigma)


# -- bundle persistence ----------------------------------------------------
#
# Bundle layout: magic b"AMB1\n"; one JSON manifest line listing labels,
# dimensions and optional metadata; then one binary table record per label,
# concatenated in label order.


def bundle_to_bytes(memory: AssociativeMemory, metadata: dict | None = None) -> bytes:
    manifest: dict = {
        "labels": list(memory.labels),
        "n_cols": memory.n_cols,
        "n_rows": memory.n_rows,
    }
    if metadata is not None:
        manifest["metadata"] = metadata
    blob = _BUNDLE_MAGIC
    blob += json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    blob += b"\n"
    for label in memory.labels:
        blob += memory[label].to_bytes()
    return blob


def bundle_from_bytes(data: bytes) -> tuple[AssociativeMemory, dict | None]:
    if not data.startswith(_BUNDLE_MAGIC):
        raise BundleFormatError(
            f"bad bundle magic {data[:5]!r}, expected {_BUNDLE_MAGIC!r}"
        )
    newline = data.find(b"\n", len(_BUNDLE_MAGIC))
    if newline < 0:
        raise BundleFormatError("bundle manifest line is missing its newline")
    try:
        manifest = json.loads(data[len(_BUNDLE_MAGIC):newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BundleFormatError(f"bundle manifest is not valid JSON: {exc}") from exc
    try:
        labels = tuple(str(label) for label in manifest["labels"])
        n_cols = int(manifest["n_cols"])
        n_rows = int(manifest["n_rows"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleFormatError(f"bundle manifest is incomplete: {exc}") from exc
    if len(set(labels)) != len(labels):
        raise BundleFormatError(f"bundle labels are not unique: {labels!r}")
    if n_cols < 1 or n_rows < 1:
        raise BundleFormatError(f"bad bundle dimensions {n_cols}x{n_rows}")
    metadata = manifest.get("metadata")

    registers: dict[str, RelationTable] = {}
    offset = newline + 1
    for label in labels:
        try:
            table, offset = RelationTable._read_record(data, offset)
        except ValueError as exc:
            raise BundleFormatError(f"register {label!r}: {exc}") from exc
        if table.shape != (n_cols, n_rows):
            raise BundleFormatError(
                f"register {label!r} is {table.n_cols}x{table.n_rows}, "
                f"manifest says {n_cols}x{n_rows}"
            )
        registers[label] = table
    if offset != len(data):
        raise BundleFormatError(f"{len(data) - offset} trailing bytes after last register")
    memory = AssociativeMemory._from_registers(labels, n_cols, n_rows, registers)
    return memory, metadata


def save_bundle(memory: AssociativeMemory, path, metadata: dict | None = None) -> None:
    Path(path).write_bytes(bundle_to_bytes(memory, metadata))


def load_bundle(path) -> tuple[AssociativeMemory, dict | None]:
    return bundle_from_bytes(Path(path).read_bytes())
