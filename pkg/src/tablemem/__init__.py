"""tablemem: bit-table relations, their entropy, and an associative memory.

Relations live in boolean tables (columns are arguments, rows are
values).  Union builds them up, containment recognizes what they hold,
seeded reduction draws one contained function back out, and the entropy
measure says how indeterminate each table has become.  An associative
memory keeps one such table per class label and routes recognition and
retrieval through those operations.
"""

from .codec import QuantizerConfig, decode, encode, load_corpus, write_corpus
from .memory import (
    AssociativeMemory,
    RecognitionReport,
    RetrievalUndefinedError,
    load_bundle,
    save_bundle,
)
from .productivity import TauProfile, shannon_entropy, tau
from .relation import (
    CueFunction,
    DimensionMismatchError,
    EnumerationCapError,
    ReductionUndefinedError,
    RelationTable,
    abstraction,
    constituent_functions,
    containment,
    entropy,
    reduction,
)
from .sweep import run_sweep, split_records, sweep_csv
from .synth import generate_corpus

__version__ = "0.1.0"

__all__ = [
    "RelationTable",
    "CueFunction",
    "abstraction",
    "containment",
    "reduction",
    "entropy",
    "constituent_functions",
    "DimensionMismatchError",
    "ReductionUndefinedError",
    "EnumerationCapError",
    "AssociativeMemory",
    "RecognitionReport",
    "RetrievalUndefinedError",
    "save_bundle",
    "load_bundle",
    "QuantizerConfig",
    "encode",
    "decode",
    "load_corpus",
    "write_corpus",
    "shannon_entropy",
    "TauProfile",
    "tau",
    "generate_corpus",
    "run_sweep",
    "split_records",
    "sweep_csv",
    "__version__",
]
