"""Bit-table relations and their algebra.

A finite relation between ``n_cols`` arguments and ``n_rows`` values is
stored as a boolean grid: cell ``(col, row)`` is set when argument ``col``
may take value ``row``.  A function is the special case with at most one
set cell per column.

Three operations act on these tables:

* :func:`abstraction` -- cell-wise union of two tables,
* :func:`containment` -- cell-wise material implication test,
* :func:`reduction`  -- seeded stochastic selection of one marked row per
  column, biased toward a cue function.

:func:`entropy` summarizes the residual indeterminacy of a table as the
mean ``log2`` of marked rows per column, in bits.
:func:`constituent_functions` enumerates every function a table contains;
it exists as a brute-force oracle for tests and diagnostics.

All cell-wise kernels are expressed column-independently (plain numpy
array ops), so they may be evaluated in any order or in parallel with
bit-identical results.  Reduction draws its randomness exclusively from
the explicit seed; there is no hidden global random state.
"""

from __future__ import annotations

import itertools
import math
import random
import struct
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "RelationTable",
    "CueFunction",
    "DimensionMismatchError",
    "ReductionUndefinedError",
    "EnumerationCapError",
    "abstraction",
    "containment",
    "reduction",
    "entropy",
    "constituent_functions",
    "DEFAULT_ENUMERATION_CAP",
]

#: Upper bound on how many functions ``constituent_functions`` will expand.
DEFAULT_ENUMERATION_CAP = 1 << 20

_RECORD_MAGIC = b"AMR1"
_RECORD_HEADER = struct.Struct("<4sII")


class DimensionMismatchError(ValueError):
    """Two tables (or a cue and a table) disagree in shape."""


class ReductionUndefinedError(ValueError):
    """Reduction was applied to a cue the table does not contain."""


class EnumerationCapError(ValueError):
    """Constituent enumeration would exceed the configured cap."""

    def __init__(self, message: str, count: int):
        super().__init__(message)
        self.count = count


class RelationTable:
    """An ``n_cols x n_rows`` boolean grid representing a finite relation.

    Columns index arguments, rows index values.  Tables are treated as
    immutable once constructed; the single sanctioned mutation is
    :meth:`union_update`, the explicit in-place union used by memory
    registration.  All query operations are safe to run concurrently on
    a shared table.
    """

    __slots__ = ("_cells",)

    def __init__(self, n_cols: int, n_rows: int, marks: Iterable[tuple[int, int]] = ()):
        if n_cols < 1 or n_rows < 1:
            raise ValueError(
                f"table needs at least one column and one row, got {n_cols}x{n_rows}"
            )
        cells = np.zeros((n_cols, n_rows), dtype=bool)
        for col, row in marks:
            if not (0 <= col < n_cols and 0 <= row < n_rows):
                raise IndexError(
                    f"mark ({col}, {row}) lies outside a {n_cols}x{n_rows} table"
                )
            cells[col, row] = True
        self._cells = cells

    @classmethod
    def from_cells(cls, cells) -> "RelationTable":
        """Build a table from a 2-D array-like of 0/1 or booleans.

        Axis 0 is columns (arguments), axis 1 is rows (values).
        """
        arr = np.asarray(cells)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"cells must be a non-empty 2-D grid, got shape {arr.shape}")
        if arr.dtype != bool:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("cells must contain only 0/1 or boolean values")
            arr = arr.astype(bool)
        return cls._wrap(arr.copy())

    @classmethod
    def _wrap(cls, cells: np.ndarray) -> "RelationTable":
        # Trusted path: cells is a fresh boolean array owned by the new table.
        table = object.__new__(cls)
        table._cells = cells
        return table

    @property
    def n_cols(self) -> int:
        return self._cells.shape[0]

    @property
    def n_rows(self) -> int:
        return self._cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._cells.shape

    def cell(self, col: int, row: int) -> bool:
        """Return whether ``(col, row)`` is marked; out of range is an error."""
        if not (0 <= col < self.n_cols and 0 <= row < self.n_rows):
            raise IndexError(
                f"cell ({col}, {row}) lies outside a {self.n_cols}x{self.n_rows} table"
            )
        return bool(self._cells[col, row])

    def marks(self) -> list[tuple[int, int]]:
        """All marked cells as ``(col, row)`` pairs in column-major order."""
        return [(int(c), int(r)) for c, r in np.argwhere(self._cells)]

    def column_counts(self) -> np.ndarray:
        """Number of marked rows per column (the per-argument indeterminacy)."""
        return self._cells.sum(axis=1)

    def is_function(self) -> bool:
        """True when no column holds more than one mark."""
        return bool((self._cells.sum(axis=1) <= 1).all())

    def copy(self) -> "RelationTable":
        return RelationTable._wrap(self._cells.copy())

    def union_update(self, other: "RelationTable | CueFunction") -> None:
        """In-place union: the one sanctioned mutation of a table."""
        if isinstance(other, CueFunction):
            cols, rows = other._as_index_arrays(self.n_cols, self.n_rows)
            self._cells[cols, rows] = True
            return
        _check_same_shape(other, self)
        np.logical_or(self._cells, other._cells, out=self._cells)

    # -- serialization ----------------------------------------------------
    #
    # Binary record layout: magic b"AMR1", then n_cols and n_rows as 32-bit
    # little-endian unsigned integers, then the cells row-major (row 0 col 0
    # first), packed 8 cells per byte, most-significant bit first, with the
    # final byte zero-padded.

    def to_bytes(self) -> bytes:
        header = _RECORD_HEADER.pack(_RECORD_MAGIC, self.n_cols, self.n_rows)
        packed = np.packbits(self._cells.T, axis=None)  # row-major, MSB first
        return header + packed.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "RelationTable":
        table, end = cls._read_record(data, 0)
        if end != len(data):
            raise ValueError(f"{len(data) - end} trailing bytes after table record")
        return table

    @classmethod
    def _read_record(cls, data: bytes, offset: int) -> tuple["RelationTable", int]:
        """Parse one binary record starting at ``offset``; returns (table, end)."""
        header_end = offset + _RECORD_HEADER.size
        if len(data) < header_end:
            raise ValueError("truncated table record: incomplete header")
        magic, n_cols, n_rows = _RECORD_HEADER.unpack_from(data, offset)
        if magic != _RECORD_MAGIC:
            raise ValueError(f"bad table record magic {magic!r}, expected {_RECORD_MAGIC!r}")
        if n_cols < 1 or n_rows < 1:
            raise ValueError(f"bad table record dimensions {n_cols}x{n_rows}")
        n_bits = n_cols * n_rows
        n_bytes = (n_bits + 7) // 8
        end = header_end + n_bytes
        if len(data) < end:
            raise ValueError("truncated table record: incomplete cell payload")
        packed = np.frombuffer(data, dtype=np.uint8, count=n_bytes, offset=header_end)
        bits = np.unpackbits(packed)
        if bits[n_bits:].any():
            raise ValueError("bad table record: padding bits are not zero")
        cells = bits[:n_bits].reshape(n_rows, n_cols).T.astype(bool)
        return cls._wrap(np.ascontiguousarray(cells)), end

    def __eq__(self, other) -> bool:
        if not isinstance(other, RelationTable):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._cells, other._cells))

    __hash__ = None  # mutable via union_update

    def __repr__(self) -> str:
        return (
            f"RelationTable({self.n_cols}x{self.n_rows}, "
            f"{int(self._cells.sum())} marks)"
        )


class CueFunction:
    """A partial function from columns to rows: the cue/argument object.

    At most one row per column; columns may be left undefined.  Viewed as
    a table it has at most one mark per column, so it can stand anywhere
    a function-shaped relation is expected.
    """

    __slots__ = ("_n_cols", "_assignment")

    def __init__(self, n_cols: int, assignment: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if n_cols < 1:
            raise ValueError(f"cue needs at least one column, got {n_cols}")
        clean: dict[int, int] = {}
        for col, row in dict(assignment).items():
            col = int(col)
            row = int(row)
            if not 0 <= col < n_cols:
                raise IndexError(f"column {col} lies outside a {n_cols}-column cue")
            if row < 0:
                raise IndexError(f"column {col} maps to negative row {row}")
            clean[col] = row
        self._n_cols = int(n_cols)
        self._assignment = clean

    @classmethod
    def from_rows(cls, rows: Iterable[int | None]) -> "CueFunction":
        """Build a cue from one entry per column; ``None`` leaves it undefined."""
        rows = list(rows)
        return cls(len(rows), {c: r for c, r in enumerate(rows) if r is not None})

    @classmethod
    def _wrap(cls, n_cols: int, assignment: dict[int, int]) -> "CueFunction":
        cue = object.__new__(cls)
        cue._n_cols = n_cols
        cue._assignment = assignment
        return cue

    @property
    def n_cols(self) -> int:
        return self._n_cols

    def defined_columns(self) -> tuple[int, ...]:
        return tuple(sorted(self._assignment))

    def is_total(self) -> bool:
        return len(self._assignment) == self._n_cols

    def get(self, col: int, default=None):
        return self._assignment.get(col, default)

    def __getitem__(self, col: int) -> int:
        return self._assignment[col]

    def __contains__(self, col: int) -> bool:
        return col in self._assignment

    def __len__(self) -> int:
        return len(self._assignment)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self._assignment.items()))

    def as_dict(self) -> dict[int, int]:
        return dict(self._assignment)

    def restricted_to(self, cols: Iterable[int]) -> "CueFunction":
        """The same cue with its domain cut down to ``cols``."""
        keep = set(cols)
        return CueFunction._wrap(
            self._n_cols, {c: r for c, r in self._assignment.items() if c in keep}
        )

    def to_table(self, n_rows: int) -> RelationTable:
        """The table view: one mark per defined column."""
        cells = np.zeros((self._n_cols, n_rows), dtype=bool)
        cols, rows = self._as_index_arrays(self._n_cols, n_rows)
        cells[cols, rows] = True
        return RelationTable._wrap(cells)

    def _as_index_arrays(self, n_cols: int, n_rows: int) -> tuple[np.ndarray, np.ndarray]:
        if self._n_cols != n_cols:
            raise DimensionMismatchError(
                f"cue has {self._n_cols} columns, table has {n_cols}"
            )
        for col, row in self._assignment.items():
            if row >= n_rows:
                raise DimensionMismatchError(
                    f"cue maps column {col} to row {row}, outside a table with {n_rows} rows"
                )
        cols = np.fromiter(self._assignment.keys(), dtype=np.intp, count=len(self._assignment))
        rows = np.fromiter(self._assignment.values(), dtype=np.intp, count=len(self._assignment))
        return cols, rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, CueFunction):
            return NotImplemented
        return self._n_cols == other._n_cols and self._assignment == other._assignment

    __hash__ = None

    def __repr__(self) -> str:
        pairs = ", ".join(f"{c}->{r}" for c, r in sorted(self._assignment.items()))
        return f"CueFunction({self._n_cols} cols, {{{pairs}}})"


def _check_same_shape(a: RelationTable, b: RelationTable) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"shape mismatch: {a.n_cols}x{a.n_rows} vs {b.n_cols}x{b.n_rows}"
        )


def abstraction(f: RelationTable, a: RelationTable) -> RelationTable:
    """Cell-wise union of two same-shaped tables; the inputs are untouched.

    The operation is commutative, associative and idempotent, with the
    all-false table as identity.  It only ever adds marks, so the entropy
    of the result is at least that of either input.
    """
    _check_same_shape(f, a)
    return RelationTable._wrap(np.logical_or(f._cells, a._cells))


def containment(a: RelationTable | CueFunction, f: RelationTable) -> bool:
    """Whether every mark of ``a`` is also a mark of ``f``.

    Material implication checked cell by cell: false exactly when some
    cell is marked in ``a`` but not in ``f``.  A :class:`CueFunction` is
    accepted for ``a`` via its table view.
    """
    if isinstance(a, CueFunction):
        cols, rows = a._as_index_arrays(f.n_cols, f.n_rows)
        if cols.size == 0:
            return True
        return bool(f._cells[cols, rows].all())
    _check_same_shape(a, f)
    return not bool(np.any(a._cells & ~f._cells))


def entropy(table: RelationTable) -> float:
    """Mean per-column indeterminacy of a table, in bits.

    Each column contributes ``log2`` of its number of marked rows; empty
    columns contribute zero, so any (partial) function measures exactly
    0.0 and a fully marked table measures ``log2(n_rows)``.
    """
    counts = table._cells.sum(axis=1)
    return float(np.log2(np.maximum(counts, 1)).sum() / table.n_cols)


def reduction(
    cue: CueFunction,
    table: RelationTable,
    rng_seed: int,
    sigma: float = 1.0,
) -> CueFunction:
    """Stochastic functional application: pick one marked row per column.

    Requires ``containment(cue, table)``; otherwise the operation is
    undefined and :class:`ReductionUndefinedError` is raised.  For each
    non-empty column the returned function selects a marked row:

    * where the cue defines the column, rows are drawn with probability
      proportional to a gaussian kernel ``exp(-(row - cue_row)^2 /
      (2 sigma^2))`` restricted and renormalized to the marked rows;
    * where the cue is silent, the draw is uniform over the marked rows.

    Columns with no marks are left undefined.  Equal ``(cue, table,
    rng_seed, sigma)`` always produce the same output: the draws come
    from ``random.Random(rng_seed)``, whose stream is stable across runs
    and platforms.
    """
    if not isinstance(cue, CueFunction):
        raise TypeError(f"cue must be a CueFunction, got {type(cue).__name__}")
    if not (isinstance(sigma, (int, float)) and math.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be a positive finite number, got {sigma!r}")
    if not containment(cue, table):
        raise ReductionUndefinedError(
            "reduction undefined: the cue is not contained in the table"
        )

    cells = table._cells
    n_cols, n_rows = cells.shape
    counts = cells.sum(axis=1)
    nonempty = counts > 0

    cue_rows = np.full(n_cols, -1, dtype=np.int64)
    for col, row in cue._assignment.items():
        cue_rows[col] = row
    defined = cue_rows >= 0

    rows = np.arange(n_rows, dtype=np.float64)
    centers = np.where(defined, cue_rows, 0).astype(np.float64)
    expo = -((rows[None, :] - centers[:, None]) ** 2) / (2.0 * sigma * sigma)
    expo = np.where(defined[:, None], expo, 0.0)
    expo = np.where(cells, expo, -np.inf)

    # Shift so the best marked row in each column has weight exactly 1;
    # keeps tiny sigmas from underflowing every weight to zero.
    col_max = np.where(nonempty, expo.max(axis=1), 0.0)
    weights = np.exp(expo - col_max[:, None])

    cum = np.cumsum(weights, axis=1)
    totals = cum[:, -1]
    draws = random.Random(rng_seed)
    u = np.array([draws.random() for _ in range(n_cols)])
    targets = u * totals
    chosen = (cum <= targets[:, None]).sum(axis=1)
    # Guard the (measure-zero) case where rounding pushes a target to the
    # total; never step past the last marked row.
    last_marked = n_rows - 1 - np.argmax(cells[:, ::-1], axis=1)
    chosen = np.minimum(chosen, last_marked)

    assignment = {int(c): int(chosen[c]) for c in np.flatnonzero(nonempty)}
    return CueFunction._wrap(n_cols, assignment)


def constituent_functions(
    table: RelationTable,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[CueFunction]:
    """Enumerate every function contained in ``table``.

    A constituent function picks one marked row for each non-empty column
    and leaves empty columns undefined; there are exactly ``prod(max(mu,
    1))`` of them over the per-column mark counts ``mu``.  Enumeration is
    refused with :class:`EnumerationCapError` when that product exceeds
    ``cap`` -- this is a test oracle, not a production path.
    """
    cells = table._cells
    marked = [np.flatnonzero(cells[col]) for col in range(table.n_cols)]
    count = 1
    for rows in marked:
        if rows.size:
            count *= int(rows.size)
    if count > cap:
        raise EnumerationCapError(
            f"table contains {count} constituent functions, above the cap of {cap}",
            count=count,
        )
    cols = [c for c, rows in enumerate(marked) if rows.size]
    choices = [[int(r) for r in marked[c]] for c in cols]
    out = []
    for combo in itertools.product(*choices):
        out.append(CueFunction._wrap(table.n_cols, dict(zip(cols, combo))))
    return out
