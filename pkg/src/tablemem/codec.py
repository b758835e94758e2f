"""Deterministic glyph quantizer and corpus I/O.

Maps small grayscale images (numpy ``uint8`` arrays, shape ``(height,
width)``) into cue functions over a feature grid and back.  Each grid
cell averages its pixels and quantizes the mean into one of ``levels``
intensity buckets; decoding paints every cell with its bucket's midpoint
intensity.  Both directions are pure, stateless transforms.

Corpus format ("GLY1"): a text header ``GLY1 <width> <height> <count>``
followed, per record, by one label line and ``height`` lines of
``width`` space-separated integers in 0..255.  Plain portable graymaps
(PGM) are also read, one glyph per file, with the label taken from the
enclosing directory name.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .relation import CueFunction

__all__ = [
    "QuantizerConfig",
    "CorpusFormatError",
    "encode",
    "decode",
    "load_corpus",
    "write_corpus",
    "load_pgm",
    "save_pgm",
]


class CorpusFormatError(ValueError):
    """A corpus or image file is malformed."""


@dataclass(frozen=True)
class QuantizerConfig:
    """Feature-grid shape and intensity resolution of the quantizer.

    ``grid_rows x grid_cols`` cells become ``n_cols`` features; ``levels``
    is the number of intensity buckets and equals the row count of the
    tables the features feed.  Levels beyond 128 would put some bucket
    midpoints outside their own bucket (bucket width < 2 intensity units),
    breaking the encode/decode fixpoint, so they are rejected.
    """

    grid_cols: int = 8
    grid_rows: int = 8
    levels: int = 16

    def __post_init__(self):
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise ValueError(
                f"grid must be at least 1x1, got {self.grid_rows}x{self.grid_cols}"
            )
        if not 2 <= self.levels <= 128:
            raise ValueError(f"levels must be in 2..128, got {self.levels}")

    @property
    def n_cols(self) -> int:
        return self.grid_cols * self.grid_rows

    @property
    def n_rows(self) -> int:
        return self.levels


def _band_edges(size: int, bands: int) -> list[int]:
    # Even bands of floor(size/bands); the last band absorbs the remainder.
    width = size // bands
    return [i * width for i in range(bands)] + [size]


def _check_image(image) -> np.ndarray:
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError(f"image must be a 2-D grayscale array, got shape {img.shape}")
    if img.size == 0:
        raise ValueError("empty image")
    if img.dtype != np.uint8:
        if not ((img >= 0) & (img <= 255)).all():
            raise ValueError("image intensities must lie in 0..255")
    return img


def encode(image, cfg: QuantizerConfig) -> CueFunction:
    """Quantize a glyph into a total cue over the feature grid.

    Feature ``grid_row * grid_cols + grid_col`` takes the level
    ``floor(mean * levels / 256)`` of its cell's mean intensity, clamped
    to ``levels - 1``.  Equal images always produce equal cues, and
    raising every pixel can never lower any feature's level.
    """
    img = _check_image(image)
    height, width = img.shape
    if height < cfg.grid_rows or width < cfg.grid_cols:
        raise ValueError(
            f"image {height}x{width} is smaller than the {cfg.grid_rows}x{cfg.grid_cols} grid"
        )
    row_edges = _band_edges(height, cfg.grid_rows)
    col_edges = _band_edges(width, cfg.grid_cols)
    assignment: dict[int, int] = {}
    for gr in range(cfg.grid_rows):
        for gc in range(cfg.grid_cols):
            block = img[row_edges[gr]:row_edges[gr + 1], col_edges[gc]:col_edges[gc + 1]]
            mean = float(block.mean(dtype=np.float64))
            level = min(int(mean * cfg.levels / 256.0), cfg.levels - 1)
            assignment[gr * cfg.grid_cols + gc] = level
    return CueFunction._wrap(cfg.n_cols, assignment)


def _level_midpoint(level: int, levels: int) -> int:
    # Midpoint intensity of a bucket, rounding halves down so the result
    # re-encodes to the same level.
    value = int(np.ceil((level + 0.5) * 256.0 / levels - 1.0))
    return min(255, max(0, value))


def decode(cue: CueFunction, cfg: QuantizerConfig, out_width: int, out_height: int) -> np.ndarray:
    """Paint a total cue back into a glyph of the requested size.

    Every grid cell is filled with its level's midpoint intensity;
    re-encoding the result reproduces the cue exactly.
    """
    if cue.n_cols != cfg.n_cols:
        raise ValueError(
            f"cue has {cue.n_cols} columns, quantizer expects {cfg.n_cols}"
        )
    undefined = [col for col in range(cfg.n_cols) if col not in cue]
    if undefined:
        raise ValueError(f"decode needs a total function; undefined columns: {undefined}")
    if out_height < cfg.grid_rows or out_width < cfg.grid_cols:
        raise ValueError(
            f"output {out_height}x{out_width} is smaller than the "
            f"{cfg.grid_rows}x{cfg.grid_cols} grid"
        )
    row_edges = _band_edges(out_height, cfg.grid_rows)
    col_edges = _band_edges(out_width, cfg.grid_cols)
    img = np.zeros((out_height, out_width), dtype=np.uint8)
    for gr in range(cfg.grid_rows):
        for gc in range(cfg.grid_cols):
            level = cue[gr * cfg.grid_cols + gc]
            if level >= cfg.levels:
                raise ValueError(
                    f"cue level {level} at column {gr * cfg.grid_cols + gc} "
                    f"exceeds {cfg.levels - 1}"
                )
            img[row_edges[gr]:row_edges[gr + 1], col_edges[gc]:col_edges[gc + 1]] = (
                _level_midpoint(level, cfg.levels)
            )
    return img


# -- GLY1 corpus files -------------------------------------------------------


def write_corpus(records: list[tuple[str, np.ndarray]], path) -> None:
    """Write labeled glyphs as a GLY1 text corpus (all images one size)."""
    path = Path(path)
    if not records:
        path.write_text("")
        return
    height, width = np.asarray(records[0][1]).shape
    lines = [f"GLY1 {width} {height} {len(records)}"]
    for label, image in records:
        img = _check_image(image)
        if img.shape != (height, width):
            raise ValueError(
                f"all corpus images must share one size; got {img.shape} after {(height, width)}"
            )
        lines.append(str(label))
        for row in img:
            lines.append(" ".join(str(int(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _parse_gly1(text: str, source: str) -> list[tuple[str, np.ndarray]]:
    lines = text.splitlines()
    position = 0

    def next_line(context: str) -> str:
        nonlocal position
        while position < len(lines):
            line = lines[position]
            position += 1
            if line.strip():
                return line
        raise CorpusFormatError(f"{source}: unexpected end of file while reading {context}")

    header = next_line("header").split()
    if len(header) != 4 or header[0] != "GLY1":
        raise CorpusFormatError(f"{source}: bad header {' '.join(header)!r}")
    try:
        width, height, count = int(header[1]), int(header[2]), int(header[3])
    except ValueError as exc:
        raise CorpusFormatError(f"{source}: non-integer header field: {exc}") from exc
    if width < 1 or height < 1 or count < 0:
        raise CorpusFormatError(f"{source}: bad header values {width}x{height}, count {count}")

    records: list[tuple[str, np.ndarray]] = []
    for index in range(count):
        label = next_line(f"record {index} label").strip()
        pixels = np.zeros((height, width), dtype=np.uint8)
        for r in range(height):
            parts = next_line(f"record {index} row {r}").split()
            if len(parts) != width:
                raise CorpusFormatError(
                    f"{source}: record {index} ({label!r}) row {r} has "
                    f"{len(parts)} values, expected {width}"
                )
            try:
                values = [int(p) for p in parts]
            except ValueError as exc:
                raise CorpusFormatError(
                    f"{source}: record {index} ({label!r}) row {r}: {exc}"
                ) from exc
            if any(v < 0 or v > 255 for v in values):
                raise CorpusFormatError(
                    f"{source}: record {index} ({label!r}) row {r} has values outside 0..255"
                )
            pixels[r] = values
        records.append((label, pixels))

    while position < len(lines):
        if lines[position].strip():
            raise CorpusFormatError(
                f"{source}: trailing content after record {count - 1} at line {position + 1}"
            )
        position += 1
    return records


def load_corpus(path) -> list[tuple[str, np.ndarray]]:
    """Load labeled glyphs from a GLY1 file or a directory of PGM files.

    GLY1 records come back in file order; an empty file yields an empty
    sequence.  For a directory, ``*.pgm`` files are gathered recursively
    in sorted path order and labeled by their parent directory's name.
    """
    path = Path(path)
    if path.is_dir():
        records = []
        for pgm in sorted(path.rglob("*.pgm")):
            records.append((pgm.parent.name, load_pgm(pgm)))
        return records
    text = path.read_text()
    if not text.strip():
        return []
    return _parse_gly1(text, source=path.name)


# -- portable graymaps -------------------------------------------------------


def load_pgm(path) -> np.ndarray:
    """Read a PGM image (plain P2 or raw P5, maxval <= 255)."""
    path = Path(path)
    data = path.read_bytes()

    tokens: list[bytes] = []
    pos = 0
    while pos < len(data) and len(tokens) < 4:
        chunk = data[pos:pos + 1]
        if chunk == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol < 0 else eol + 1
        elif chunk.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace() and data[end:end + 1] != b"#":
                end += 1
            tokens.append(data[pos:end])
            pos = end
    if len(tokens) < 4:
        raise CorpusFormatError(f"{path.name}: truncated PGM header")
    magic = tokens[0]
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise CorpusFormatError(f"{path.name}: non-integer PGM header field: {exc}") from exc
    if width < 1 or height < 1 or not 0 < maxval <= 255:
        raise CorpusFormatError(
            f"{path.name}: unsupported PGM geometry {width}x{height} maxval {maxval}"
        )

    if magic == b"P2":
        parts = data[pos:].split()
        if len(parts) != width * height:
            raise CorpusFormatError(
                f"{path.name}: expected {width * height} samples, found {len(parts)}"
            )
        try:
            flat = np.array([int(p) for p in parts], dtype=np.int64)
        except ValueError as exc:
            raise CorpusFormatError(f"{path.name}: non-integer sample: {exc}") from exc
    elif magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        raw = data[pos:pos + width * height]
        if len(raw) != width * height:
            raise CorpusFormatError(
                f"{path.name}: expected {width * height} bytes, found {len(raw)}"
            )
        flat = np.frombuffer(raw, dtype=np.uint8).astype(np.int64)
    else:
        raise CorpusFormatError(f"{path.name}: unsupported PGM magic {magic!r}")

    if (flat < 0).any() or (flat > maxval).any():
        raise CorpusFormatError(f"{path.name}: samples exceed maxval {maxval}")
    return flat.reshape(height, width).astype(np.uint8)


def save_pgm(image, path) -> None:
    """Write a glyph as a plain (P2) PGM with maxval 255."""
    img = _check_image(image)
    height, width = img.shape
    lines = ["P2", f"{width} {height}", "255"]
    for row in img:
        lines.append(" ".join(str(int(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
