"""Command line: build glyph memories, query them, sweep training size."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .codec import (
    QuantizerConfig,
    decode,
    encode,
    load_corpus,
    load_pgm,
    save_pgm,
    write_corpus,
)
from .memory import (
    AssociativeMemory,
    RetrievalUndefinedError,
    load_bundle,
    save_bundle,
)
from .productivity import TauProfile, tau as tau_value
from .relation import entropy as table_entropy
from .sweep import (
    DEFAULT_STEPS,
    run_sweep,
    score_recognition,
    sweep_csv,
)
from .synth import generate_corpus


def _parse_grid(text: str) -> tuple[int, int]:
    """Parse a RxC grid spec such as '8x8' into (rows, cols)."""
    parts = text.lower().split("x")
    try:
        rows, cols = (int(p) for p in parts)
    except ValueError:
        raise click.ClickException(f"bad grid {text!r}; expected RxC, e.g. 8x8")
    return rows, cols


def _parse_int_list(text: str, option: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise click.ClickException(f"bad {option} {text!r}; expected comma-separated integers")


def _quantizer(grid: str, levels: int) -> QuantizerConfig:
    rows, cols = _parse_grid(grid)
    try:
        return QuantizerConfig(grid_cols=cols, grid_rows=rows, levels=levels)
    except ValueError as exc:
        raise click.ClickException(str(exc))


def _quantizer_metadata(cfg: QuantizerConfig) -> dict:
    return {
        "quantizer": {
            "grid_rows": cfg.grid_rows,
            "grid_cols": cfg.grid_cols,
            "levels": cfg.levels,
        }
    }


def _load_bundle(path: str) -> tuple[AssociativeMemory, QuantizerConfig | None]:
    try:
        memory, metadata = load_bundle(path)
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot load bundle {path}: {exc}")
    cfg = None
    if metadata and "quantizer" in metadata:
        q = metadata["quantizer"]
        try:
            cfg = QuantizerConfig(
                grid_cols=int(q["grid_cols"]),
                grid_rows=int(q["grid_rows"]),
                levels=int(q["levels"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise click.ClickException(f"bundle {path} has a bad quantizer record: {exc}")
        if cfg.n_cols != memory.n_cols or cfg.levels != memory.n_rows:
            raise click.ClickException(
                f"bundle {path}: quantizer {cfg.grid_rows}x{cfg.grid_cols}@{cfg.levels} "
                f"does not match register shape {memory.n_cols}x{memory.n_rows}"
            )
    return memory, cfg


def _bundle_quantizer(
    memory: AssociativeMemory,
    stored: QuantizerConfig | None,
    grid: str | None,
    levels: int | None,
    path: str,
) -> QuantizerConfig:
    if grid is not None or levels is not None:
        if grid is None or levels is None:
            raise click.ClickException("--grid and --levels must be given together")
        cfg = _quantizer(grid, levels)
        if cfg.n_cols != memory.n_cols or cfg.levels != memory.n_rows:
            raise click.ClickException(
                f"--grid/--levels describe {cfg.n_cols}x{cfg.levels} features, bundle "
                f"registers are {memory.n_cols}x{memory.n_rows}"
            )
        return cfg
    if stored is None:
        raise click.ClickException(
            f"bundle {path} carries no quantizer; pass --grid and --levels"
        )
    return stored


def _load_corpus(path: str) -> list:
    try:
        return load_corpus(path)
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot load corpus {path}: {exc}")


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


@click.group()
def main():
    """Table-computing associative memory toolkit."""


@main.command()
@click.option("--out", required=True, help="Corpus file to write (GLY1).")
@click.option("--instances-per-class", default=220, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--size", default=16, show_default=True, type=int, help="Raster width and height.")
def gen(out: str, instances_per_class: int, seed: int, size: int):
    """Generate a synthetic ten-class glyph corpus."""
    try:
        records = generate_corpus(
            instances_per_class, rng_seed=seed, width=size, height=size
        )
        write_corpus(records, out)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {len(records)} glyphs ({instances_per_class} per class) to {out}")


@main.command()
@click.argument("corpus")
@click.option("--grid", default="8x8", show_default=True, help="Feature grid, RxC.")
@click.option("--levels", default=16, show_default=True, type=int)
@click.option("--labels", default=None, help="Comma-separated label set; corpus labels outside it are an error.")
@click.option("--out", required=True, help="Bundle file to write.")
def build(corpus: str, grid: str, levels: int, labels: str | None, out: str):
    """Encode a corpus and register every glyph under its label."""
    cfg = _quantizer(grid, levels)
    records = _load_corpus(corpus)
    if labels is None:
        label_set = sorted({label for label, _ in records})
    else:
        label_set = [p for p in labels.split(",") if p]
    if not label_set:
        raise click.ClickException("no labels: corpus is empty and --labels not given")
    memory = AssociativeMemory(label_set, cfg.n_cols, cfg.levels)
    try:
        for label, image in records:
            memory.register(label, encode(image, cfg))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    save_bundle(memory, out, metadata=_quantizer_metadata(cfg))
    click.echo(
        f"registered {len(records)} glyphs into {len(label_set)} registers "
        f"({memory.n_cols}x{memory.n_rows}) -> {out}"
    )


@main.command()
@click.argument("bundle")
@click.argument("corpus")
@click.option("--grid", default=None, help="Feature grid override (RxC) for bundles without a stored quantizer.")
@click.option("--levels", default=None, type=int)
@click.option("--out", default=None, help="Write the report here instead of stdout.")
def recognize(bundle: str, corpus: str, grid: str | None, levels: int | None, out: str | None):
    """Recognize every corpus glyph; emit per-item verdicts and class metrics.

    The report has two CSV sections separated by a blank line: per-item
    rows, then per-class precision/recall with a final "overall" row.
    """
    memory, stored = _load_bundle(bundle)
    cfg = _bundle_quantizer(memory, stored, grid, levels, bundle)
    records = _load_corpus(corpus)
    encoded = [(label, encode(image, cfg)) for label, image in records]
    score = score_recognition(memory, encoded)

    labels = list(memory.labels)
    for label in score.per_label_recall:
        if label not in labels:
            labels.append(label)

    lines = ["index,label,selected,correct," + ",".join(f"verdict_{l}" for l in memory.labels)]
    for item in score.items:
        fields = [
            str(item.index),
            item.label,
            item.selected if item.selected is not None else "",
            "1" if item.correct else "0",
        ]
        fields += ["1" if item.verdicts[l] else "0" for l in memory.labels]
        lines.append(",".join(fields))
    lines.append("")
    lines.append("label,items,selected,correct,precision,recall")
    for label in labels:
        truly = sum(1 for item in score.items if item.label == label)
        selected = sum(1 for item in score.items if item.selected == label)
        correct = sum(1 for item in score.items if item.correct and item.label == label)
        precision = score.per_label_precision.get(label)
        lines.append(
            f"{label},{truly},{selected},{correct},"
            f"{'' if precision is None else format(precision, '.6f')},"
            f"{score.per_label_recall.get(label, 0.0):.6f}"
        )
    total_selected = sum(1 for item in score.items if item.selected is not None)
    total_correct = sum(1 for item in score.items if item.correct)
    lines.append(
        f"overall,{len(score.items)},{total_selected},{total_correct},"
        f"{score.precision:.6f},{score.recall:.6f}"
    )
    _write_text("\n".join(lines) + "\n", out)


@main.command()
@click.argument("bundle")
@click.argument("image")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--sigma", default=1.0, show_default=True, type=float)
@click.option("--out", required=True, help="Output PGM for the decoded retrieval.")
@click.option("--grid", default=None, help="Feature grid override (RxC).")
@click.option("--levels", default=None, type=int)
def retrieve(
    bundle: str,
    image: str,
    seed: int,
    sigma: float,
    out: str,
    grid: str | None,
    levels: int | None,
):
    """Use a glyph as a cue; decode what the memory gives back.

    Exits with status 2 and "retrieval undefined" when no register
    accepts the cue.
    """
    memory, stored = _load_bundle(bundle)
    cfg = _bundle_quantizer(memory, stored, grid, levels, bundle)
    path = Path(image)
    try:
        if path.suffix.lower() == ".pgm":
            img = load_pgm(path)
        else:
            records = load_corpus(path)
            if not records:
                raise click.ClickException(f"{image}: corpus holds no glyphs")
            img = records[0][1]
        cue = encode(img, cfg)
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot read cue image {image}: {exc}")
    try:
        label, retrieved = memory.retrieve(cue, seed, sigma)
    except RetrievalUndefinedError:
        click.echo("retrieval undefined", err=True)
        sys.exit(2)
    height, width = img.shape
    save_pgm(decode(retrieved, cfg, width, height), out)
    click.echo(f"retrieved {label!r} -> {out}")


@main.command()
@click.argument("corpus")
@click.option("--grid", default="8x8", show_default=True, help="Feature grid, RxC.")
@click.option("--levels", default=16, show_default=True, type=int)
@click.option("--steps", default=",".join(str(s) for s in DEFAULT_STEPS), show_default=True,
              help="Comma-separated instances-per-class steps.")
@click.option("--seeds", default="0,1,2,3,4", show_default=True,
              help="Comma-separated retrieval seeds.")
@click.option("--sigma", default=1.0, show_default=True, type=float)
@click.option("--out", default=None, help="Write the CSV here instead of stdout.")
def sweep(corpus: str, grid: str, levels: int, steps: str, seeds: str, sigma: float, out: str | None):
    """Sweep training size and emit one CSV row per step."""
    cfg = _quantizer(grid, levels)
    records = _load_corpus(corpus)
    try:
        labels, rows = run_sweep(
            records,
            cfg,
            steps=_parse_int_list(steps, "--steps"),
            seeds=_parse_int_list(seeds, "--seeds"),
            sigma=sigma,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    _write_text(sweep_csv(labels, rows), out)


@main.command()
@click.argument("bundle")
@click.option("--out", default=None, help="Write the CSV here instead of stdout.")
def entropy(bundle: str, out: str | None):
    """Per-register entropy of a bundle, as CSV."""
    memory, _ = _load_bundle(bundle)
    lines = ["label,entropy"]
    for label, table in memory.items():
        lines.append(f"{label},{table_entropy(table):.6f}")
    _write_text("\n".join(lines) + "\n", out)


@main.command()
@click.argument("peak", type=float)
@click.argument("optimal", type=float)
@click.argument("width", type=float)
@click.argument("entropies", type=float, nargs=-1, required=True)
def tau(peak: float, optimal: float, width: float, entropies: tuple[float, ...]):
    """Evaluate the productivity profile at the given entropies."""
    try:
        profile = TauProfile(peak=peak, optimal_entropy=optimal, width=width)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    for s in entropies:
        click.echo(repr(tau_value(profile, s)))


if __name__ == "__main__":
    main()
