"""Command-line front end.

Every subcommand computes all of its outputs in memory first and only then
writes them, so a failing run leaves no partial files behind.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as sio
from .flooding import fill_pits, hq_watershed
from .graph_core import IterationOverflow, steepest_watershed_graph
from .grid import GridImage, get_connectivity
from .grid_watershed import watershed
from .plateau import geodesic_plateau_distance
from .render import mosaic, overlay, render_arrows, render_labels
from .synthetic import dem_with_pits, double_spiral
from .trajectory import parse_seed_spec, trace_downstream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_FORMAT = 4
EXIT_CONNECTIVITY = 5
EXIT_DATA = 6
EXIT_INTERNAL = 7

SUBCOMMANDS = ("watershed", "flood", "fillpits", "trace", "graph-watershed", "synth")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    subcommand: str
    input: str = ""
    output: str = ""
    connectivity: str = "square4"
    plateau_preprocess: bool = False
    arrows: str | None = None
    arrows_ppm: str | None = None
    labels_ppm: str | None = None
    mosaic: str | None = None
    overlay: str | None = None
    image: str | None = None
    seeds: str | None = None
    seeds_file: str | None = None
    synth_kind: str = "spiral"
    size: int = 0
    seed: int = 0
    outputs: dict = field(default_factory=dict)


def _connectivity(name: str):
    try:
        return get_connectivity(name)
    except ValueError:
        raise CliError(EXIT_CONNECTIVITY, f"unknown connectivity {name!r}") from None


def _read(reader, path: str):
    try:
        return reader(path)
    except sio.FormatError as exc:
        raise CliError(EXIT_FORMAT, f"{path}: {exc}") from None
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"{path}: {exc.strerror or exc}") from None


def _label_pgm(labels: np.ndarray) -> bytes:
    if labels.max(initial=0) > 65535:
        raise CliError(EXIT_DATA, "more than 65535 labels do not fit a 16-bit PGM")
    return sio.encode_pgm(labels.astype(np.uint16), 65535)


def _surface(cfg: RunConfig, image: np.ndarray) -> GridImage:
    grid = GridImage(image, _connectivity(cfg.connectivity))
    if cfg.plateau_preprocess:
        grid = geodesic_plateau_distance(grid)
    return grid


def _cmd_watershed(cfg: RunConfig) -> dict:
    conn = _connectivity(cfg.connectivity)
    image = _read(sio.read_pgm, cfg.input)
    result = watershed(_surface(cfg, image), conn)
    out = {cfg.output: _label_pgm(result.labels)}
    if cfg.arrows:
        out[cfg.arrows] = sio.encode_arrows_file(result.arrows)
    if cfg.arrows_ppm:
        out[cfg.arrows_ppm] = sio.encode_ppm(render_arrows(result.arrows.masks))
    if cfg.labels_ppm:
        out[cfg.labels_ppm] = sio.encode_ppm(render_labels(result.labels))
    if cfg.mosaic:
        out[cfg.mosaic] = sio.encode_pgm(mosaic(image, result.labels))
    return out


def _seed_raster(cfg: RunConfig, shape) -> np.ndarray | None:
    if cfg.seeds_file:
        path = cfg.seeds_file
        if Path(path).suffix.lower() == ".pgm":
            seeds = _read(sio.read_pgm, path).astype(np.int64)
            if seeds.shape != shape:
                raise CliError(EXIT_DATA, f"{path}: seed raster shape {seeds.shape} differs from {shape}")
            return seeds
        seed_set = _read(sio.read_seed_csv, path)
    elif cfg.seeds:
        try:
            seed_set = parse_seed_spec(cfg.seeds)
        except ValueError as exc:
            raise CliError(EXIT_DATA, str(exc)) from None
    else:
        return None
    try:
        return seed_set.to_labels(shape)
    except ValueError as exc:
        raise CliError(EXIT_DATA, str(exc)) from None


def _cmd_flood(cfg: RunConfig) -> dict:
    conn = _connectivity(cfg.connectivity)
    image = _read(sio.read_pgm, cfg.input)
    seeds = _seed_raster(cfg, image.shape)
    try:
        labels = hq_watershed(GridImage(image, conn), seeds)
    except ValueError as exc:
        raise CliError(EXIT_DATA, str(exc)) from None
    return {cfg.output: _label_pgm(labels)}


def _cmd_fillpits(cfg: RunConfig) -> dict:
    conn = _connectivity(cfg.connectivity)
    image = _read(sio.read_pgm, cfg.input)
    filled = fill_pits(GridImage(image, conn)).values
    return {cfg.output: sio.encode_pgm(filled.astype(image.dtype))}


def _cmd_trace(cfg: RunConfig) -> dict:
    background = None
    if Path(cfg.input).suffix.lower() == ".arwf":
        arrows = _read(sio.read_arrows, cfg.input)
    else:
        background = _read(sio.read_pgm, cfg.input)
        arrows = watershed(_surface(cfg, background)).arrows
    if cfg.image:
        background = _read(sio.read_pgm, cfg.image)
    seeds = _seed_raster(cfg, arrows.masks.shape)
    if seeds is None:
        raise CliError(EXIT_USAGE, "trace needs --seeds or --seeds-file")
    entries = [((int(r), int(c)), int(seeds[r, c])) for r, c in zip(*np.nonzero(seeds))]
    labels = trace_downstream(arrows, entries)
    out = {cfg.output: _label_pgm(labels)}
    if cfg.overlay:
        if background is None:
            raise CliError(EXIT_USAGE, "--overlay needs a gray image (--image) when tracing an .arwf file")
        if background.shape != labels.shape:
            raise CliError(EXIT_DATA, "overlay image and arrow field differ in shape")
        out[cfg.overlay] = sio.encode_ppm(overlay(background, labels))
    return out


def _cmd_graph(cfg: RunConfig) -> dict:
    graph = _read(sio.read_graph, cfg.input)
    result = steepest_watershed_graph(graph)
    return {cfg.output: sio.format_graph_labels(result.labels).encode()}


def _cmd_synth(cfg: RunConfig) -> dict:
    if cfg.synth_kind == "spiral":
        image = double_spiral(cfg.size or 96).image
    elif cfg.synth_kind == "dem":
        image, _ = dem_with_pits(cfg.size or 64, seed=cfg.seed)
    else:
        raise CliError(EXIT_USAGE, f"unknown synthetic kind {cfg.synth_kind!r}")
    return {cfg.output: sio.encode_pgm(image)}


_COMMANDS = {
    "watershed": _cmd_watershed,
    "flood": _cmd_flood,
    "fillpits": _cmd_fillpits,
    "trace": _cmd_trace,
    "graph-watershed": _cmd_graph,
    "synth": _cmd_synth,
}


def _write_all(outputs: dict) -> None:
    staged = []
    try:
        for path, data in outputs.items():
            target = Path(path)
            fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            staged.append((tmp, target))
    except OSError:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, target in staged:
        os.replace(tmp, target)


def run(cfg: RunConfig) -> int:
    """Execute one pipeline; returns the process exit status."""
    if cfg.subcommand not in _COMMANDS:
        print(f"steepwater: unknown subcommand {cfg.subcommand!r}", file=sys.stderr)
        return EXIT_USAGE
    if not cfg.output or (cfg.subcommand != "synth" and not cfg.input):
        print("steepwater: input and output paths must be nonempty", file=sys.stderr)
        return EXIT_USAGE
    try:
        outputs = _COMMANDS[cfg.subcommand](cfg)
        _write_all(outputs)
    except CliError as exc:
        print(f"steepwater: {exc}", file=sys.stderr)
        return exc.code
    except IterationOverflow as exc:
        print(f"steepwater: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"steepwater: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"steepwater: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"steepwater: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    cfg.outputs = {k: len(v) for k, v in outputs.items()}
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steepwater", description="Steepest watershed segmentation.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seeds=False):
        p.add_argument("input")
        p.add_argument("-o", "--output", required=True)
        p.add_argument("--connectivity", default="square4", help="square4, square8 or hex6")
        if seeds:
            p.add_argument("--seeds", help="x,y,label;x,y,label")
            p.add_argument("--seeds-file", help="label PGM or CSV of x,y,label")

    p = sub.add_parser("watershed", help="steepest watershed of a PGM image")
    common(p)
    p.add_argument("--plateau-distance", action="store_true", help="grade plateaus before the watershed")
    p.add_argument("--arrows", help="write the final arrow field (.arwf)")
    p.add_argument("--arrows-ppm", help="false-colour arrow rendering")
    p.add_argument("--labels-ppm", help="false-colour basin rendering")
    p.add_argument("--mosaic", help="mean-gray mosaic PGM")

    p = sub.add_parser("flood", help="hierarchical-queue flooding watershed")
    common(p, seeds=True)

    p = sub.add_parser("fillpits", help="fill every pit not touching the border")
    common(p)

    p = sub.add_parser("trace", help="follow steepest arrows downstream from seeds")
    common(p, seeds=True)
    p.add_argument("--plateau-distance", action="store_true")
    p.add_argument("--overlay", help="trajectories over the gray image (.ppm)")
    p.add_argument("--image", help="gray image for the overlay when tracing an .arwf")

    p = sub.add_parser("graph-watershed", help="steepest watershed of a graph text file")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("synth", help="write a synthetic test image")
    p.add_argument("kind", choices=("spiral", "dem"))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--size", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    get = lambda name, default=None: getattr(ns, name, default)  # noqa: E731
    return RunConfig(
        subcommand=ns.subcommand,
        input=get("input", ""),
        output=ns.output,
        connectivity=get("connectivity", "square4"),
        plateau_preprocess=bool(get("plateau_distance", False)),
        arrows=get("arrows"),
        arrows_ppm=get("arrows_ppm"),
        labels_ppm=get("labels_ppm"),
        mosaic=get("mosaic"),
        overlay=get("overlay"),
        image=get("image"),
        seeds=get("seeds"),
        seeds_file=get("seeds_file"),
        synth_kind=get("kind", "spiral"),
        size=get("size", 0),
        seed=get("seed", 0),
    )


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
