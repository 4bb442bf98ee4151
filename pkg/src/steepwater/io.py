"""File formats: PGM/PPM rasters, ARWF arrow fields, graph text, seed lists.

See FORMAT.md at the repository root for byte-level descriptions.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .graph_core import WeightedGraph
from .grid import ArrowField, get_connectivity, in_bounds_mask
from .trajectory import SeedSet

__all__ = [
    "FormatError",
    "read_pgm",
    "write_pgm",
    "encode_pgm",
    "read_ppm",
    "encode_ppm",
    "write_ppm",
    "read_arrows",
    "encode_arrows_file",
    "write_arrows",
    "read_graph",
    "parse_graph",
    "format_graph",
    "format_graph_labels",
    "parse_graph_labels",
    "read_seed_csv",
]

ARWF_MAGIC = b"ARWF"
ARWF_HEADER = struct.Struct("<4sIII")


class FormatError(ValueError):
    """Malformed file contents."""


def _tokens(data: bytes, count: int, offset: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    out = []
    i = offset
    n = len(data)
    while len(out) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
            i += 1
        if start == i:
            raise FormatError("truncated header")
        out.append(data[start:i])
    # exactly one whitespace byte separates the header from the raster
    if i >= n or not data[i:i + 1].isspace():
        raise FormatError("missing whitespace after header")
    return out, i + 1


def _parse_netpbm(data: bytes, magic: bytes, channels: int) -> np.ndarray:
    if data[:2] != magic:
        raise FormatError(f"bad magic {data[:2]!r}, expected {magic!r}")
    tokens, pos = _tokens(data, 3, 2)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise FormatError("non-numeric header field") from None
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise FormatError(f"invalid header values {width} {height} {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    size = width * height * channels * dtype.itemsize
    body = data[pos:pos + size]
    if len(body) != size:
        raise FormatError(f"raster truncated: {len(body)} of {size} bytes")
    arr = np.frombuffer(body, dtype=dtype).astype(np.uint16 if maxval > 255 else np.uint8)
    if (arr > maxval).any():
        raise FormatError("sample exceeds maxval")
    shape = (height, width, channels) if channels > 1 else (height, width)
    return arr.reshape(shape)


def read_pgm(path) -> np.ndarray:
    """Binary (P5) PGM as ``uint8`` (maxval <= 255) or ``uint16``."""
    return _parse_netpbm(Path(path).read_bytes(), b"P5", 1)


def encode_pgm(image: np.ndarray, maxval: int | None = None) -> bytes:
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("PGM needs a 2-D array")
    if image.size and (image.min() < 0 or image.max() > 65535):
        raise ValueError("PGM samples must lie in 0..65535")
    if maxval is None:
        maxval = 255 if image.dtype == np.uint8 else 65535
    if image.size and image.max() > maxval:
        raise ValueError(f"sample {image.max()} exceeds maxval {maxval}")
    dtype = ">u2" if maxval > 255 else "u1"
    h, w = image.shape
    return b"P5\n%d %d\n%d\n" % (w, h, maxval) + image.astype(dtype).tobytes()


def write_pgm(path, image: np.ndarray, maxval: int | None = None) -> None:
    Path(path).write_bytes(encode_pgm(image, maxval))


def read_ppm(path) -> np.ndarray:
    return _parse_netpbm(Path(path).read_bytes(), b"P6", 3)


def encode_ppm(rgb: np.ndarray) -> bytes:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("PPM needs an (H, W, 3) array")
    h, w, _ = rgb.shape
    return b"P6\n%d %d\n255\n" % (w, h) + rgb.astype(np.uint8).tobytes()


def write_ppm(path, rgb: np.ndarray) -> None:
    Path(path).write_bytes(encode_ppm(rgb))


def encode_arrows_file(arrows: ArrowField) -> bytes:
    h, w = arrows.masks.shape
    header = ARWF_HEADER.pack(ARWF_MAGIC, w, h, arrows.connectivity.ident)
    return header + np.ascontiguousarray(arrows.masks, dtype=np.uint8).tobytes()


def write_arrows(path, arrows: ArrowField) -> None:
    Path(path).write_bytes(encode_arrows_file(arrows))


def read_arrows(path) -> ArrowField:
    data = Path(path).read_bytes()
    if len(data) < ARWF_HEADER.size:
        raise FormatError("arrow file shorter than its header")
    magic, w, h, ident = ARWF_HEADER.unpack_from(data)
    if magic != ARWF_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {ARWF_MAGIC!r}")
    try:
        conn = get_connectivity(int(ident))
    except ValueError:
        raise FormatError(f"unknown connectivity id {ident}") from None
    body = data[ARWF_HEADER.size:]
    if len(body) != w * h:
        raise FormatError(f"arrow raster has {len(body)} bytes, expected {w * h}")
    masks = np.frombuffer(body, dtype=np.uint8).reshape(h, w).copy()
    if (masks >> conn.size).any():
        raise FormatError("arrow mask uses bits beyond the connectivity")
    if (masks & ~in_bounds_mask((h, w), conn)).any():
        raise FormatError("arrow points outside the image")
    return ArrowField(masks, conn)


def _number(token: str):
    try:
        return int(token)
    except ValueError:
        return float(token)


def parse_graph(text: str) -> WeightedGraph:
    """Parse ``nodes N edges E``, then N weights, then E ``i j`` lines."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise FormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "nodes" or head[2] != "edges":
        raise FormatError(f"bad graph header {lines[0]!r}")
    try:
        n, e = int(head[1]), int(head[3])
        if len(lines) != 1 + n + e:
            raise FormatError(f"expected {n} weights and {e} edges, found {len(lines) - 1} lines")
        weights = [_number(ln) for ln in lines[1:1 + n]]
        edges = []
        for ln in lines[1 + n:]:
            parts = ln.split()
            if len(parts) != 2:
                raise FormatError(f"bad edge line {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from None
    try:
        return WeightedGraph.from_edges(weights, edges)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_graph(path) -> WeightedGraph:
    return parse_graph(Path(path).read_text())


def format_graph(graph: WeightedGraph) -> str:
    edges = sorted(graph.edges)
    lines = [f"nodes {graph.node_count} edges {len(edges)}"]
    lines += [str(w) for w in graph.weights]
    lines += [f"{i} {j}" for i, j in edges]
    return "\n".join(lines) + "\n"


def format_graph_labels(labels) -> str:
    return "".join(f"{i} {int(lab)}\n" for i, lab in enumerate(labels))


def parse_graph_labels(text: str) -> list[int]:
    out = []
    for k, ln in enumerate(text.splitlines()):
        i, lab = ln.split()
        if int(i) != k:
            raise FormatError(f"label line {k} names node {i}")
        out.append(int(lab))
    return out


def read_seed_csv(path) -> SeedSet:
    """Seeds as ``x,y,label`` lines; blank lines, ``#`` comments and a header are skipped."""
    entries = []
    for ln in Path(path).read_text().splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != 3:
            raise FormatError(f"bad seed line {ln!r}")
        try:
            x, y, label = (int(p) for p in parts)
        except ValueError:
            if not entries and parts[0].lower() == "x":
                continue
            raise FormatError(f"bad seed line {ln!r}") from None
        entries.append(((y, x), label))
    return SeedSet(entries)
