"""Raster types: connectivities, gray-tone grids, arrow fields.

Neighbour ``n`` of a pixel corresponds to bit ``n`` (weight ``2**n``) of its
arrow mask.  Offsets are ``(drow, dcol)`` with rows growing downwards.

=========  ==============================================================
square4    0 E, 1 N, 2 W, 3 S
square8    0 E, 1 NE, 2 N, 3 NW, 4 W, 5 SW, 6 S, 7 SE
hex6       0 E, 1 NE, 2 NW, 3 W, 4 SW, 5 SE   (odd rows shifted half a
           pixel to the right, so offsets depend on row parity)
=========  ==============================================================

In every connectivity the opposite of neighbour ``n`` is ``(n + K/2) % K``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph_core import WeightedGraph

__all__ = [
    "Connectivity",
    "SQUARE4",
    "SQUARE8",
    "HEX6",
    "CONNECTIVITIES",
    "get_connectivity",
    "GridImage",
    "ArrowField",
    "as_grid",
    "encode_arrows",
    "decode_arrows",
    "in_bounds_mask",
    "neighbor_index",
    "grid_to_graph",
    "masks_to_arcs",
    "arcs_to_masks",
]


@dataclass(frozen=True)
class Connectivity:
    name: str
    ident: int
    even_offsets: tuple
    odd_offsets: tuple

    @property
    def size(self) -> int:
        return len(self.even_offsets)

    @property
    def offsets(self) -> tuple:
        """Offsets for even rows (identical for every row on square grids)."""
        return self.even_offsets

    def offsets_for_row(self, row: int) -> tuple:
        return self.odd_offsets if row % 2 else self.even_offsets

    def opposite(self, n: int) -> int:
        return (n + self.size // 2) % self.size

    def bit(self, n: int) -> int:
        return 1 << n

    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """``(drow, dcol)`` arrays of shape (2, K) indexed by row parity."""
        dr = np.array([[o[0] for o in self.even_offsets], [o[0] for o in self.odd_offsets]], dtype=np.int64)
        dc = np.array([[o[1] for o in self.even_offsets], [o[1] for o in self.odd_offsets]], dtype=np.int64)
        return dr, dc


_SQ4 = ((0, 1), (-1, 0), (0, -1), (1, 0))
_SQ8 = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))

SQUARE4 = Connectivity("square4", 0, _SQ4, _SQ4)
SQUARE8 = Connectivity("square8", 1, _SQ8, _SQ8)
HEX6 = Connectivity(
    "hex6",
    2,
    ((0, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0)),
    ((0, 1), (-1, 1), (-1, 0), (0, -1), (1, 0), (1, 1)),
)
CONNECTIVITIES = {c.name: c for c in (SQUARE4, SQUARE8, HEX6)}


def get_connectivity(spec) -> Connectivity:
    """Accept a Connectivity, its name, its numeric id, or 4/6/8."""
    if isinstance(spec, Connectivity):
        return spec
    if isinstance(spec, str) and spec in CONNECTIVITIES:
        return CONNECTIVITIES[spec]
    if isinstance(spec, (int, np.integer)) and not isinstance(spec, bool):
        by_count = {4: SQUARE4, 6: HEX6, 8: SQUARE8}
        if spec in by_count:
            return by_count[int(spec)]
        for c in CONNECTIVITIES.values():
            if c.ident == spec:
                return c
    raise ValueError(f"unknown connectivity {spec!r}")


@dataclass(frozen=True, eq=False)
class GridImage:
    """A 2-D scalar raster together with its neighbourhood structure."""

    values: np.ndarray
    connectivity: Connectivity = SQUARE4

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-D raster, got shape {values.shape}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "connectivity", get_connectivity(self.connectivity))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class ArrowField:
    """Per-pixel out-arrow bitmasks sharing the grid's connectivity."""

    masks: np.ndarray
    connectivity: Connectivity = SQUARE4

    def __post_init__(self):
        object.__setattr__(self, "masks", np.asarray(self.masks, dtype=np.uint8))
        object.__setattr__(self, "connectivity", get_connectivity(self.connectivity))

    def directions(self, row: int, col: int) -> frozenset:
        return decode_arrows(int(self.masks[row, col]), self.connectivity)

    def __eq__(self, other):
        if not isinstance(other, ArrowField):
            return NotImplemented
        return self.connectivity == other.connectivity and np.array_equal(self.masks, other.masks)


def as_grid(image, connectivity=None) -> GridImage:
    if isinstance(image, GridImage):
        if connectivity is None or get_connectivity(connectivity) == image.connectivity:
            return image
        return GridImage(image.values, connectivity)
    return GridImage(image, SQUARE4 if connectivity is None else connectivity)


def encode_arrows(directions: Iterable[int], connectivity=SQUARE8) -> int:
    """Bitmask with bit ``n`` set for every neighbour index ``n`` given."""
    k = get_connectivity(connectivity).size
    mask = 0
    for n in directions:
        if not 0 <= n < k:
            raise ValueError(f"direction {n} out of range for {k} neighbours")
        mask |= 1 << n
    return mask


def decode_arrows(mask: int, connectivity=SQUARE8) -> frozenset:
    k = get_connectivity(connectivity).size
    if mask < 0 or mask >> k:
        raise ValueError(f"mask {mask} has bits beyond {k} neighbours")
    return frozenset(n for n in range(k) if mask >> n & 1)


def in_bounds_mask(shape: tuple[int, int], connectivity) -> np.ndarray:
    """Mask with every in-bounds direction set, per pixel."""
    conn = get_connectivity(connectivity)
    h, w = shape
    out = np.zeros((h, w), dtype=np.uint8)
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    for parity, offsets in ((0, conn.even_offsets), (1, conn.odd_offsets)):
        sel = (rows % 2 == parity)
        for n, (dr, dc) in enumerate(offsets):
            ok = (rows + dr >= 0) & (rows + dr < h) & (cols + dc >= 0) & (cols + dc < w) & sel
            out[ok] |= np.uint8(1 << n)
    return out


def neighbor_index(shape: tuple[int, int], connectivity, row: int, col: int, n: int) -> int | None:
    """Row-major index of neighbour ``n`` of ``(row, col)``, or None if outside."""
    conn = get_connectivity(connectivity)
    dr, dc = conn.offsets_for_row(row)[n]
    r, c = row + dr, col + dc
    if 0 <= r < shape[0] and 0 <= c < shape[1]:
        return r * shape[1] + c
    return None


def grid_to_graph(grid: GridImage) -> WeightedGraph:
    """Node-weighted graph induced by a raster; node ``r*width + c`` is pixel (r, c)."""
    h, w = grid.shape
    edges = set()
    for r in range(h):
        for c in range(w):
            i = r * w + c
            for n in range(grid.connectivity.size):
                j = neighbor_index(grid.shape, grid.connectivity, r, c, n)
                if j is not None:
                    edges.add((min(i, j), max(i, j)))
    return WeightedGraph(tuple(grid.values.ravel().tolist()), frozenset(edges))


def masks_to_arcs(arrows: ArrowField) -> tuple:
    """Per-node arc target sets (row-major node ids) from an arrow field."""
    h, w = arrows.masks.shape
    out = []
    for r in range(h):
        for c in range(w):
            m = int(arrows.masks[r, c])
            out.append(frozenset(
                neighbor_index((h, w), arrows.connectivity, r, c, n)
                for n in decode_arrows(m, arrows.connectivity)
            ))
    return tuple(out)


def arcs_to_masks(arcs, shape: tuple[int, int], connectivity) -> ArrowField:
    """Inverse of :func:`masks_to_arcs`."""
    conn = get_connectivity(connectivity)
    h, w = shape
    masks = np.zeros((h, w), dtype=np.uint8)
    for i, targets in enumerate(arcs):
        r, c = divmod(i, w)
        for n in range(conn.size):
            j = neighbor_index(shape, conn, r, c, n)
            if j is not None and j in targets:
                masks[r, c] |= 1 << n
    return ArrowField(masks, conn)
