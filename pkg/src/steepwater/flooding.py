"""Classical flooding watershed with a hierarchical queue, and DEM pit filling."""
from __future__ import annotations

import heapq
from collections import deque

import numpy as np

from .grid import GridImage, as_grid
from .grid_watershed import regional_minima

__all__ = [
    "HierarchicalQueue",
    "hq_watershed",
    "flood_under_ceiling",
    "boundary_ceiling",
    "fill_pits",
    "ceiling_infinity",
]


class HierarchicalQueue:
    """An array of FIFO queues indexed by integer priority level.

    The lowest non-empty level is served first.  The cursor never moves
    back: an element pushed below the current level is queued at the
    current level instead.
    """

    def __init__(self, levels: int):
        if levels < 1:
            raise ValueError("a hierarchical queue needs at least one level")
        self._queues = [deque() for _ in range(levels)]
        self._cursor = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    @property
    def cursor(self) -> int:
        return self._cursor

    def push(self, item, level: int) -> None:
        if not 0 <= level < len(self._queues):
            raise IndexError(f"priority level {level} out of range")
        self._queues[max(level, self._cursor)].append(item)
        self._size += 1

    def pop(self):
        """Return ``(level, item)`` from the lowest non-empty level."""
        if not self._size:
            raise IndexError("pop from an empty hierarchical queue")
        while not self._queues[self._cursor]:
            self._cursor += 1
        self._size -= 1
        return self._cursor, self._queues[self._cursor].popleft()


def hq_watershed(grid, seeds: np.ndarray | None = None, connectivity=None, *, return_order: bool = False):
    """Flood from labeled seeds in order of altitude, first in first out per level.

    Parameters
    ----------
    grid : GridImage or 2-D array
    seeds : 2-D int array, optional
        Nonzero pixels are sources carrying their label.  Defaults to the
        regional minima labels.
    return_order : bool
        Also return the order (0-based) in which every pixel was labeled;
        seeds come first, in raster order.

    Notes
    -----
    A pixel is labeled when it is pushed and never pushed twice, so the
    result on symmetric configurations depends on the FIFO order.
    """
    grid = as_grid(grid, connectivity)
    h, w = grid.shape
    conn = grid.connectivity
    if seeds is None:
        seeds = regional_minima(grid)
    labels = np.array(seeds, dtype=np.int64, copy=True)
    if labels.shape != grid.shape:
        raise ValueError("seed raster and grid differ in shape")
    if not labels.any():
        raise ValueError("no seeds: at least one pixel must carry a nonzero label")

    levels, rank = np.unique(grid.values, return_inverse=True)
    rank = rank.reshape(grid.shape)
    hq = HierarchicalQueue(len(levels))
    order = np.full(grid.shape, -1, dtype=np.int64)
    counter = 0
    for r, c in zip(*np.nonzero(labels)):
        hq.push((int(r), int(c)), int(rank[r, c]))
        order[r, c] = counter
        counter += 1

    offsets = (conn.even_offsets, conn.odd_offsets)
    lab = labels.tolist()
    rk = rank.tolist()
    while len(hq):
        _, (r, c) = hq.pop()
        here = lab[r][c]
        for dr, dc in offsets[r & 1]:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and lab[rr][cc] == 0:
                lab[rr][cc] = here
                hq.push((rr, cc), rk[rr][cc])
                order[rr, cc] = counter
                counter += 1
    out = np.array(lab, dtype=np.int64).reshape(grid.shape)
    if return_order:
        return out, order
    return out


def ceiling_infinity(dtype) -> object:
    """The value standing for +infinity in a ceiling of the given dtype."""
    dtype = np.dtype(dtype)
    if dtype.kind in "iu":
        return np.iinfo(dtype).max
    if dtype.kind == "f":
        return np.inf
    raise TypeError(f"unsupported dtype {dtype}")


def boundary_ceiling(relief) -> np.ndarray:
    """Marker equal to the relief on the image border and infinite inside."""
    relief = np.asarray(relief)
    out = np.full(relief.shape, ceiling_infinity(relief.dtype), dtype=relief.dtype)
    out[0, :] = relief[0, :]
    out[-1, :] = relief[-1, :]
    out[:, 0] = relief[:, 0]
    out[:, -1] = relief[:, -1]
    return out


def flood_under_ceiling(relief, ceiling, connectivity=None) -> GridImage:
    """Highest flooding of ``relief`` below ``ceiling`` (reconstruction by erosion).

    Every pixel ends at the lowest level from which water could escape to a
    pixel where the ceiling is reached, never below the relief itself.
    """
    grid = as_grid(relief, connectivity)
    ceil = np.asarray(ceiling)
    rel = grid.values
    if ceil.shape != rel.shape:
        raise ValueError("relief and ceiling differ in shape")
    if np.any(ceil < rel):
        raise ValueError("ceiling lies below the relief somewhere")
    h, w = rel.shape
    conn = grid.connectivity
    offsets = (conn.even_offsets, conn.odd_offsets)
    out_dtype = np.result_type(rel.dtype, ceil.dtype)
    level = ceil.astype(out_dtype).tolist()
    rl = rel.tolist()
    inf = ceiling_infinity(out_dtype)

    heap = [(level[r][c], r, c) for r in range(h) for c in range(w) if level[r][c] != inf]
    heapq.heapify(heap)
    while heap:
        f, r, c = heapq.heappop(heap)
        if f != level[r][c]:
            continue
        for dr, dc in offsets[r & 1]:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w:
                cand = f if f > rl[rr][cc] else rl[rr][cc]
                if cand < level[rr][cc]:
                    level[rr][cc] = cand
                    heapq.heappush(heap, (cand, rr, cc))
    return GridImage(np.array(level, dtype=out_dtype), conn)


def fill_pits(relief, connectivity=None) -> GridImage:
    """Suppress every regional minimum that does not touch the image border."""
    grid = as_grid(relief, connectivity)
    return flood_under_ceiling(grid, boundary_ceiling(grid.values), grid.connectivity)
