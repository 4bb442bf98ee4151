"""Steepest watershed on rasters with bit-encoded arrow fields.

Three buffers evolve together: the gray tones (eroded along the arrows), the
labels (dilated along the arrows) and the arrow masks (pruned by both).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .graph_core import IterationOverflow
from .grid import ArrowField, GridImage, as_grid, in_bounds_mask

__all__ = [
    "WatershedResult",
    "regional_minima",
    "initialize",
    "adaptive_erode",
    "adaptive_dilate",
    "watershed",
    "run_watershed",
]


class WatershedResult(NamedTuple):
    labels: np.ndarray
    arrows: ArrowField
    iterations: int


def regional_minima(grid: GridImage) -> np.ndarray:
    """Label map of the regional minima, 1..M in raster order, 0 elsewhere."""
    grid = as_grid(grid)
    if grid.values.size == 0:
        raise ValueError("empty input")
    values = K.as_kernel_values(grid.values)
    dr, dc = grid.connectivity.tables()
    zone, nz = K.flat_zones(values, dr, dc)
    lower = K.zones_with_lower_neighbor(values, zone, nz, dr, dc)
    zone_label = np.zeros(nz, dtype=np.int64)
    is_min = ~lower
    zone_label[is_min] = np.arange(1, int(is_min.sum()) + 1)
    return zone_label[zone]


def initialize(grid: GridImage) -> tuple[ArrowField, np.ndarray]:
    """Label the regional minima and arrow every other pixel in all directions."""
    grid = as_grid(grid)
    labels = regional_minima(grid)
    masks = in_bounds_mask(grid.shape, grid.connectivity)
    masks[labels != 0] = 0
    return ArrowField(masks, grid.connectivity), labels


def _check_masks(masks: np.ndarray, connectivity) -> None:
    full = in_bounds_mask(masks.shape, connectivity)
    bad = (masks & ~full) != 0
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise ValueError(f"arrow mask at ({r}, {c}) points outside the image")


def adaptive_erode(grid: GridImage, arrows: ArrowField) -> tuple[GridImage, ArrowField]:
    """Replace each arrowed pixel by its lowest arrowed neighbour; prune the rest.

    Pixels without arrows are left unchanged.  Non-arrowed neighbours are
    ignored even when they are lower.
    """
    grid = as_grid(grid, arrows.connectivity)
    if arrows.masks.shape != grid.shape:
        raise ValueError("arrow field and grid differ in shape")
    _check_masks(arrows.masks, arrows.connectivity)
    K.apply_thread_setting()
    values = K.as_kernel_values(grid.values)
    dr, dc = arrows.connectivity.tables()
    out_v = np.empty_like(values)
    out_m = np.empty_like(arrows.masks)
    K.erode_step(values, arrows.masks, dr, dc, out_v, out_m)
    return GridImage(out_v, grid.connectivity), ArrowField(out_m, arrows.connectivity)


def adaptive_dilate(labels: np.ndarray, arrows: ArrowField) -> tuple[np.ndarray, ArrowField]:
    """Give each unlabeled pixel the highest label among its arrowed neighbours.

    A pixel that gets a label loses its arrows.
    """
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if labels.shape != arrows.masks.shape:
        raise ValueError("label field and arrow field differ in shape")
    if (arrows.masks[labels != 0] != 0).any():
        raise ValueError("labeled pixels must not carry arrows")
    _check_masks(arrows.masks, arrows.connectivity)
    K.apply_thread_setting()
    dr, dc = arrows.connectivity.tables()
    out_l = np.empty_like(labels)
    out_m = np.empty_like(arrows.masks)
    scratch = np.zeros_like(arrows.masks)
    K.dilate_step(labels, arrows.masks, dr, dc, out_l, out_m, scratch)
    return out_l, ArrowField(out_m, arrows.connectivity)


def run_watershed(
    grid: GridImage,
    arrows: ArrowField,
    labels: np.ndarray,
    *,
    require_complete: bool = True,
) -> WatershedResult:
    """Iterate erosion + dilation from a given state until coverage or stability.

    Parameters
    ----------
    grid, arrows, labels
        Starting state, usually from :func:`initialize`.  Labels may be
        removed beforehand; the matching pixels then never fill up.
    require_complete
        Raise if a fixpoint is reached while pixels are still unlabeled.

    The returned arrow field holds, for each labeled pixel, the mask it had
    just before receiving its label.  Pixels still unlabeled keep their
    current mask.
    """
    grid = as_grid(grid, arrows.connectivity)
    _check_masks(arrows.masks, arrows.connectivity)
    K.apply_thread_setting()
    conn = arrows.connectivity
    dr, dc = conn.tables()
    h, w = grid.shape
    cap = h * w

    v = K.as_kernel_values(grid.values).copy()
    m = arrows.masks.copy()
    lab = np.ascontiguousarray(labels, dtype=np.int64).copy()
    if (m[lab != 0] != 0).any():
        raise ValueError("labeled pixels must not carry arrows")
    v2, m2, m3, lab2 = np.empty_like(v), np.empty_like(m), np.empty_like(m), np.empty_like(lab)
    recorded = np.zeros_like(m)

    remaining = int(np.count_nonzero(lab == 0))
    iterations = 0
    while remaining:
        changed = K.erode_step(v, m, dr, dc, v2, m2)
        newly = K.dilate_step(lab, m2, dr, dc, lab2, m3, recorded)
        if changed == 0 and newly == 0:
            break
        iterations += 1
        if iterations > cap:
            raise IterationOverflow(f"iteration overflow: more than {cap} iterations")
        v, v2 = v2, v
        m, m3 = m3, m
        lab, lab2 = lab2, lab
        remaining -= newly

    if remaining:
        if require_complete:
            raise AssertionError(f"fixpoint reached with {remaining} unlabeled pixels")
        open_px = lab == 0
        recorded[open_px] = m[open_px]
    return WatershedResult(lab, ArrowField(recorded, conn), iterations)


def watershed(grid, connectivity=None) -> WatershedResult:
    """Steepest watershed of a raster.

    >>> import numpy as np
    >>> res = watershed(np.array([[0, 1, 2, 1, 0]]))
    >>> res.labels.tolist(), res.iterations
    ([[1, 1, 2, 2, 2]], 2)
    """
    grid = as_grid(grid, connectivity)
    if grid.values.size == 0:
        raise ValueError("empty input")
    arrows, labels = initialize(grid)
    return run_watershed(grid, arrows, labels)
