"""Numba per-pixel kernels shared by the raster modules.

Every step kernel reads only its input buffers and writes only its output
buffers, so rows may be processed in any order or in parallel.
"""
from __future__ import annotations

import os

import numba
import numpy as np
from numba import njit, prange

THREADS_ENV = "STEEPWATER_THREADS"

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is often too old; skip it instead of warning
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def configured_threads() -> int:
    """Thread count from ``STEEPWATER_THREADS``, clamped to what numba allows."""
    limit = numba.config.NUMBA_NUM_THREADS
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return limit
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return min(n, limit)


def apply_thread_setting() -> int:
    n = configured_threads()
    numba.set_num_threads(n)
    return n


def as_kernel_values(values: np.ndarray) -> np.ndarray:
    """Promote to int64 or float64 so each kernel compiles for two dtypes only."""
    values = np.asarray(values)
    if values.dtype.kind in "biu":
        return np.ascontiguousarray(values, dtype=np.int64)
    if values.dtype.kind == "f":
        return np.ascontiguousarray(values, dtype=np.float64)
    raise TypeError(f"unsupported raster dtype {values.dtype}")


@njit(cache=True)
def flat_zones(values, dr, dc):
    """Zone id per pixel (0-based, in raster order of first pixel) and zone count."""
    h, w = values.shape
    k = dr.shape[1]
    zone = np.full((h, w), -1, dtype=np.int64)
    queue = np.empty(h * w, dtype=np.int64)
    nz = 0
    for r0 in range(h):
        for c0 in range(w):
            if zone[r0, c0] >= 0:
                continue
            v0 = values[r0, c0]
            zone[r0, c0] = nz
            head = 0
            tail = 0
            queue[tail] = r0 * w + c0
            tail += 1
            while head < tail:
                p = queue[head]
                head += 1
                r = p // w
                c = p - r * w
                par = r & 1
                for n in range(k):
                    rr = r + dr[par, n]
                    cc = c + dc[par, n]
                    if rr < 0 or rr >= h or cc < 0 or cc >= w:
                        continue
                    if zone[rr, cc] < 0 and values[rr, cc] == v0:
                        zone[rr, cc] = nz
                        queue[tail] = rr * w + cc
                        tail += 1
            nz += 1
    return zone, nz


@njit(cache=True)
def zones_with_lower_neighbor(values, zone, nz, dr, dc):
    h, w = values.shape
    k = dr.shape[1]
    lower = np.zeros(nz, dtype=np.bool_)
    for r in range(h):
        par = r & 1
        for c in range(w):
            v = values[r, c]
            for n in range(k):
                rr = r + dr[par, n]
                cc = c + dc[par, n]
                if rr < 0 or rr >= h or cc < 0 or cc >= w:
                    continue
                if values[rr, cc] < v:
                    lower[zone[r, c]] = True
                    break
    return lower


@njit(cache=True, parallel=True)
def erode_step(values, masks, dr, dc, out_values, out_masks):
    """Adaptive erosion: lowest arrowed neighbour value, keep arrows reaching it."""
    h, w = values.shape
    k = dr.shape[1]
    changed = 0
    for r in prange(h):
        par = r & 1
        for c in range(w):
            m = masks[r, c]
            if m == 0:
                out_values[r, c] = values[r, c]
                out_masks[r, c] = 0
                continue
            first = True
            low = values[r, c]
            for n in range(k):
                if (m >> n) & 1:
                    v = values[r + dr[par, n], c + dc[par, n]]
                    if first or v < low:
                        low = v
                        first = False
            keep = 0
            for n in range(k):
                if (m >> n) & 1:
                    if values[r + dr[par, n], c + dc[par, n]] == low:
                        keep |= 1 << n
            out_values[r, c] = low
            out_masks[r, c] = keep
            if low != values[r, c] or keep != m:
                changed += 1
    return changed


@njit(cache=True, parallel=True)
def dilate_step(labels, masks, dr, dc, out_labels, out_masks, recorded):
    """Adaptive dilation: highest arrowed labeled neighbour label, then clear arrows.

    ``recorded`` receives the mask a pixel held when it got its label.
    """
    h, w = labels.shape
    k = dr.shape[1]
    newly = 0
    for r in prange(h):
        par = r & 1
        for c in range(w):
            m = masks[r, c]
            out_labels[r, c] = labels[r, c]
            out_masks[r, c] = m
            if labels[r, c] != 0 or m == 0:
                continue
            best = 0
            for n in range(k):
                if (m >> n) & 1:
                    lab = labels[r + dr[par, n], c + dc[par, n]]
                    if lab > best:
                        best = lab
            if best > 0:
                out_labels[r, c] = best
                out_masks[r, c] = 0
                recorded[r, c] = m
                newly += 1
    return newly


@njit(cache=True, parallel=True)
def trace_step(labels, masks, dr, dc, out_labels):
    """Pull the highest label along every arrow pointing at each pixel."""
    h, w = labels.shape
    k = dr.shape[1]
    half = k // 2
    changed = 0
    for r in prange(h):
        par = r & 1
        for c in range(w):
            best = labels[r, c]
            for n in range(k):
                rr = r + dr[par, n]
                cc = c + dc[par, n]
                if rr < 0 or rr >= h or cc < 0 or cc >= w:
                    continue
                # neighbour (rr, cc) points back at us through the opposite direction
                opp = (n + half) % k
                if (masks[rr, cc] >> opp) & 1 and labels[rr, cc] > best:
                    best = labels[rr, cc]
            out_labels[r, c] = best
            if best != labels[r, c]:
                changed += 1
    return changed
