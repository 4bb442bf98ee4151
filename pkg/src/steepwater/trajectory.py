"""Downstream propagation of seed labels along a steepest arrow field."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels as K
from .graph_core import IterationOverflow
from .grid import ArrowField

__all__ = ["SeedSet", "trace_downstream", "parse_seed_spec"]


@dataclass(frozen=True)
class SeedSet:
    """Starting pixels ``((row, col), label)`` with positive labels."""

    entries: tuple

    def __init__(self, entries: Iterable):
        clean = []
        for (row, col), label in entries:
            if int(label) <= 0:
                raise ValueError(f"seed label must be positive, got {label}")
            clean.append(((int(row), int(col)), int(label)))
        object.__setattr__(self, "entries", tuple(clean))

    def check_bounds(self, shape: tuple[int, int]) -> None:
        for (row, col), _ in self.entries:
            if not (0 <= row < shape[0] and 0 <= col < shape[1]):
                raise ValueError(f"seed ({row}, {col}) outside a {shape[0]}x{shape[1]} image")

    def to_labels(self, shape: tuple[int, int]) -> np.ndarray:
        self.check_bounds(shape)
        out = np.zeros(shape, dtype=np.int64)
        for (row, col), label in self.entries:
            out[row, col] = max(out[row, col], label)
        return out


def parse_seed_spec(text: str) -> SeedSet:
    """Parse ``"x,y,label;x,y,label"`` (x = column, y = row)."""
    entries = []
    for chunk in text.replace("\n", ";").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 3:
            raise ValueError(f"bad seed {chunk!r}: expected x,y,label")
        x, y, label = (int(p) for p in parts)
        entries.append(((y, x), label))
    return SeedSet(entries)


def trace_downstream(arrows: ArrowField, seeds, *, return_iterations: bool = False):
    """Follow the arrows downstream from the seeds until nothing changes.

    Each labeled pixel pushes its label along every arrow; where labels meet,
    the highest one wins.  Pixels never reached stay 0.

    Parameters
    ----------
    arrows : ArrowField
        Final steepest arrow field, as returned by ``watershed``.
    seeds : SeedSet or iterable of ((row, col), label)
    """
    if not isinstance(seeds, SeedSet):
        seeds = SeedSet(seeds)
    shape = arrows.masks.shape
    labels = seeds.to_labels(shape)
    K.apply_thread_setting()
    dr, dc = arrows.connectivity.tables()
    masks = np.ascontiguousarray(arrows.masks)
    other = np.empty_like(labels)
    cap = shape[0] * shape[1]
    iterations = 0
    while K.trace_step(labels, masks, dr, dc, other):
        labels, other = other, labels
        iterations += 1
        if iterations > cap:
            raise IterationOverflow(f"iteration overflow: more than {cap} iterations")
    if return_iterations:
        return labels, iterations
    return labels
