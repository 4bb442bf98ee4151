"""Synthetic rasters used by the tests, the acceptance suite and the CLI demo."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = ["DoubleSpiral", "double_spiral", "dem_with_pits", "inject_plateaus"]


@dataclass(frozen=True)
class DoubleSpiral:
    image: np.ndarray
    stripes: tuple  # two boolean masks
    minimum: np.ndarray  # boolean mask of the dark centre
    tips: tuple  # (row, col) of each stripe's far end


def _stamp(mask, pts, radius):
    h, w = mask.shape
    rad = int(np.ceil(radius))
    for y, x in pts:
        r0, c0 = int(round(y)), int(round(x))
        for dr in range(-rad, rad + 1):
            for dc in range(-rad, rad + 1):
                r, c = r0 + dr, c0 + dc
                if 0 <= r < h and 0 <= c < w and (r - y) ** 2 + (c - x) ** 2 <= radius ** 2:
                    mask[r, c] = True


def _far_end(stripe, source):
    """Stripe pixel farthest (4-connected, inside the stripe) from ``source``."""
    h, w = stripe.shape
    dist = np.full(stripe.shape, -1, dtype=np.int64)
    q = deque()
    for r, c in zip(*np.nonzero(source)):
        dist[r, c] = 0
        q.append((r, c))
    best = None
    while q:
        r, c = q.popleft()
        for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and stripe[rr, cc] and dist[rr, cc] < 0:
                dist[rr, cc] = dist[r, c] + 1
                q.append((rr, cc))
                best = (int(rr), int(cc))
    return best


def double_spiral(
    size: int = 96,
    *,
    turns: float = 2.0,
    stripe_radius: float = 1.5,
    pitch: float = 9.0,
    stripe_value: int = 100,
    background: int = 200,
    minimum_value: int = 0,
) -> DoubleSpiral:
    """Two interleaved Archimedean stripes of one gray tone ending in a dark disc.

    The stripes never touch each other (not even diagonally) and their only
    lower neighbour is the central minimum.
    """
    cy = cx = (size - 1) / 2.0
    core = 3.0
    b = pitch / np.pi  # radial gap between the two arms is pitch
    thetas = np.linspace(0.0, 2 * np.pi * turns, int(4000 * turns))
    stripes = []
    for arm in range(2):
        mask = np.zeros((size, size), dtype=bool)
        r = core + 1.0 + b * thetas
        phi = thetas + arm * np.pi
        _stamp(mask, zip(cy + r * np.sin(phi), cx + r * np.cos(phi)), stripe_radius)
        stripes.append(mask)
    yy, xx = np.mgrid[0:size, 0:size]
    minimum = (yy - cy) ** 2 + (xx - cx) ** 2 <= core ** 2
    stripes = [s & ~minimum for s in stripes]

    grown = np.zeros_like(stripes[0])
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            grown |= np.roll(np.roll(stripes[0], dr, 0), dc, 1)
    if (grown & stripes[1]).any():
        raise ValueError("stripes touch; increase pitch or reduce stripe_radius")

    image = np.full((size, size), background, dtype=np.uint8)
    for s in stripes:
        image[s] = stripe_value
    image[minimum] = minimum_value
    tips = tuple(_far_end(s, minimum) for s in stripes)
    return DoubleSpiral(image, tuple(stripes), minimum, tips)


def dem_with_pits(size: int = 64, pits: int = 6, seed: int = 0) -> tuple[np.ndarray, list]:
    """Smooth 16-bit relief draining to the border, with interior pits dug in.

    Returns the relief and the list of pit centres.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(float)
    border = np.minimum.reduce([yy, xx, size - 1 - yy, size - 1 - xx])
    relief = 40.0 * border + 25.0 * np.sin(xx / 5.0) * np.cos(yy / 7.0) + rng.normal(0, 1.0, (size, size))
    relief -= relief.min()
    centres = []
    attempts = 0
    while len(centres) < pits:
        attempts += 1
        if attempts > 1000 * pits or size < 20:
            raise ValueError(f"cannot place {pits} separated pits in a {size}x{size} relief")
        r, c = rng.integers(8, size - 8, size=2)
        if all(abs(r - a) + abs(c - b) > 10 for a, b in centres):
            centres.append((int(r), int(c)))
    for r, c in centres:
        dist2 = (yy - r) ** 2 + (xx - c) ** 2
        relief -= np.where(dist2 <= 9, 150.0 * (1 - dist2 / 10.0), 0.0)
    relief -= relief.min()
    return np.round(relief * 10).astype(np.uint16), centres


def inject_plateaus(
    shape: tuple[int, int] = (32, 32),
    count: int = 3,
    max_diameter: int = 10,
    seed: int = 0,
    levels: int = 64,
) -> tuple[np.ndarray, list]:
    """Random noise with flat rectangles at levels that guarantee a lower neighbour.

    Rectangles have sides between 2 and ``max_diameter``, never overlap and
    keep a ring of noise between each other.  The level of each one differs
    from every pixel of its surrounding ring, so each rectangle is exactly
    one plateau.

    Returns the image and the list of rectangles ``(r0, c0, r1, c1)``
    (exclusive upper bounds).
    """
    rng = np.random.default_rng(seed)
    h, w = shape
    img = rng.integers(0, levels, size=shape).astype(np.int64)
    taken = np.zeros(shape, dtype=bool)
    rects = []
    attempts = 0
    while len(rects) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise ValueError("cannot place that many plateaus")
        dh = int(rng.integers(2, max_diameter + 1))
        dw = int(rng.integers(2, max_diameter + 1))
        if dh + 2 > h - 1 or dw + 2 > w - 1:
            continue
        r0 = int(rng.integers(1, h - dh))
        c0 = int(rng.integers(1, w - dw))
        box = (slice(r0 - 1, r0 + dh + 1), slice(c0 - 1, c0 + dw + 1))
        if taken[box].any():
            continue
        ring = img[box].copy()
        ring[1:-1, 1:-1] = -1
        ring_vals = set(ring[ring >= 0].tolist())
        # corners are not neighbours in every connectivity
        sides = np.concatenate([ring[0, 1:-1], ring[-1, 1:-1], ring[1:-1, 0], ring[1:-1, -1]])
        low = int(sides.min())
        choices = [v for v in range(low + 1, levels) if v not in ring_vals]
        if not choices:
            continue
        img[r0:r0 + dh, c0:c0 + dw] = choices[int(rng.integers(0, min(len(choices), levels // 4)))]
        taken[box] = True
        rects.append((r0, c0, r0 + dh, c0 + dw))
    return img, rects
