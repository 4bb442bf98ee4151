"""False-colour renderings of arrow fields, label maps and mosaics."""
from __future__ import annotations

import colorsys

import numpy as np

__all__ = ["ARROW_PALETTE", "label_colors", "render_arrows", "render_labels", "mosaic", "overlay"]

_GOLDEN = 0.6180339887498949


def _palette(n: int) -> np.ndarray:
    out = np.zeros((n, 3), dtype=np.uint8)
    for i in range(1, n):
        hue = (i * _GOLDEN) % 1.0
        sat = 0.55 + 0.45 * ((i * 7) % 5) / 4
        val = 0.65 + 0.35 * ((i * 3) % 4) / 3
        out[i] = [round(255 * x) for x in colorsys.hsv_to_rgb(hue, sat, val)]
    return out


# index = arrow mask; 0 (no arrow) is black
ARROW_PALETTE = _palette(256)


def label_colors(labels: np.ndarray) -> np.ndarray:
    """RGB per label; 0 is black, other labels cycle through a 4096-entry palette."""
    table = _palette(4096)
    labels = np.asarray(labels, dtype=np.int64)
    idx = np.where(labels > 0, (labels - 1) % 4095 + 1, 0)
    return table[idx]


def render_arrows(masks: np.ndarray) -> np.ndarray:
    return ARROW_PALETTE[np.asarray(masks, dtype=np.uint8)]


def render_labels(labels: np.ndarray) -> np.ndarray:
    return label_colors(labels)


def mosaic(image: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Each basin takes the mean gray tone of ``image`` over it, rounded half up.

    Unlabeled pixels keep their own value.
    """
    image = np.asarray(image)
    labels = np.asarray(labels, dtype=np.int64)
    flat = labels.ravel()
    sums = np.zeros(flat.max() + 1, dtype=np.int64)
    np.add.at(sums, flat, image.ravel().astype(np.int64))
    counts = np.bincount(flat, minlength=flat.max() + 1).astype(np.int64)
    means = (2 * sums + counts) // np.maximum(2 * counts, 1)
    out = means[labels].astype(image.dtype)
    out[labels == 0] = image[labels == 0]
    return out


def overlay(image: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Labeled pixels in their label colour over a grayscale rendering of ``image``."""
    image = np.asarray(image, dtype=np.float64)
    lo, hi = image.min(), image.max()
    gray = np.zeros(image.shape, dtype=np.uint8) if hi == lo else np.round(
        255 * (image - lo) / (hi - lo)).astype(np.uint8)
    rgb = np.repeat(gray[..., None], 3, axis=2)
    on = np.asarray(labels) > 0
    rgb[on] = label_colors(labels)[on]
    return rgb
