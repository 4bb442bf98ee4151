import numpy as np
import pytest

from steepwater.graph_core import steepest_watershed_graph
from steepwater.grid import HEX6, SQUARE4, SQUARE8, ArrowField, GridImage, grid_to_graph, masks_to_arcs
from steepwater.grid_watershed import (
    adaptive_dilate,
    adaptive_erode,
    initialize,
    regional_minima,
    run_watershed,
    watershed,
)

from conftest import random_image

E, N, W, S = 1, 2, 4, 8


class TestInitialize:
    def test_uniform(self):
        arrows, labels = initialize(GridImage(np.full((3, 3), 4)))
        assert (arrows.masks == 0).all() and (labels == 1).all()

    def test_row(self):
        arrows, labels = initialize(GridImage(np.array([[3, 2, 1, 0]])))
        assert labels.tolist() == [[0, 0, 0, 1]]
        assert arrows.masks.tolist() == [[E, E | W, E | W, 0]]

    def test_border_square8(self):
        arrows, _ = initialize(GridImage(np.arange(9).reshape(3, 3)[::-1, ::-1].copy(), SQUARE8))
        # top-left corner: E, S, SE only
        assert arrows.masks[0, 0] == (1 << 0) | (1 << 6) | (1 << 7)

    def test_minima_labels_raster_order(self):
        img = np.array([[0, 5, 1], [5, 5, 5], [2, 5, 0]])
        assert regional_minima(GridImage(img)).tolist() == [[1, 0, 2], [0, 0, 0], [3, 0, 4]]


class TestAdaptiveErode:
    def test_only_arrowed_neighbours(self):
        img = np.array([[9, 4, 9], [2, 5, 3], [9, 9, 9]])
        masks = np.zeros((3, 3), np.uint8)
        masks[1, 1] = E | N
        g, a = adaptive_erode(GridImage(img), ArrowField(masks, SQUARE4))
        assert g.values[1, 1] == 3
        assert a.masks[1, 1] == E

    def test_no_arrow_unchanged(self):
        g, a = adaptive_erode(GridImage(np.array([[7, 1]])), ArrowField(np.zeros((1, 2), np.uint8), SQUARE4))
        assert g.values.tolist() == [[7, 1]] and not a.masks.any()

    def test_ties_keep_all_bits(self):
        img = np.array([[1, 5, 1]])
        g, a = adaptive_erode(GridImage(img), ArrowField(np.array([[0, E | W, 0]], np.uint8), SQUARE4))
        assert g.values[0, 1] == 1 and a.masks[0, 1] == E | W

    def test_out_of_bounds_bit(self):
        with pytest.raises(ValueError, match="outside"):
            adaptive_erode(GridImage(np.array([[1, 2]])), ArrowField(np.array([[N, 0]], np.uint8), SQUARE4))

    def test_float_values(self):
        g, _ = adaptive_erode(GridImage(np.array([[0.5, 0.25]])), ArrowField(np.array([[E, 0]], np.uint8), SQUARE4))
        assert g.values.tolist() == [[0.25, 0.25]]


class TestAdaptiveDilate:
    def test_label_from_arrow(self):
        lab, a = adaptive_dilate(np.array([[0, 3]]), ArrowField(np.array([[E, 0]], np.uint8), SQUARE4))
        assert lab.tolist() == [[3, 3]] and not a.masks.any()

    def test_highest_label(self):
        lab, _ = adaptive_dilate(np.array([[2, 0, 5]]), ArrowField(np.array([[0, E | W, 0]], np.uint8), SQUARE4))
        assert lab[0, 1] == 5

    def test_no_arrow_no_label(self):
        lab, a = adaptive_dilate(np.array([[2, 0, 0]]), ArrowField(np.array([[0, E, 0]], np.uint8), SQUARE4))
        assert lab.tolist() == [[2, 0, 0]] and a.masks[0, 1] == E


class TestWatershed:
    def test_descending_row(self):
        res = watershed(np.array([[3, 2, 1, 0]]))
        assert res.labels.tolist() == [[1, 1, 1, 1]]
        assert res.iterations == 3
        assert res.arrows.masks.tolist() == [[E, E, E, 0]]

    def test_symmetric_tie_takes_max(self):
        res = watershed(np.array([[0, 1, 2, 1, 0]]))
        assert res.labels.tolist() == [[1, 1, 2, 2, 2]]
        assert res.arrows.masks[0, 2] == E | W

    def test_empty(self):
        with pytest.raises(ValueError, match="empty input"):
            watershed(np.zeros((0, 3)))

    def test_deleted_label_leaves_pixels_open(self):
        img = GridImage(np.array([[0, 1, 2, 3, 2, 1, 0]]))
        arrows, labels = initialize(img)
        labels[labels == 1] = 0
        res = run_watershed(img, arrows, labels, require_complete=False)
        assert res.labels.tolist() == [[0, 0, 0, 2, 2, 2, 2]]
        with pytest.raises(AssertionError):
            run_watershed(img, arrows, labels)

    @pytest.mark.parametrize("conn", [SQUARE4, SQUARE8, HEX6])
    @pytest.mark.parametrize("seed", range(15))
    def test_matches_graph_engine(self, conn, seed):
        img = GridImage(random_image(np.random.default_rng(seed)), conn)
        res = watershed(img)
        ref = steepest_watershed_graph(grid_to_graph(img))
        assert res.labels.ravel().tolist() == list(ref.labels)
        assert masks_to_arcs(res.arrows) == ref.drainage.arcs
        assert res.iterations == ref.iterations

    @pytest.mark.parametrize("dtype", [np.uint8, np.uint16, np.int32, np.float32, np.float64])
    def test_dtypes_agree(self, dtype):
        img = random_image(np.random.default_rng(5), (16, 16))
        base = watershed(img)
        other = watershed(img.astype(dtype))
        assert np.array_equal(base.labels, other.labels)
        assert base.arrows == other.arrows
