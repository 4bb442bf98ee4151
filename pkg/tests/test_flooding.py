import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steepwater.flooding import (
    HierarchicalQueue,
    boundary_ceiling,
    ceiling_infinity,
    fill_pits,
    flood_under_ceiling,
    hq_watershed,
)
from steepwater.grid import HEX6, SQUARE4, SQUARE8, GridImage
from steepwater.grid_watershed import regional_minima, watershed
from steepwater.synthetic import dem_with_pits

from conftest import random_image


def _fixpoint_flood(relief, ceiling, conn):
    """Reference: repeat out = max(relief, min(out, neighbours of out)) until stable."""
    out = ceiling.astype(np.float64).copy()
    h, w = relief.shape
    while True:
        prev = out.copy()
        for r in range(h):
            for c in range(w):
                low = prev[r, c]
                for dr, dc in conn.offsets_for_row(r):
                    if 0 <= r + dr < h and 0 <= c + dc < w:
                        low = min(low, prev[r + dr, c + dc])
                out[r, c] = max(relief[r, c], low)
        if np.array_equal(out, prev):
            return out


class TestHierarchicalQueue:
    def test_fifo_within_level(self):
        q = HierarchicalQueue(3)
        for item in "abc":
            q.push(item, 1)
        assert [q.pop()[1] for _ in range(3)] == ["a", "b", "c"]

    def test_lowest_level_first(self):
        q = HierarchicalQueue(4)
        q.push("x", 3)
        q.push("y", 0)
        q.push("z", 2)
        assert [q.pop() for _ in range(3)] == [(0, "y"), (2, "z"), (3, "x")]

    def test_late_low_push_served_at_cursor(self):
        q = HierarchicalQueue(4)
        q.push("a", 2)
        q.push("b", 3)
        assert q.pop() == (2, "a")
        q.push("c", 0)
        assert q.cursor == 2
        assert q.pop() == (2, "c")

    def test_errors(self):
        with pytest.raises(ValueError):
            HierarchicalQueue(0)
        q = HierarchicalQueue(2)
        with pytest.raises(IndexError):
            q.pop()
        with pytest.raises(IndexError):
            q.push("a", 2)

    @given(st.lists(st.integers(0, 9), max_size=40))
    def test_pops_sorted_without_late_pushes(self, levels):
        q = HierarchicalQueue(10)
        for i, lv in enumerate(levels):
            q.push(i, lv)
        popped = [q.pop() for _ in levels]
        assert [lv for lv, _ in popped] == sorted(levels)
        # stable within a level
        assert popped == sorted(popped, key=lambda t: t[0])


class TestHqWatershed:
    def test_descending_row(self):
        seeds = np.array([[0, 0, 0, 1]])
        assert hq_watershed(np.array([[3, 2, 1, 0]]), seeds).tolist() == [[1, 1, 1, 1]]

    def test_symmetric_race_goes_to_first_seed(self):
        labels, order = hq_watershed(np.array([[0, 1, 2, 1, 0]]), return_order=True)
        # seeds are queued in raster order, so the left front reaches the crest first
        assert labels.tolist() == [[1, 1, 1, 2, 2]]
        assert order[0, 0] == 0 and order[0, 4] == 1

    def test_no_seeds(self):
        with pytest.raises(ValueError):
            hq_watershed(np.array([[1, 2]]), np.zeros((1, 2), dtype=int))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            hq_watershed(np.array([[1, 2]]), np.ones((2, 2), dtype=int))

    @pytest.mark.parametrize("conn", [SQUARE4, SQUARE8, HEX6])
    @pytest.mark.parametrize("seed", range(10))
    def test_basins_match_steepest_structure(self, conn, seed):
        g = GridImage(random_image(np.random.default_rng(seed)), conn)
        hq = hq_watershed(g)
        steep = watershed(g).labels
        minima = regional_minima(g)
        assert set(np.unique(hq)) == set(np.unique(steep))
        for lab in np.unique(minima[minima > 0]):
            assert (hq[minima == lab] == lab).all()


class TestFloodUnderCeiling:
    def test_identity(self):
        relief = np.array([[0, 3, 1], [2, 2, 5]])
        assert np.array_equal(flood_under_ceiling(relief, relief).values, relief)

    def test_pit_filled(self):
        relief = np.array([[0, 3, 1, 3, 0]])
        inf = ceiling_infinity(relief.dtype)
        out = flood_under_ceiling(relief, np.array([[0, inf, inf, inf, 0]])).values
        assert out.tolist() == [[0, 3, 3, 3, 0]]

    def test_ceiling_below_relief(self):
        with pytest.raises(ValueError):
            flood_under_ceiling(np.array([[2, 2]]), np.array([[1, 2]]))

    def test_boundary_ceiling(self):
        relief = np.arange(9, dtype=np.uint8).reshape(3, 3)
        c = boundary_ceiling(relief)
        assert c[1, 1] == 255 and c[0, 0] == 0 and c[2, 1] == 7

    def test_infinity(self):
        assert ceiling_infinity(np.uint16) == 65535
        assert ceiling_infinity(np.float32) == np.inf
        with pytest.raises(TypeError):
            ceiling_infinity(np.bool_)

    @pytest.mark.parametrize("conn", [SQUARE4, SQUARE8, HEX6])
    @pytest.mark.parametrize("seed", range(10))
    def test_matches_fixpoint_oracle(self, conn, seed):
        rng = np.random.default_rng(seed)
        relief = rng.integers(0, 10, (7, 8))
        ceiling = relief + rng.integers(0, 6, relief.shape)
        ceiling[rng.random(relief.shape) < 0.6] = ceiling_infinity(relief.dtype)
        ceiling[0, 0] = relief[0, 0]
        got = flood_under_ceiling(GridImage(relief, conn), ceiling).values
        assert np.array_equal(got, _fixpoint_flood(relief, ceiling, conn))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_fill_pits_leaves_only_border_minima(self, seed):
        relief = np.random.default_rng(seed).integers(0, 20, (9, 9))
        out = fill_pits(relief).values
        assert (out >= relief).all()
        minima = regional_minima(GridImage(out))
        inner = np.zeros_like(minima, dtype=bool)
        inner[1:-1, 1:-1] = True
        for lab in np.unique(minima[minima > 0]):
            assert not inner[minima == lab].all()

    def test_dem_pits(self):
        relief, _ = dem_with_pits(64, pits=5, seed=1)
        border = np.zeros(relief.shape, bool)
        border[[0, -1], :] = True
        border[:, [0, -1]] = True

        def interior_minima(img):
            m = regional_minima(GridImage(img))
            return [lab for lab in np.unique(m[m > 0]) if not border[m == lab].any()]

        assert len(interior_minima(relief)) >= 5
        out = fill_pits(relief).values
        assert out.dtype == relief.dtype
        assert interior_minima(out) == []
