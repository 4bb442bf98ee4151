from collections import deque

import numpy as np
import pytest

from steepwater.grid import HEX6, SQUARE4, SQUARE8, ArrowField, GridImage
from steepwater.grid_watershed import watershed
from steepwater.synthetic import double_spiral
from steepwater.trajectory import SeedSet, parse_seed_spec, trace_downstream

from conftest import random_image


def _reachable(arrows, start):
    """Reference: pixels reachable from ``start`` along the arrows."""
    h, w = arrows.masks.shape
    conn = arrows.connectivity
    seen = {start}
    q = deque([start])
    while q:
        r, c = q.popleft()
        m = int(arrows.masks[r, c])
        for n, (dr, dc) in enumerate(conn.offsets_for_row(r)):
            if m >> n & 1 and (r + dr, c + dc) not in seen:
                seen.add((r + dr, c + dc))
                q.append((r + dr, c + dc))
    return seen


class TestSeeds:
    def test_parse(self):
        s = parse_seed_spec("3,1,2; 0,0,5")
        assert s.entries == (((1, 3), 2), ((0, 0), 5))

    @pytest.mark.parametrize("text", ["1,2", "a,b,c", "1,2,0", "1,2,-3"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            parse_seed_spec(text)

    def test_bounds(self):
        with pytest.raises(ValueError, match="outside"):
            SeedSet([((5, 0), 1)]).to_labels((2, 2))

    def test_overlapping_seeds_keep_max(self):
        assert SeedSet([((0, 0), 2), ((0, 0), 7)]).to_labels((1, 1)).tolist() == [[7]]


class TestTraceDownstream:
    def test_seed_on_minimum(self):
        arrows = watershed(np.array([[3, 2, 1, 0]])).arrows
        assert trace_downstream(arrows, [((0, 3), 4)]).tolist() == [[0, 0, 0, 4]]

    def test_full_descent(self):
        arrows = watershed(np.array([[3, 2, 1, 0]])).arrows
        labels, its = trace_downstream(arrows, [((0, 0), 1)], return_iterations=True)
        assert labels.tolist() == [[1, 1, 1, 1]]
        assert its == 3

    def test_meeting_takes_max(self):
        arrows = ArrowField(np.array([[1, 0, 4]], np.uint8), SQUARE4)
        assert trace_downstream(arrows, [((0, 0), 3), ((0, 2), 5)]).tolist() == [[3, 5, 5]]

    @pytest.mark.parametrize("conn", [SQUARE4, SQUARE8, HEX6])
    @pytest.mark.parametrize("seed", range(6))
    def test_matches_reachability(self, conn, seed):
        rng = np.random.default_rng(seed)
        arrows = watershed(GridImage(random_image(rng, (12, 12)), conn)).arrows
        start = (int(rng.integers(12)), int(rng.integers(12)))
        labels = trace_downstream(arrows, [(start, 1)])
        got = {tuple(map(int, p)) for p in zip(*np.nonzero(labels))}
        assert got == _reachable(arrows, start)

    def test_spiral(self):
        sp = double_spiral()
        arrows = watershed(sp.image).arrows
        for tip, stripe in zip(sp.tips, sp.stripes):
            labels = trace_downstream(arrows, [(tip, 1)])
            on = labels > 0
            assert (on & sp.minimum).any()
            assert not (on & ~stripe & ~sp.minimum).any()
