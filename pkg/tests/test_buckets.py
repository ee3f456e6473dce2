import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypermatch.adversary import bucketize, delta, grid_size
from hypermatch.adversary.buckets import bucket_index
from hypermatch.model import f


def test_grid_size_exact_cube():
    eta, N = grid_size(8)
    assert eta == pytest.approx(0.5) and N == 4
    assert grid_size(1000)[1] == 20


def test_boundary_goes_low():
    assert bucket_index([0.0, 0.25, 0.2500001, 1.0], 4).tolist() == [1, 1, 2, 4]


@given(st.integers(1, 30), st.integers(1, 30), st.integers(1, 30))
def test_delta_saturates_bucket_corner(i, j, N):
    i, j = min(i, N), min(j, N)
    d = delta(i, j, N)
    assert f((i - 1) / N + d) + f((j - 1) / N + d) == pytest.approx(1.0, abs=1e-12)
    assert delta(i, j, N) == delta(j, i, N)


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=60), st.booleans())
def test_partition_covers_each_edge_once(loads, unordered):
    lu, lv = np.array(loads).T
    part = bucketize(lu, lv, unordered)
    pos = np.sort(np.concatenate(list(part.buckets.values())))
    assert pos.tolist() == list(range(len(loads)))
    for (i, j), members in part.buckets.items():
        for p in members:
            a, b = bucket_index(lu[p], part.N), bucket_index(lv[p], part.N)
            assert (i, j) == ((min(a, b), max(a, b)) if unordered else (a, b))
        assert list(members) == sorted(members)
    assert part.N == math.ceil(2 / part.eta - 1e-12)


def test_unordered_merges_mirrors():
    part = bucketize([0.1, 0.9], [0.9, 0.1], unordered=True)
    assert len(part.buckets) == 1
    assert len(bucketize([0.1, 0.9], [0.9, 0.1]).buckets) == 2
