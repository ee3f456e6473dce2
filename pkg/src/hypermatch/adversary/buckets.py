"""Partition of a phase matching by endpoint loads."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BOUNDARY_TOL = 1e-9


def grid_size(num_edges: int) -> tuple[float, int]:
    """(eta, N) with eta = |M|^(-1/3) and N = ceil(2 / eta)."""
    if num_edges < 1:
        raise ValueError("the matching must be non-empty")
    eta = num_edges ** (-1.0 / 3.0)
    # guard against 2/eta landing a hair above an integer, e.g. |M| = 8
    return eta, int(math.ceil(2.0 / eta - 1e-12))


def delta(i: int, j: int, N: int) -> float:
    """Largest x keeping f((i-1)/N + x) + f((j-1)/N + x) <= 1."""
    return math.log((math.e + 1.0) / (math.exp((i - 1) / N) + math.exp((j - 1) / N)))


def bucket_index(load, N: int) -> np.ndarray:
    """Index i with load in [(i-1)/N, i/N]; loads on a boundary go to the lower bucket."""
    idx = np.ceil(np.asarray(load, dtype=np.float64) * N - BOUNDARY_TOL).astype(np.int64)
    return np.clip(idx, 1, N)


@dataclass
class BucketPartition:
    eta: float
    N: int
    buckets: dict  # (i, j) -> array of edge positions, in input order

    def delta(self, i: int, j: int) -> float:
        return delta(i, j, self.N)

    def keys(self) -> list:
        return sorted(self.buckets)

    def sizes(self) -> dict:
        return {k: len(v) for k, v in self.buckets.items()}


def bucketize(load_u, load_v, unordered: bool = False) -> BucketPartition:
    """Group edges (given by the loads of their two endpoints) into load buckets.

    With ``unordered`` the key is (min(i, j), max(i, j)), so an edge and its
    mirror image, whose endpoint loads are swapped, land in the same bucket.
    Since delta is symmetric the per-bucket bound is unchanged.
    """
    load_u = np.asarray(load_u, dtype=np.float64)
    load_v = np.asarray(load_v, dtype=np.float64)
    eta, N = grid_size(len(load_u))
    bi, bj = bucket_index(load_u, N), bucket_index(load_v, N)
    if unordered:
        bi, bj = np.minimum(bi, bj), np.maximum(bi, bj)
    key = bi * (N + 1) + bj
    order = np.argsort(key, kind="stable")
    sorted_keys = key[order]
    starts = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])
    buckets = {}
    for s, e in zip(starts, np.r_[starts[1:], len(order)]):
        k = int(sorted_keys[s])
        buckets[(k // (N + 1), k % (N + 1))] = order[s:e]
    return BucketPartition(eta, N, buckets)
