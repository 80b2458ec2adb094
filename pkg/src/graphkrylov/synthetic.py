"""Seeded synthetic data: node samples, labels and a bunny-like point cloud.

All randomness comes from SplitMix64 (Steele, Lea & Flood 2014) so that a
seed gives the same nodes, labels and points in any language:

* ``next_u64``: ``state += 0x9E3779B97F4A7C15``, then the standard SplitMix64
  mix of ``state``.
* ``uniform``: ``(next_u64 >> 11) * 2**-53``, a double in ``[0, 1)``.
* ``sample_nodes(n, N, seed)``: partial Fisher-Yates on ``0..n-1``; at step
  ``i`` swap with ``i + floor(uniform * (n - i))``; keep the first ``N``.
* ``binary_labels(N, seed)``: ``next_u64 >> 63`` for each node.
"""
import math

import numpy as np

from .graph import proximity_graph

_MASK = (1 << 64) - 1

BUNNY_SEED = 2023
BUNNY_POINTS = 900
BUNNY_RADIUS = 0.01


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next_u64() >> 11) * 2.0 ** -53


def sample_nodes(n, N, seed):
    if not 1 <= N <= n:
        raise ValueError(f"cannot sample {N} distinct nodes from {n}")
    rng = SplitMix64(seed)
    perm = list(range(n))
    for i in range(N):
        j = i + int(rng.uniform() * (n - i))
        perm[i], perm[j] = perm[j], perm[i]
    return perm[:N]


def binary_labels(N, seed):
    rng = SplitMix64(seed ^ 0x5DEECE66D)
    return np.array([float(rng.next_u64() >> 63) for _ in range(N)])


# silhouette in a unit box: (center x, center y, semi-axis a, semi-axis b, tilt)
_BUNNY_PARTS = (
    (0.45, 0.38, 0.30, 0.22, 0.15),   # body
    (0.78, 0.58, 0.14, 0.12, 0.0),    # head
    (0.74, 0.84, 0.05, 0.17, -0.25),  # rear ear
    (0.86, 0.83, 0.05, 0.16, 0.30),   # front ear
    (0.14, 0.48, 0.07, 0.07, 0.0),    # tail
    (0.62, 0.20, 0.14, 0.06, 0.0),    # hind foot
)
# total silhouette area after scaling; with 900 points and radius 0.01 this
# gives an average degree near 16
_BUNNY_AREA = 0.0165


def _inside(x, y):
    for cx, cy, a, b, tilt in _BUNNY_PARTS:
        c, s = math.cos(tilt), math.sin(tilt)
        u = (x - cx) * c + (y - cy) * s
        v = -(x - cx) * s + (y - cy) * c
        if (u / a) ** 2 + (v / b) ** 2 <= 1.0:
            return True
    return False


def _silhouette_area(samples=200_000):
    rng = SplitMix64(7)
    hits = sum(_inside(rng.uniform(), rng.uniform()) for _ in range(samples))
    return hits / samples


def bunny_points(seed=BUNNY_SEED, n=BUNNY_POINTS, area=_BUNNY_AREA):
    """Uniform samples from a rabbit-shaped silhouette, scaled to the given area.

    Stands in for a 2D projection of a scanned bunny: ``n`` points whose
    proximity graph at radius 0.01 has a few thousand edges.
    """
    rng = SplitMix64(seed)
    scale = math.sqrt(area / _UNIT_AREA)
    pts = []
    while len(pts) < n:
        x, y = rng.uniform(), rng.uniform()
        if _inside(x, y):
            pts.append((x * scale, y * scale))
    return np.array(pts)


# area of the unscaled silhouette, _silhouette_area() with 200k samples
_UNIT_AREA = 0.337325


def bunny_graph(seed=BUNNY_SEED, n=BUNNY_POINTS, radius=BUNNY_RADIUS):
    return proximity_graph(bunny_points(seed, n), radius)
