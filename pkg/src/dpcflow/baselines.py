"""Reference detectors: K-Means distance, Isolation Forest and DBSCAN noise.

All three return a :class:`DetectorVerdict`, the same shape the DPC detector
is adapted to, so every method is scored by identical code.
"""

from dataclasses import asdict, dataclass, field
import json
import math

import numpy as np

from .distance import as_matrix, cross_distances, iter_distance_blocks
from .errors import InvalidConfig, TooFewPoints

EULER_GAMMA = 0.5772156649015329


@dataclass
class DetectorVerdict:
    is_anomaly: np.ndarray
    #: higher means more anomalous; ``score > threshold`` gives ``is_anomaly``
    score: np.ndarray
    threshold: float
    method_name: str
    params_echo: dict = field(default_factory=dict)

    def records(self):
        return [
            {
                "index": i,
                "score": "inf" if math.isinf(s) else float(s),
                "is_anomaly": bool(a),
            }
            for i, (s, a) in enumerate(zip(self.score, self.is_anomaly))
        ]

    def to_json(self):
        return json.dumps({
            "method": self.method_name,
            "params": self.params_echo,
            "threshold": self.threshold,
            "points": self.records(),
        }, indent=2)


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 8
    max_iters: int = 100
    quantile: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.max_iters < 1:
            raise InvalidConfig("kmeans.k and kmeans.max_iters must be >= 1")
        if not 0 < self.quantile < 1:
            raise InvalidConfig(f"kmeans.quantile must be in (0, 1), got {self.quantile}")


@dataclass(frozen=True)
class IForestConfig:
    n_trees: int = 100
    subsample: int = 256
    threshold: float = 0.6
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.subsample < 2:
            raise InvalidConfig("iforest.n_trees must be >= 1 and iforest.subsample >= 2")
        if not 0 < self.threshold <= 1:
            raise InvalidConfig(f"iforest.threshold must be in (0, 1], got {self.threshold}")


@dataclass(frozen=True)
class DbscanConfig:
    eps: float = 0.15
    min_pts: int = 8

    def __post_init__(self):
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise InvalidConfig(f"dbscan.eps must be > 0, got {self.eps}")
        if self.min_pts < 0:
            raise InvalidConfig(f"dbscan.min_pts must be >= 0, got {self.min_pts}")


# --- K-Means -----------------------------------------------------------------

def kmeans_plus_plus(x, k, rng):
    """Seed centroids by squared-distance-weighted sampling."""
    m = x.shape[0]
    chosen = [int(rng.integers(m))]
    nearest = cross_distances(x, x[chosen]).min(axis=1) ** 2
    for _ in range(1, k):
        total = nearest.sum()
        if total > 0:
            nxt = int(rng.choice(m, p=nearest / total))
        else:
            nxt = int(rng.integers(m))
        chosen.append(nxt)
        nearest = np.minimum(nearest, cross_distances(x, x[nxt:nxt + 1])[:, 0] ** 2)
    return x[chosen].copy()


def lloyd(x, centroids, max_iters):
    """Lloyd iterations from ``centroids``.

    Returns ``(centroids, assignment, objectives)`` where ``objectives`` holds
    the within-cluster sum of squares after every assignment step. Empty
    clusters keep their previous centroid.
    """
    assign = None
    objectives = []
    for _ in range(max_iters):
        dist = cross_distances(x, centroids)
        new_assign = dist.argmin(axis=1)
        objectives.append(float((dist[np.arange(len(x)), new_assign] ** 2).sum()))
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(len(centroids)):
            members = assign == c
            if members.any():
                centroids[c] = x[members].mean(axis=0)
    return centroids, assign, objectives


def nearest_rank_quantile(values, q):
    ordered = np.sort(values)
    rank = max(1, math.ceil(q * len(ordered)))
    return float(ordered[rank - 1])


def kmeans_detect(x, config=None):
    """Flag points farther from their centroid than the ``q``-quantile."""
    config = config or KMeansConfig()
    x = as_matrix(x)
    if x.shape[0] < config.k:
        raise TooFewPoints(f"k-means needs at least k={config.k} points, got {x.shape[0]}")
    rng = np.random.default_rng(config.seed)
    centroids = kmeans_plus_plus(x, config.k, rng)
    centroids, _, _ = lloyd(x, centroids, config.max_iters)
    score = cross_distances(x, centroids).min(axis=1)
    threshold = nearest_rank_quantile(score, config.quantile)
    return DetectorVerdict(score > threshold, score, threshold, "kmeans", asdict(config))


# --- Isolation Forest ----------------------------------------------------------

def average_path_length(n):
    """Mean unsuccessful-search path length in a binary search tree of ``n``."""
    if n > 2:
        return 2.0 * (math.log(n - 1) + EULER_GAMMA) - 2.0 * (n - 1) / n
    if n == 2:
        return 1.0
    return 0.0


class IsolationTree:
    """One random isolation tree, stored as flat node arrays."""

    def __init__(self, x, height_limit, rng):
        self.feature = []
        self.split = []
        self.children = []
        self.size = []
        self._grow(x, height_limit, rng)

    def _new_node(self, size):
        self.feature.append(-1)
        self.split.append(0.0)
        self.children.append((-1, -1))
        self.size.append(size)
        return len(self.size) - 1

    def _grow(self, x, height_limit, rng):
        stack = [(self._new_node(len(x)), x, 0)]
        while stack:
            node, data, depth = stack.pop()
            if depth >= height_limit or len(data) <= 1:
                continue
            lo, hi = data.min(axis=0), data.max(axis=0)
            # constant attributes cannot separate anything
            splittable = np.flatnonzero(hi > lo)
            if splittable.size == 0:
                continue
            q = int(rng.choice(splittable))
            p = float(rng.uniform(lo[q], hi[q]))
            go_left = data[:, q] < p
            left = self._new_node(int(go_left.sum()))
            right = self._new_node(len(data) - int(go_left.sum()))
            self.feature[node], self.split[node] = q, p
            self.children[node] = (left, right)
            stack.append((left, data[go_left], depth + 1))
            stack.append((right, data[~go_left], depth + 1))

    def path_lengths(self, x):
        out = np.zeros(len(x))
        stack = [(0, np.arange(len(x)), 0)]
        while stack:
            node, idx, depth = stack.pop()
            left, right = self.children[node]
            if left < 0:
                out[idx] = depth + average_path_length(self.size[node])
                continue
            go_left = x[idx, self.feature[node]] < self.split[node]
            stack.append((left, idx[go_left], depth + 1))
            stack.append((right, idx[~go_left], depth + 1))
        return out


def iforest_scores(x, config):
    m = x.shape[0]
    psi = min(config.subsample, m)
    height_limit = math.ceil(math.log2(psi))
    total = np.zeros(m)
    for child in np.random.SeedSequence(config.seed).spawn(config.n_trees):
        rng = np.random.default_rng(child)
        sample = x[rng.choice(m, psi, replace=False)]
        total += IsolationTree(sample, height_limit, rng).path_lengths(x)
    return 2.0 ** (-(total / config.n_trees) / average_path_length(psi))


def iforest_detect(x, config=None):
    config = config or IForestConfig()
    x = as_matrix(x)
    if x.shape[0] < 2:
        raise TooFewPoints("isolation forest needs at least 2 points")
    score = iforest_scores(x, config)
    return DetectorVerdict(score > config.threshold, score, config.threshold,
                           "iforest", asdict(config))


# --- DBSCAN --------------------------------------------------------------------

def dbscan_labels(x, config):
    """Cluster ids per point, ``-1`` for noise.

    Neighbourhoods are closed balls of radius ``eps``; a point does not count
    itself, so a core point has at least ``min_pts`` *other* points nearby.
    """
    x = as_matrix(x)
    m = x.shape[0]
    counts = np.zeros(m, dtype=np.int64)
    for start, stop, block in iter_distance_blocks(x):
        counts[start:stop] = np.count_nonzero(block <= config.eps, axis=1) - 1
    core = counts >= config.min_pts
    labels = np.full(m, -1, dtype=np.int64)
    cluster = 0
    for seed_point in np.flatnonzero(core):
        if labels[seed_point] >= 0:
            continue
        labels[seed_point] = cluster
        frontier = [seed_point]
        while frontier:
            p = frontier.pop()
            near = np.flatnonzero(cross_distances(x[p:p + 1], x)[0] <= config.eps)
            fresh = near[labels[near] < 0]
            labels[fresh] = cluster
            frontier.extend(fresh[core[fresh]].tolist())
        cluster += 1
    return labels


def dbscan_detect(x, config=None):
    config = config or DbscanConfig()
    noise = dbscan_labels(x, config) < 0
    return DetectorVerdict(noise, noise.astype(float), 0.5, "dbscan", asdict(config))
