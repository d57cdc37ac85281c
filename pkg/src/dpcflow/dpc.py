"""Density Peaks Clustering with a delta/rho anomaly score.

Each point gets a local density ``rho`` (neighbours strictly closer than the
truncation distance ``d_c``, self excluded) and a separation ``delta`` (the
distance to the nearest point that comes earlier in the density ordering).
Points high in both become cluster centres, every other point joins the
cluster of its nearest denser neighbour, and ``delta / rho`` scores how
anomalous a point is.

Density ties are broken by index: the ordering is ``rho`` descending, then
index ascending, and "denser than i" means "earlier than i in that ordering".
"""

from dataclasses import asdict, dataclass, field
import json
import math

import numpy as np

from .distance import as_matrix, distance_matrix, iter_distance_blocks
from .errors import InvalidConfig, MissingNeighbor

SCORE_MODES = ("normalized", "raw")

#: batches up to this size keep the whole distance matrix in memory
#: (8 * m**2 bytes); larger ones recompute distances block by block
FULL_MATRIX_MAX_ROWS = 6000


@dataclass(frozen=True)
class DpcParams:
    """Detector thresholds. Defaults are the published experimental setup."""

    d_c: float = 0.15
    rho_min: float = 8.0
    delta_min: float = 0.18
    a_th: float = 1.4
    score_mode: str = "normalized"
    #: rows per independent detection batch; bounds the O(m^2) work
    batch_size: int = 10_000

    def __post_init__(self):
        for name in ("d_c", "rho_min", "delta_min", "a_th"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidConfig(f"dpc.{name} must be finite, got {value}")
        if self.d_c <= 0:
            raise InvalidConfig(f"dpc.d_c must be > 0, got {self.d_c}")
        if self.rho_min < 0 or self.delta_min < 0:
            raise InvalidConfig("dpc.rho_min and dpc.delta_min must be >= 0")
        if self.a_th <= 0:
            raise InvalidConfig(f"dpc.a_th must be > 0, got {self.a_th}")
        if self.score_mode not in SCORE_MODES:
            raise InvalidConfig(
                f"dpc.score_mode must be one of {SCORE_MODES}, got {self.score_mode!r}"
            )
        if self.batch_size < 1:
            raise InvalidConfig("dpc.batch_size must be >= 1")


@dataclass
class DpcState:
    rho: np.ndarray
    delta: np.ndarray
    #: nearest earlier point in ``order``; -1 for the densest point
    nneigh: np.ndarray
    order: np.ndarray


@dataclass
class DpcResult:
    state: DpcState
    centers: np.ndarray
    cluster_label: np.ndarray
    score: np.ndarray
    is_anomaly: np.ndarray
    params: dict = field(default_factory=dict)
    method_name: str = "dpc"

    def records(self):
        """Per-point dictionaries; infinite scores are rendered as ``"inf"``."""
        out = []
        for i in range(len(self.score)):
            s = float(self.score[i])
            out.append(
                {
                    "index": i,
                    "rho": int(self.state.rho[i]),
                    "delta": float(self.state.delta[i]),
                    "score": "inf" if math.isinf(s) else s,
                    "label": int(self.cluster_label[i]),
                    "is_anomaly": bool(self.is_anomaly[i]),
                }
            )
        return out

    def to_json(self):
        doc = {
            "method": self.method_name,
            "params": self.params,
            "centers": [int(c) for c in self.centers],
            "points": self.records(),
        }
        return json.dumps(doc, indent=2)


def pairwise_distances(x):
    """Full symmetric Euclidean distance matrix with an exact zero diagonal."""
    return distance_matrix(as_matrix(x))


def _matrix_blocks(dist, block_rows=512):
    m = dist.shape[0]
    for start in range(0, m, block_rows):
        stop = min(start + block_rows, m)
        yield start, stop, dist[start:stop]


def _density(blocks, m, d_c):
    rho = np.zeros(m, dtype=np.int64)
    for start, stop, block in blocks:
        # the diagonal (distance 0 < d_c) is always counted, so drop it
        rho[start:stop] = np.count_nonzero(block < d_c, axis=1) - 1
    return rho


def density_order(rho):
    """Indices sorted by density descending, index ascending."""
    rho = np.asarray(rho)
    return np.lexsort((np.arange(len(rho)), -rho))


def _delta(blocks, rho):
    m = len(rho)
    order = density_order(rho)
    rank = np.empty(m, dtype=np.int64)
    rank[order] = np.arange(m)
    delta = np.zeros(m)
    nneigh = np.full(m, -1, dtype=np.int64)
    top = order[0] if m else -1
    for start, stop, block in blocks:
        rows = np.arange(start, stop)
        masked = np.where(rank[None, :] < rank[rows, None], block, np.inf)
        # argmin picks the lowest column index among equal minima
        nn = np.argmin(masked, axis=1)
        delta[start:stop] = masked[np.arange(len(rows)), nn]
        nneigh[start:stop] = nn
        if start <= top < stop:
            row = block[top - start]
            delta[top] = row.max() if m > 1 else 0.0
            nneigh[top] = -1
    return DpcState(rho=rho, delta=delta, nneigh=nneigh, order=order)


def local_density(dist, d_c):
    """Count neighbours strictly within ``d_c`` of each point, self excluded."""
    dist = np.asarray(dist, dtype=float)
    return _density(_matrix_blocks(dist), dist.shape[0], d_c)


def delta_and_neighbors(dist, rho):
    """Separation from the nearest denser point, plus that point's index.

    The densest point has no neighbour; its delta is the largest distance to
    any point (0 for a single point). Distance ties go to the lower index.
    """
    dist = np.asarray(dist, dtype=float)
    rho = np.asarray(rho, dtype=np.int64)
    if dist.shape != (len(rho), len(rho)):
        raise ValueError("distance matrix and rho have different lengths")
    return _delta(_matrix_blocks(dist), rho)


def select_centers(state, rho_min, delta_min):
    picked = np.flatnonzero((state.rho >= rho_min) & (state.delta >= delta_min))
    if picked.size == 0:
        picked = np.array([int(np.argmax(state.rho * state.delta))])
    return picked


def assign_clusters(state, centers):
    """Label every point with the index of its cluster centre.

    Walks the density ordering once; each non-centre inherits the label of its
    nearest denser neighbour, which the ordering guarantees is already set.
    """
    m = len(state.rho)
    is_center = np.zeros(m, dtype=bool)
    is_center[np.asarray(centers, dtype=np.int64)] = True
    labels = np.full(m, -1, dtype=np.int64)
    nneigh = state.nneigh
    for i in state.order:
        if is_center[i]:
            labels[i] = i
            continue
        j = nneigh[i]
        if j < 0 or labels[j] < 0:
            raise MissingNeighbor(f"point {i} has no labelled denser neighbour")
        labels[i] = labels[j]
    return labels


def anomaly_scores(state, mode="normalized"):
    """``delta / rho`` per point; zero density gives an infinite score.

    In ``"normalized"`` mode both quantities are first divided by their
    maxima, which makes the score dimensionless and scale invariant.
    """
    rho = state.rho.astype(float)
    delta = state.delta.astype(float)
    if mode == "normalized":
        if rho.max(initial=0.0) > 0:
            rho = rho / rho.max()
        dmax = delta.max(initial=0.0)
        delta = delta / dmax if dmax > 0 else np.zeros_like(delta)
    elif mode != "raw":
        raise InvalidConfig(f"unknown score mode {mode!r}")
    score = np.full(len(rho), np.inf)
    dense = rho > 0
    score[dense] = delta[dense] / rho[dense]
    return score


def _detect_batch(x, params):
    m = x.shape[0]
    if m <= FULL_MATRIX_MAX_ROWS:
        dist = distance_matrix(x)
        rho = _density(_matrix_blocks(dist), m, params.d_c)
        state = _delta(_matrix_blocks(dist), rho)
    else:
        rho = _density(iter_distance_blocks(x, 256), m, params.d_c)
        state = _delta(iter_distance_blocks(x, 256), rho)
    centers = select_centers(state, params.rho_min, params.delta_min)
    labels = assign_clusters(state, centers)
    score = anomaly_scores(state, params.score_mode)
    is_anomaly = (state.rho == 0) | (score > params.a_th)
    labels[is_anomaly] = -1
    return state, centers, labels, score, is_anomaly


def detect(x, params=None):
    """Run the full detector on an ``m x n`` matrix.

    Inputs longer than ``params.batch_size`` are split into consecutive
    batches that are clustered independently; indices in the result (orders,
    neighbours, labels) are always global.
    """
    params = params or DpcParams()
    x = as_matrix(x)
    m = x.shape[0]
    if m < 1:
        raise ValueError("detect needs at least one point")
    parts = []
    for start in range(0, m, params.batch_size):
        stop = min(start + params.batch_size, m)
        state, centers, labels, score, flag = _detect_batch(x[start:stop], params)
        nneigh = np.where(state.nneigh >= 0, state.nneigh + start, -1)
        labels = np.where(labels >= 0, labels + start, -1)
        parts.append((state.rho, state.delta, nneigh, state.order + start,
                      centers + start, labels, score, flag))
    cols = [np.concatenate(c) for c in zip(*parts)]
    state = DpcState(rho=cols[0], delta=cols[1], nneigh=cols[2], order=cols[3])
    return DpcResult(
        state=state,
        centers=cols[4],
        cluster_label=cols[5],
        score=cols[6],
        is_anomaly=cols[7],
        params=asdict(params),
    )
