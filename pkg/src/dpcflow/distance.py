"""Euclidean distances shared by the DPC detector and the baselines.

Squared differences are accumulated one coordinate at a time, in column
order, so every pair (i, j) gets the same rounding regardless of how the
rows are blocked. This keeps blocked and full computations bitwise equal.
"""

import numpy as np

from .errors import NonFinite

#: rows per block; small blocks keep the working set in cache
BLOCK_ROWS = 64


def as_matrix(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("matrix contains NaN or infinite entries")
    return x


def cross_distances(a, b):
    """Distances between every row of ``a`` and every row of ``b``."""
    a = np.asarray(a, dtype=float)
    bt = np.ascontiguousarray(np.asarray(b, dtype=float).T)
    acc = np.zeros((a.shape[0], bt.shape[1]))
    tmp = np.empty_like(acc)
    for k in range(a.shape[1]):
        np.subtract(a[:, k, None], bt[k], out=tmp)
        np.multiply(tmp, tmp, out=tmp)
        acc += tmp
    return np.sqrt(acc, out=acc)


def distance_matrix(x, block_rows=BLOCK_ROWS):
    """Full ``m x m`` matrix, computed on the upper triangle and mirrored."""
    m = x.shape[0]
    d = np.empty((m, m))
    for start in range(0, m, block_rows):
        stop = min(start + block_rows, m)
        block = cross_distances(x[start:stop], x[start:])
        d[start:stop, start:] = block
        d[start:, start:stop] = block.T
    np.fill_diagonal(d, 0.0)
    return d


def iter_distance_blocks(x, block_rows=BLOCK_ROWS):
    """Yield ``(start, stop, block)`` with ``block = d(x[start:stop], x)``."""
    m = x.shape[0]
    for start in range(0, m, block_rows):
        stop = min(start + block_rows, m)
        yield start, stop, cross_distances(x[start:stop], x)
