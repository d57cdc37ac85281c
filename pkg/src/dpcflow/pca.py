"""Principal component analysis by eigendecomposition of the covariance.

The covariance is the population form ``(1/m) sum (x - mu)(x - mu)^T``. The
number of kept components is the smallest count whose cumulative explained
variance exceeds ``variance_target``, capped by ``max_components`` and by
``min(m, p)``.
"""

from dataclasses import dataclass
import json
import warnings

import numpy as np

from .errors import (
    DegenerateVarianceWarning,
    DimensionMismatch,
    InputError,
    InvalidConfig,
    NonFinite,
    TooFewSamples,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    #: ``p x d``, orthonormal columns
    components: np.ndarray
    eigenvalues: np.ndarray
    explained_variance_ratio: np.ndarray
    total_variance: float
    degenerate: bool = False

    @property
    def n_components(self):
        return self.components.shape[1]

    def to_json(self):
        return json.dumps({
            "schema_version": SCHEMA_VERSION,
            "mean": self.mean.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.components.T.tolist(),
            "d": self.n_components,
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
            "total_variance": self.total_variance,
            "degenerate": self.degenerate,
        })

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise InputError(
                f"unsupported PCA schema_version {doc.get('schema_version')!r}"
            )
        mean = np.asarray(doc["mean"], dtype=float)
        comps = np.asarray(doc["eigenvectors"], dtype=float).reshape(-1, len(mean)).T
        return cls(
            mean=mean,
            components=comps,
            eigenvalues=np.asarray(doc["eigenvalues"], dtype=float),
            explained_variance_ratio=np.asarray(doc["explained_variance_ratio"], dtype=float),
            total_variance=float(doc["total_variance"]),
            degenerate=bool(doc.get("degenerate", False)),
        )


def covariance(x):
    x = np.asarray(x, dtype=float)
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / x.shape[0]
    return (cov + cov.T) / 2


def fit_pca(x, variance_target=0.95, max_components=50):
    """Fit a :class:`PcaModel` to the rows of ``x``.

    Parameters
    ----------
    x : array-like, shape (m, p)
        Samples in rows; needs ``m >= 2``.
    variance_target : float
        Keep the fewest leading components whose cumulative explained variance
        ratio is strictly greater than this, in ``(0, 1]``.
    max_components : int
        Hard upper bound on the retained dimension.

    Notes
    -----
    Eigenvector signs are fixed so the largest-magnitude entry of each one is
    nonnegative. All-constant data has no variance to explain; that case
    warns with :class:`DegenerateVarianceWarning` and keeps one component
    with ratio 1.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {x.shape}")
    m, p = x.shape
    if m < 2:
        raise TooFewSamples(f"PCA needs at least 2 samples, got {m}")
    if p < 1:
        raise DimensionMismatch("PCA needs at least one feature")
    if not np.all(np.isfinite(x)):
        raise NonFinite("PCA input contains NaN or infinite entries")
    if not 0 < variance_target <= 1:
        raise InvalidConfig(f"variance_target must be in (0, 1], got {variance_target}")
    if max_components < 1:
        raise InvalidConfig(f"max_components must be >= 1, got {max_components}")

    mean = x.mean(axis=0)
    cov = covariance(x)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(-vals, kind="stable")
    vals = np.clip(vals[order], 0.0, None)
    vecs = vecs[:, order]
    pivot = np.abs(vecs).argmax(axis=0)
    signs = np.where(vecs[pivot, np.arange(p)] < 0, -1.0, 1.0)
    vecs = vecs * signs

    total = float(np.trace(cov))
    if total <= 0:
        warnings.warn(
            "all features are constant; keeping a single component",
            DegenerateVarianceWarning,
            stacklevel=2,
        )
        return PcaModel(mean, vecs[:, :1], vals[:1], np.array([1.0]), 0.0, True)

    ratios = vals / total
    cumulative = np.cumsum(ratios)
    above = np.flatnonzero(cumulative > variance_target)
    d_target = int(above[0]) + 1 if above.size else p
    d = min(d_target, max_components, min(m, p))
    return PcaModel(mean, vecs[:, :d], vals[:d], ratios[:d], total)


def project(model, x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != len(model.mean):
        raise DimensionMismatch(
            f"PCA model expects {len(model.mean)} columns, got shape {x.shape}"
        )
    return (x - model.mean) @ model.components


def explained_variance(model):
    return model.explained_variance_ratio.copy()
