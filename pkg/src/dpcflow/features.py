"""Windowed time-domain moments and frequency-domain features of a stream.

A stream is an ``m x n`` matrix whose rows are consecutive samples. It is cut
into fixed-length windows, and every column of every window is summarised by
its mean, population variance, skewness, the largest non-DC spectral
magnitudes and the total non-DC power.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptySeries,
    HeterogeneousWindows,
    InvalidConfig,
    StreamTooShort,
    WindowTooSmall,
)

DEFAULT_TOP_K = 5


@dataclass(frozen=True)
class WindowConfig:
    length: int = 16
    #: ``None`` means tumbling windows (stride equal to the window length)
    stride: int | None = None

    def __post_init__(self):
        if self.length < 1:
            raise InvalidConfig(f"window.length must be >= 1, got {self.length}")
        if self.stride is not None and self.stride < 1:
            raise InvalidConfig(f"window.stride must be >= 1, got {self.stride}")

    @property
    def step(self):
        return self.length if self.stride is None else self.stride


@dataclass
class TimeWindow:
    start_index: int
    data: np.ndarray


@dataclass
class WindowStats:
    mean: np.ndarray
    variance: np.ndarray
    skewness: np.ndarray


@dataclass
class Spectrum:
    coefficients: np.ndarray
    magnitudes: np.ndarray
    psd: np.ndarray


def segment_windows(matrix, config):
    """Cut ``matrix`` into full windows starting at ``0, step, 2*step, ...``.

    A trailing partial window is dropped.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    m = matrix.shape[0]
    if m < config.length:
        raise StreamTooShort(
            f"stream has {m} samples, window needs {config.length}"
        )
    starts = range(0, m - config.length + 1, config.step)
    return [TimeWindow(s, matrix[s:s + config.length]) for s in starts]


def compute_moments(window):
    """Column-wise mean, population variance and skewness of one window.

    Skewness uses the ``N / ((N-1)(N-2))`` prefactor with population standard
    deviation, and is 0 for a constant column.
    """
    data = window.data if isinstance(window, TimeWindow) else window
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    n_t = data.shape[0]
    if n_t < 3:
        raise WindowTooSmall(f"skewness needs at least 3 samples, got {n_t}")
    mean = data.mean(axis=0)
    centered = data - mean
    variance = (centered ** 2).mean(axis=0)
    # rounding in the mean must not turn a constant column into noise
    constant = np.ptp(data, axis=0) == 0
    mean[constant] = data[0, constant]
    variance[constant] = 0.0
    sigma = np.sqrt(variance)
    skew = np.zeros_like(mean)
    ok = sigma > 0
    z = centered[:, ok] / sigma[ok]
    skew[ok] = n_t / ((n_t - 1) * (n_t - 2)) * (z ** 3).sum(axis=0)
    return WindowStats(mean=mean, variance=variance, skewness=skew)


def _spectrum(coefficients, n_t):
    magnitudes = np.abs(coefficients)
    return Spectrum(coefficients, magnitudes, magnitudes ** 2 / n_t)


def dft_direct(series):
    """Literal ``X(f) = sum_t x_t exp(-2j pi f t / N)``, O(N^2)."""
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise EmptySeries("cannot transform an empty series")
    n_t = x.size
    t = np.arange(n_t)
    # reduce f*t mod N first so large products keep full phase precision
    kernel = np.exp(-2j * np.pi * (np.outer(t, t) % n_t) / n_t)
    return _spectrum(kernel @ x, n_t)


def dft(series):
    """Discrete Fourier transform of a real series via FFT."""
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise EmptySeries("cannot transform an empty series")
    return _spectrum(np.fft.fft(x), x.size)


def spectral_features(spectrum, k=DEFAULT_TOP_K):
    """Top-``k`` magnitudes and total power over bins ``1 .. N//2``.

    The DC bin is left out because it only restates the mean. Magnitudes are
    sorted descending (lower frequency first on ties) and zero padded.
    """
    if k < 1:
        raise InvalidConfig(f"top-k must be >= 1, got {k}")
    n_t = len(spectrum.magnitudes)
    usable = spectrum.magnitudes[1:n_t // 2 + 1]
    ranked = usable[np.argsort(-usable, kind="stable")][:k]
    top = np.zeros(k)
    top[:len(ranked)] = ranked
    total_psd = float(spectrum.psd[1:n_t // 2 + 1].sum())
    return top, total_psd


def feature_layout(column_names, k=DEFAULT_TOP_K):
    names = []
    for col in column_names:
        names += [f"{col}_mean", f"{col}_var", f"{col}_skew"]
        names += [f"{col}_mag{r + 1}" for r in range(k)]
        names.append(f"{col}_psd")
    return names


def window_features(window, k=DEFAULT_TOP_K):
    """One flat feature row: per column, moments then spectral features."""
    stats = compute_moments(window)
    data = np.asarray(window.data, dtype=float)
    row = []
    for j in range(data.shape[1]):
        top, total = spectral_features(dft(data[:, j]), k)
        row.append(np.concatenate(
            [[stats.mean[j], stats.variance[j], stats.skewness[j]], top, [total]]
        ))
    return np.concatenate(row)


def assemble_features(windows, k=DEFAULT_TOP_K, column_names=None):
    """Stack window features into an ``m_w x n(4+k)`` matrix plus its layout."""
    if not windows:
        raise StreamTooShort("no windows to assemble")
    shape = windows[0].data.shape
    for w in windows:
        if w.data.shape != shape:
            raise HeterogeneousWindows(
                f"window at {w.start_index} has shape {w.data.shape}, expected {shape}"
            )
    if column_names is None:
        column_names = [f"x{j}" for j in range(shape[1])]
    matrix = np.vstack([window_features(w, k) for w in windows])
    return matrix, feature_layout(column_names, k)


def window_labels(windows, labels):
    """A window is anomalous when any of its samples is."""
    labels = np.asarray(labels, dtype=bool)
    return np.array(
        [labels[w.start_index:w.start_index + len(w.data)].any() for w in windows]
    )
