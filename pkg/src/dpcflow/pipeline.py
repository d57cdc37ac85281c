"""End-to-end path from a labelled dataset to a detector verdict.

record mode: encoded rows -> min-max -> PCA -> detector
window mode: rows as a stream -> window features -> min-max -> PCA -> detector
"""

from dataclasses import asdict, dataclass, replace
import zlib

import numpy as np

from . import baselines, dpc
from .features import WindowConfig, assemble_features, segment_windows, window_labels
from .ingest import LabeledDataset, apply_minmax, fit_minmax
from .pca import fit_pca, project

MODES = ("record", "window")
METHODS = ("dpc", "kmeans", "iforest", "dbscan")

PARAM_TYPES = {
    "dpc": dpc.DpcParams,
    "kmeans": baselines.KMeansConfig,
    "iforest": baselines.IForestConfig,
    "dbscan": baselines.DbscanConfig,
}


def derive_seed(root, name):
    """Independent 64-bit seed for the named random stream under ``root``."""
    seq = np.random.SeedSequence([int(root), zlib.crc32(name.encode())])
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass
class Prepared:
    x: np.ndarray
    truth: np.ndarray
    feature_names: list
    n_components: int


def prepare(dataset, mode="record", window=None, top_k=5,
            variance_target=0.95, max_components=50):
    if mode == "window":
        windows = segment_windows(dataset.matrix, window or WindowConfig())
        feats, layout = assemble_features(windows, top_k, dataset.feature_names)
        dataset = LabeledDataset(feats, window_labels(windows, dataset.labels),
                                 layout, dataset.source)
    elif mode != "record":
        raise ValueError(f"unknown mode {mode!r}")
    scaled = apply_minmax(fit_minmax(dataset), dataset)
    model = fit_pca(scaled.matrix, variance_target, max_components)
    return Prepared(project(model, scaled.matrix), scaled.labels,
                    scaled.feature_names, model.n_components)


def dpc_verdict(x, params):
    result = dpc.detect(x, params)
    verdict = baselines.DetectorVerdict(result.is_anomaly, result.score, params.a_th,
                                        "dpc", asdict(params))
    return verdict, result


def run_method(method, x, params):
    """Run one detector; returns ``(verdict, dpc_result_or_None)``."""
    if method == "dpc":
        return dpc_verdict(x, params)
    if method == "kmeans":
        return baselines.kmeans_detect(x, params), None
    if method == "iforest":
        return baselines.iforest_detect(x, params), None
    if method == "dbscan":
        return baselines.dbscan_detect(x, params), None
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def with_overrides(params, overrides):
    return replace(params, **overrides) if overrides else params
