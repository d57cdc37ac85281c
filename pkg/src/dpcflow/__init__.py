"""Unsupervised anomaly detection for traffic streams.

Windowed statistical and spectral features, PCA, and a density peaks
clustering detector, plus K-Means, Isolation Forest and DBSCAN baselines.
"""

from .dpc import DpcParams, DpcResult, detect
from .ingest import LabeledDataset, SynthConfig, generate_synthetic
from .pca import PcaModel, fit_pca, project

__all__ = [
    "DpcParams",
    "DpcResult",
    "LabeledDataset",
    "PcaModel",
    "SynthConfig",
    "detect",
    "fit_pca",
    "generate_synthetic",
    "project",
]

__version__ = "0.1.0"
