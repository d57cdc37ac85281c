"""Data-volume x method x parameter-setting sweeps.

Each volume gets its own deterministic dataset (a fresh synthetic draw, or a
seeded row subset of a file) which is prepared once and shared by every
(method, setting) cell, so methods are always compared on identical inputs.
"""

from dataclasses import dataclass, field
import csv
import io
import json
import logging

import numpy as np

from . import config as cfg
from .errors import DpcflowError
from .ingest import load_dataset
from .metrics import (
    accuracy,
    confusion,
    false_positive_rate,
    g_mean,
    undefined_rates,
)
from .pipeline import prepare, run_method

log = logging.getLogger(__name__)

CSV_COLUMNS = ["method", "setting", "volume", "tp", "tn", "fp", "fn",
               "accuracy", "g_mean", "fpr", "seed"]
METRIC_NAMES = ("accuracy", "g_mean", "fpr")


@dataclass
class MetricsReport:
    method_name: str
    setting: str
    data_volume: int
    seed: int
    params_echo: dict = field(default_factory=dict)
    confusion: object = None
    accuracy: float | None = None
    g_mean: float | None = None
    fpr: float | None = None
    flags: tuple = ()
    n_rows: int | None = None
    error: str | None = None

    @property
    def failed(self):
        return self.error is not None

    def as_dict(self):
        cm = self.confusion
        return {
            "method": self.method_name,
            "setting": self.setting,
            "volume": self.data_volume,
            "n_rows": self.n_rows,
            "seed": self.seed,
            "params": self.params_echo,
            "tp": cm.tp if cm else None,
            "tn": cm.tn if cm else None,
            "fp": cm.fp if cm else None,
            "fn": cm.fn if cm else None,
            "accuracy": self.accuracy,
            "g_mean": self.g_mean,
            "fpr": self.fpr,
            "flags": list(self.flags),
            "error": self.error,
        }


def score_verdict(verdict, truth, **meta):
    cm = confusion(verdict.is_anomaly, truth)
    return MetricsReport(
        method_name=verdict.method_name,
        params_echo=verdict.params_echo,
        confusion=cm,
        accuracy=accuracy(cm),
        g_mean=g_mean(cm),
        fpr=false_positive_rate(cm),
        flags=undefined_rates(cm),
        n_rows=cm.total,
        **meta,
    )


@dataclass
class SweepReport:
    cells: list
    settings: dict
    config: dict

    def sorted_cells(self):
        return sorted(self.cells, key=lambda c: (c.method_name, c.setting, c.data_volume))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in self.sorted_cells():
            row = c.as_dict()
            writer.writerow([_fmt(row[k]) for k in CSV_COLUMNS])
        return buf.getvalue()

    def metric_csv(self, metric):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["method", "setting", "volume", metric])
        for c in self.sorted_cells():
            writer.writerow([c.method_name, c.setting, c.data_volume,
                             _fmt(getattr(c, metric))])
        return buf.getvalue()

    def to_json(self):
        return json.dumps({
            "config": self.config,
            "settings": self.settings,
            "cells": [c.as_dict() for c in self.sorted_cells()],
        }, indent=2, sort_keys=True)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def volume_dataset(doc, volume):
    """The dataset for one abscissa point of the sweep."""
    stream = f"dataset/{volume}"
    source = doc["dataset"]["source"]
    if source == "synthetic":
        synth = doc["synth"]
        frac = synth["n_anomaly"] / (synth["n_normal"] + synth["n_anomaly"])
        n_anomaly = int(round(volume * frac))
        return load_dataset("synthetic", synth=cfg.synth_config(
            doc, volume - n_anomaly, n_anomaly, stream))
    full = load_dataset(source, doc["dataset"]["path"],
                        strict=doc["dataset"]["strict_categories"])
    if volume >= len(full):
        return full
    rng = np.random.default_rng(cfg.derive_seed(doc["seed"], stream))
    rows = np.sort(rng.choice(len(full), volume, replace=False))
    return full.subset(rows)


def run_sweep(doc):
    """Evaluate every configured (method, setting) at every volume.

    A cell that raises is kept as a failed :class:`MetricsReport` so one bad
    combination never aborts the sweep.
    """
    settings = doc["sweep"]["settings"]
    cells = []
    for volume in doc["sweep"]["volumes"]:
        log.info("volume %d", volume)
        try:
            data = volume_dataset(doc, volume)
            prepared = prepare(
                data, doc["dataset"]["mode"], cfg.window_config(doc),
                doc["window"]["top_k"], doc["pca"]["variance_target"],
                doc["pca"]["max_components"],
            )
            prep_error = None
        except (DpcflowError, ValueError) as exc:
            prepared, prep_error = None, f"{type(exc).__name__}: {exc}"
        for method in sorted(settings):
            for name in sorted(settings[method]):
                meta = dict(setting=name, data_volume=volume, seed=doc["seed"])
                params = cfg.method_params(doc, method, settings[method][name])
                if prepared is None:
                    cells.append(MetricsReport(method, error=prep_error, **meta))
                    continue
                try:
                    verdict, _ = run_method(method, prepared.x, params)
                    cells.append(score_verdict(verdict, prepared.truth, **meta))
                except (DpcflowError, ValueError) as exc:
                    log.warning("cell %s/%s/%d failed: %s", method, name, volume, exc)
                    cells.append(MetricsReport(method, error=f"{type(exc).__name__}: {exc}",
                                               **meta))
    return SweepReport(cells=cells, settings=settings, config=doc)
