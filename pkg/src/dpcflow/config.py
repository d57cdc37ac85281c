"""Run configuration: one JSON document, every key defaulted.

The defaults reproduce the published experimental setup (DPC with
``d_c=0.15``, ``rho=8``, ``delta=0.18``, ``A_th=1.4`` on at most 50 principal
components). Randomness is derived from the root ``seed`` through named
streams, so changing one method never shifts another's draws.
"""

import copy
from dataclasses import asdict
import json
from pathlib import Path

from .baselines import DbscanConfig, IForestConfig, KMeansConfig
from .dpc import DpcParams
from .errors import InvalidConfig
from .features import WindowConfig
from .ingest import SOURCES, SynthConfig
from .pipeline import METHODS, MODES, PARAM_TYPES, derive_seed

DEFAULT_SEED = 20240917

DEFAULT_SETTINGS = {
    "dpc": {
        "Setting 1": {},
        "Setting 2": {"d_c": 0.12, "rho_min": 6, "delta_min": 0.15, "a_th": 1.2},
        "Setting 3": {"d_c": 0.18, "rho_min": 10, "delta_min": 0.21, "a_th": 1.6},
    },
    "kmeans": {"default": {}},
    "iforest": {"default": {}},
    "dbscan": {"default": {}},
}

DEFAULTS = {
    "seed": DEFAULT_SEED,
    "detector": "dpc",
    "dataset": {
        "source": "synthetic",
        "path": None,
        "mode": "record",
        "strict_categories": True,
    },
    "synth": {k: v for k, v in asdict(SynthConfig()).items() if k != "seed"},
    "window": {"length": 16, "stride": None, "top_k": 5},
    "pca": {"variance_target": 0.95, "max_components": 50},
    "dpc": asdict(DpcParams()),
    "kmeans": {**asdict(KMeansConfig()), "seed": None},
    "iforest": {**asdict(IForestConfig()), "seed": None},
    "dbscan": asdict(DbscanConfig()),
    "sweep": {"volumes": [1000, 2000, 5000, 10000], "settings": DEFAULT_SETTINGS},
}

# subtrees whose keys are user-chosen names rather than fixed options
_FREE_FORM = {("sweep", "settings")}


def _merge(base, update, path=()):
    for key, value in update.items():
        where = ".".join(path + (key,))
        if key not in base:
            raise InvalidConfig(f"unknown config key {where!r}")
        if path + (key,) in _FREE_FORM:
            if not isinstance(value, dict):
                raise InvalidConfig(f"{where} must be an object")
            base[key] = copy.deepcopy(value)
        elif isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise InvalidConfig(f"{where} must be an object")
            _merge(base[key], value, path + (key,))
        else:
            _check_type(where, base[key], value)
            base[key] = value


def _check_type(where, default, value):
    if default is None:
        return
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = _is_int(value)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    else:
        ok = isinstance(value, type(default))
    if not ok:
        raise InvalidConfig(
            f"{where} must be of type {type(default).__name__}, got {value!r}"
        )


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_set(doc, assignment):
    """Apply one ``dotted.key=value`` override; values are parsed as JSON
    when possible and kept as strings otherwise."""
    if "=" not in assignment:
        raise InvalidConfig(f"--set expects key=value, got {assignment!r}")
    key, text = assignment.split("=", 1)
    parts = key.strip().split(".")
    update = _parse_value(text)
    for part in reversed(parts):
        update = {part: update}
    _merge(doc, update)


def resolve(user=None, sets=()):
    doc = copy.deepcopy(DEFAULTS)
    if user:
        if not isinstance(user, dict):
            raise InvalidConfig("config file must contain a JSON object")
        _merge(doc, user)
    for assignment in sets:
        apply_set(doc, assignment)
    validate(doc)
    return doc


def load(path=None, sets=()):
    user = None
    if path is not None:
        try:
            user = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"config {path} is not valid JSON: {exc}") from exc
    return resolve(user, sets)


def _build(kind, fn, **kwargs):
    try:
        return fn(**kwargs)
    except TypeError as exc:
        raise InvalidConfig(f"bad value in {kind}: {exc}") from None


def synth_config(doc, n_normal=None, n_anomaly=None, stream="dataset"):
    params = dict(doc["synth"])
    if n_normal is not None:
        params.update(n_normal=n_normal, n_anomaly=n_anomaly)
    return _build("synth", SynthConfig, seed=derive_seed(doc["seed"], stream), **params)


def window_config(doc):
    w = doc["window"]
    return _build("window", WindowConfig, length=w["length"], stride=w["stride"])


def method_params(doc, method, overrides=None):
    if method not in PARAM_TYPES:
        raise InvalidConfig(f"unknown method {method!r}; expected one of {METHODS}")
    params = {**doc[method], **(overrides or {})}
    unknown = set(params) - set(DEFAULTS[method])
    if unknown:
        raise InvalidConfig(f"unknown {method} parameter(s): {sorted(unknown)}")
    if "seed" in params and params["seed"] is None:
        params["seed"] = derive_seed(doc["seed"], method)
    return _build(method, PARAM_TYPES[method], **params)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def validate(doc):
    """Raise :class:`InvalidConfig` on the first violated constraint."""
    if not _is_int(doc["seed"]) or not 0 <= doc["seed"] < 2 ** 64:
        raise InvalidConfig("seed must be a 64-bit unsigned integer")
    if doc["detector"] not in METHODS:
        raise InvalidConfig(f"detector must be one of {METHODS}")
    ds = doc["dataset"]
    if ds["source"] not in SOURCES:
        raise InvalidConfig(f"dataset.source must be one of {SOURCES}")
    if ds["mode"] not in MODES:
        raise InvalidConfig(f"dataset.mode must be one of {MODES}")
    if ds["source"] != "synthetic":
        if not ds["path"]:
            raise InvalidConfig(f"dataset.path is required for source {ds['source']!r}")
        if not Path(ds["path"]).is_file():
            raise InvalidConfig(f"dataset.path does not exist: {ds['path']}")
    synth_config(doc)
    window_config(doc)
    if not _is_int(doc["window"]["top_k"]) or doc["window"]["top_k"] < 1:
        raise InvalidConfig("window.top_k must be an integer >= 1")
    if ds["mode"] == "window" and doc["window"]["length"] < 3:
        raise InvalidConfig("window.length must be >= 3 in window mode (skewness)")
    pca = doc["pca"]
    if not isinstance(pca["variance_target"], (int, float)) or not 0 < pca["variance_target"] <= 1:
        raise InvalidConfig("pca.variance_target must be in (0, 1]")
    if not _is_int(pca["max_components"]) or pca["max_components"] < 1:
        raise InvalidConfig("pca.max_components must be an integer >= 1")
    for method in METHODS:
        method_params(doc, method)
    sweep = doc["sweep"]
    vols = sweep["volumes"]
    if not isinstance(vols, list) or not vols or not all(_is_int(v) and v >= 2 for v in vols):
        raise InvalidConfig("sweep.volumes must be a non-empty list of integers >= 2")
    if len(set(vols)) != len(vols):
        raise InvalidConfig("sweep.volumes contains duplicates")
    for method, settings in sweep["settings"].items():
        if not isinstance(settings, dict) or not settings:
            raise InvalidConfig(f"sweep.settings.{method} must be a non-empty object")
        for name, overrides in settings.items():
            if not isinstance(overrides, dict):
                raise InvalidConfig(f"sweep.settings.{method}.{name} must be an object")
            method_params(doc, method, overrides)
