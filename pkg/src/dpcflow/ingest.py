"""Loading, encoding and normalising labelled traffic datasets.

Two public intrusion benchmarks are supported in their published CSV layouts:

* NSL-KDD (``KDDTrain+.txt`` style): 41 features, the label, and an optional
  trailing difficulty score. No header.
* UNSW-NB15 training/testing partitions: ``id``, 42 features, ``attack_cat``
  and a binary ``label``. The header row is optional.

Both are reduced to a binary task: every label other than ``normal`` is an
anomaly.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyDataset,
    InputError,
    InvalidConfig,
    MalformedRow,
    NonFinite,
    UnknownCategory,
)

SOURCES = ("nsl_kdd", "unsw_nb15", "synthetic", "csv")

NSL_KDD_FEATURES = [
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in",
    "num_compromised", "root_shell", "su_attempted", "num_root",
    "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds",
    "is_host_login", "is_guest_login", "count", "srv_count", "serror_rate",
    "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
    "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate", "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
]

NSL_KDD_CATEGORIES = {
    "protocol_type": ("tcp", "udp", "icmp"),
    "service": (
        "aol", "auth", "bgp", "courier", "csnet_ns", "ctf", "daytime", "discard",
        "domain", "domain_u", "echo", "eco_i", "ecr_i", "efs", "exec", "finger",
        "ftp", "ftp_data", "gopher", "harvest", "hostnames", "http",
        "http_2784", "http_443", "http_8001", "imap4", "IRC", "iso_tsap",
        "klogin", "kshell", "ldap", "link", "login", "mtp", "name",
        "netbios_dgm", "netbios_ns", "netbios_ssn", "netstat", "nnsp", "nntp",
        "ntp_u", "other", "pm_dump", "pop_2", "pop_3", "printer", "private",
        "red_i", "remote_job", "rje", "shell", "smtp", "sql_net", "ssh",
        "sunrpc", "supdup", "systat", "telnet", "tftp_u", "tim_i", "time",
        "urh_i", "urp_i", "uucp", "uucp_path", "vmnet", "whois", "X11",
        "Z39_50",
    ),
    "flag": (
        "OTH", "REJ", "RSTO", "RSTOS0", "RSTR", "S0", "S1", "S2", "S3", "SF", "SH",
    ),
}

UNSW_NB15_COLUMNS = [
    "id", "dur", "proto", "service", "state", "spkts", "dpkts", "sbytes",
    "dbytes", "rate", "sttl", "dttl", "sload", "dload", "sloss", "dloss",
    "sinpkt", "dinpkt", "sjit", "djit", "swin", "stcpb", "dtcpb", "dwin",
    "tcprtt", "synack", "ackdat", "smean", "dmean", "trans_depth",
    "response_body_len", "ct_srv_src", "ct_state_ttl", "ct_dst_ltm",
    "ct_src_dport_ltm", "ct_dst_sport_ltm", "ct_dst_src_ltm", "is_ftp_login",
    "ct_ftp_cmd", "ct_flw_http_mthd", "ct_src_ltm", "ct_srv_dst",
    "is_sm_ips_ports", "attack_cat", "label",
]
UNSW_NB15_FEATURES = UNSW_NB15_COLUMNS[1:-2]
UNSW_NB15_CATEGORICAL = ("proto", "service", "state")


@dataclass
class RawRecord:
    values: list
    label_text: str
    line_no: int = 0


@dataclass
class RawDataset:
    """Records as read from disk, before numeric encoding."""

    records: list
    feature_names: list
    categorical: tuple
    source: str


@dataclass
class LabeledDataset:
    matrix: np.ndarray
    #: True marks an anomaly
    labels: np.ndarray
    feature_names: list
    source: str = "csv"

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.labels = np.asarray(self.labels, dtype=bool)
        if self.matrix.ndim != 2 or self.matrix.shape[0] < 1 or self.matrix.shape[1] < 1:
            raise EmptyDataset(f"dataset must be a non-empty matrix, got {self.matrix.shape}")
        if not np.all(np.isfinite(self.matrix)):
            raise NonFinite("dataset contains NaN or infinite entries")
        if self.labels.shape != (self.matrix.shape[0],):
            raise DimensionMismatch("labels length does not match the row count")
        if len(self.feature_names) != self.matrix.shape[1]:
            raise DimensionMismatch("feature_names length does not match the column count")

    def __len__(self):
        return self.matrix.shape[0]

    def subset(self, rows):
        return LabeledDataset(self.matrix[rows], self.labels[rows],
                              list(self.feature_names), self.source)


@dataclass(frozen=True)
class ColumnRule:
    name: str
    #: ``None`` for a numeric passthrough column, else the one-hot categories
    categories: tuple | None = None

    def __post_init__(self):
        if self.categories is not None:
            if not self.categories:
                raise InvalidConfig(f"column {self.name!r} has no categories")
            if len(set(self.categories)) != len(self.categories):
                raise InvalidConfig(f"column {self.name!r} has duplicate categories")


@dataclass(frozen=True)
class EncodingSpec:
    columns: tuple
    #: label strings mapped to Normal; every other label is an anomaly
    normal_labels: frozenset = field(default_factory=lambda: frozenset({"normal"}))

    def feature_names(self):
        names = []
        for rule in self.columns:
            if rule.categories is None:
                names.append(rule.name)
            else:
                names += [f"{rule.name}={c}" for c in rule.categories]
        return names


def _read_rows(path):
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise EmptyDataset(f"{path} contains no rows")
    return rows


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_nsl_kdd(path):
    """Read an NSL-KDD file; rows keep file order, difficulty is dropped."""
    records = []
    for line_no, row in _read_rows(path):
        if len(row) not in (42, 43):
            raise MalformedRow(line_no, f"expected 42 or 43 fields, got {len(row)}")
        fields = [f.strip() for f in row]
        records.append(RawRecord(fields[:41], fields[41], line_no))
    return RawDataset(records, list(NSL_KDD_FEATURES),
                      tuple(NSL_KDD_CATEGORIES), "nsl_kdd")


def load_unsw_nb15(path):
    """Read a UNSW-NB15 partition file; the binary label becomes
    ``"normal"`` (0) or ``"attack"`` (1)."""
    rows = _read_rows(path)
    if not _is_number(rows[0][1][0].strip()):
        rows = rows[1:]
        if not rows:
            raise EmptyDataset(f"{path} has a header but no data rows")
    records = []
    width = len(UNSW_NB15_COLUMNS)
    for line_no, row in rows:
        if len(row) != width:
            raise MalformedRow(line_no, f"expected {width} fields, got {len(row)}")
        fields = [f.strip() for f in row]
        flag = fields[-1]
        if flag not in ("0", "1"):
            raise MalformedRow(line_no, f"label must be 0 or 1, got {flag!r}")
        records.append(RawRecord(fields[1:-2], "normal" if flag == "0" else "attack",
                                 line_no))
    return RawDataset(records, list(UNSW_NB15_FEATURES),
                      UNSW_NB15_CATEGORICAL, "unsw_nb15")


def infer_encoding(raw):
    """Encoding whose categories are the sorted values seen in ``raw``."""
    rules = []
    for j, name in enumerate(raw.feature_names):
        if name in raw.categorical:
            cats = tuple(sorted({r.values[j] for r in raw.records}))
            rules.append(ColumnRule(name, cats))
        else:
            rules.append(ColumnRule(name))
    return EncodingSpec(tuple(rules))


def default_encoding(raw):
    """Published category lists for NSL-KDD; observed categories otherwise."""
    if raw.source == "nsl_kdd":
        return EncodingSpec(tuple(
            ColumnRule(n, NSL_KDD_CATEGORIES.get(n)) for n in NSL_KDD_FEATURES
        ))
    return infer_encoding(raw)


def encode(raw, spec, strict=True):
    """Turn raw records into a numeric :class:`LabeledDataset`.

    Categorical columns expand into one indicator column per category. With
    ``strict=False`` an unknown category encodes as an all-zero block instead
    of raising :class:`UnknownCategory`.
    """
    if len(spec.columns) != len(raw.feature_names):
        raise DimensionMismatch(
            f"encoding has {len(spec.columns)} columns, data has {len(raw.feature_names)}"
        )
    if not raw.records:
        raise EmptyDataset("no records to encode")
    lookups = [
        None if rule.categories is None else {c: k for k, c in enumerate(rule.categories)}
        for rule in spec.columns
    ]
    width = len(spec.feature_names())
    matrix = np.zeros((len(raw.records), width))
    labels = np.zeros(len(raw.records), dtype=bool)
    for i, rec in enumerate(raw.records):
        if len(rec.values) != len(spec.columns):
            raise MalformedRow(rec.line_no, "field count does not match the encoding")
        pos = 0
        for rule, lookup, value in zip(spec.columns, lookups, rec.values):
            if lookup is None:
                try:
                    matrix[i, pos] = float(value)
                except ValueError:
                    raise MalformedRow(
                        rec.line_no, f"non-numeric value {value!r} in {rule.name}"
                    ) from None
                pos += 1
                continue
            k = lookup.get(value)
            if k is not None:
                matrix[i, pos + k] = 1.0
            elif strict:
                raise UnknownCategory(rule.name, value)
            pos += len(lookup)
        labels[i] = rec.label_text not in spec.normal_labels
    return LabeledDataset(matrix, labels, spec.feature_names(), raw.source)


@dataclass(frozen=True)
class MinMaxScaler:
    minimum: np.ndarray
    maximum: np.ndarray


def fit_minmax(dataset):
    matrix = dataset.matrix if isinstance(dataset, LabeledDataset) else np.asarray(dataset, float)
    return MinMaxScaler(matrix.min(axis=0), matrix.max(axis=0))


def apply_minmax(scaler, dataset):
    """Scale columns to ``(v - min) / (max - min)``.

    Values outside the fitted range are not clamped. Constant columns
    (``min == max``) map to 0.
    """
    labeled = isinstance(dataset, LabeledDataset)
    matrix = dataset.matrix if labeled else np.asarray(dataset, float)
    if matrix.shape[1] != len(scaler.minimum):
        raise DimensionMismatch(
            f"scaler fitted on {len(scaler.minimum)} columns, got {matrix.shape[1]}"
        )
    span = scaler.maximum - scaler.minimum
    safe = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (matrix - scaler.minimum) / safe, 0.0)
    if not labeled:
        return scaled
    return LabeledDataset(scaled, dataset.labels.copy(),
                          list(dataset.feature_names), dataset.source)


@dataclass(frozen=True)
class SynthConfig:
    """Imbalanced mixture: Gaussian blobs of normal traffic plus uniform
    outliers. The defaults are the reference dataset used for regression."""

    n_normal: int = 1980
    n_anomaly: int = 20
    dims: int = 10
    n_clusters: int = 3
    cluster_spread: float = 0.05
    outlier_low: float = -0.5
    outlier_high: float = 1.5
    seed: int = 20240917

    def __post_init__(self):
        if self.n_normal < 1:
            raise InvalidConfig(f"synth.n_normal must be >= 1, got {self.n_normal}")
        if not 0 <= self.n_anomaly <= self.n_normal:
            raise InvalidConfig("synth.n_anomaly must be in [0, n_normal]")
        if self.dims < 1 or self.n_clusters < 1:
            raise InvalidConfig("synth.dims and synth.n_clusters must be >= 1")
        if not self.cluster_spread > 0:
            raise InvalidConfig("synth.cluster_spread must be > 0")
        if not self.outlier_low < self.outlier_high:
            raise InvalidConfig("synth.outlier_low must be below synth.outlier_high")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfig("synth.seed must be a 64-bit unsigned integer")


def generate_synthetic(config):
    """Draw a labelled stream from ``config``; fully determined by its seed.

    Normal points are split evenly across the blobs, whose centres are drawn
    from the unit hypercube. The rows are shuffled so anomalies are spread
    through the stream.
    """
    rng = np.random.default_rng(config.seed)
    centers = rng.random((config.n_clusters, config.dims))
    blob = np.arange(config.n_normal) % config.n_clusters
    normal = centers[blob] + rng.normal(0.0, config.cluster_spread,
                                        (config.n_normal, config.dims))
    outliers = rng.uniform(config.outlier_low, config.outlier_high,
                           (config.n_anomaly, config.dims))
    matrix = np.vstack([normal, outliers])
    labels = np.r_[np.zeros(config.n_normal, bool), np.ones(config.n_anomaly, bool)]
    perm = rng.permutation(len(labels))
    names = [f"x{j}" for j in range(config.dims)]
    return LabeledDataset(matrix[perm], labels[perm], names, "synthetic")


def write_dataset_csv(dataset, path):
    """Canonical dump: header of feature names plus ``label`` (0/1)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(dataset.feature_names) + ["label"])
        for row, flag in zip(dataset.matrix, dataset.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(flag)])


def read_dataset_csv(path):
    rows = _read_rows(path)
    header = rows[0][1]
    if len(header) < 2 or header[-1] != "label":
        raise MalformedRow(rows[0][0], "header must end with a 'label' column")
    body = rows[1:]
    if not body:
        raise EmptyDataset(f"{path} has a header but no data rows")
    matrix = np.empty((len(body), len(header) - 1))
    labels = np.empty(len(body), dtype=bool)
    for i, (line_no, row) in enumerate(body):
        if len(row) != len(header):
            raise MalformedRow(line_no, f"expected {len(header)} fields, got {len(row)}")
        try:
            matrix[i] = [float(v) for v in row[:-1]]
        except ValueError:
            raise MalformedRow(line_no, "non-numeric feature value") from None
        if row[-1] not in ("0", "1"):
            raise MalformedRow(line_no, f"label must be 0 or 1, got {row[-1]!r}")
        labels[i] = row[-1] == "1"
    return LabeledDataset(matrix, labels, header[:-1], "csv")


def load_dataset(source, path=None, synth=None, strict=True):
    """Load any supported source into an encoded, unscaled dataset."""
    if source == "synthetic":
        return generate_synthetic(synth or SynthConfig())
    if path is None:
        raise InvalidConfig(f"source {source!r} needs a dataset path")
    if source == "csv":
        return read_dataset_csv(path)
    if source == "nsl_kdd":
        raw = load_nsl_kdd(path)
    elif source == "unsw_nb15":
        raw = load_unsw_nb15(path)
    else:
        raise InvalidConfig(f"unknown dataset source {source!r}; expected one of {SOURCES}")
    return encode(raw, default_encoding(raw), strict=strict)
