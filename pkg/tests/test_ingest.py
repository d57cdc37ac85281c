import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dpcflow.errors import (
    DimensionMismatch,
    EmptyDataset,
    InputError,
    InvalidConfig,
    MalformedRow,
    UnknownCategory,
)
from dpcflow.ingest import (
    ColumnRule,
    EncodingSpec,
    LabeledDataset,
    RawDataset,
    RawRecord,
    SynthConfig,
    apply_minmax,
    default_encoding,
    encode,
    fit_minmax,
    generate_synthetic,
    load_dataset,
    load_nsl_kdd,
    load_unsw_nb15,
    read_dataset_csv,
    write_dataset_csv,
)

NSL_NORMAL = ("0,tcp,ftp_data,SF,491,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,2,0.00,0.00,"
              "0.00,0.00,1.00,0.00,0.00,150,25,0.17,0.03,0.17,0.00,0.00,0.00,0.05,0.00,normal,21")


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestNslKdd:
    def test_43_field_row_drops_difficulty(self, tmp_path):
        raw = load_nsl_kdd(write(tmp_path, "a.txt", NSL_NORMAL + "\n"))
        rec = raw.records[0]
        assert len(rec.values) == 41
        assert rec.label_text == "normal"
        assert rec.values[1:4] == ["tcp", "ftp_data", "SF"]

    def test_42_field_row_maps_attack_to_anomaly(self, tmp_path):
        row = NSL_NORMAL.rsplit(",", 2)[0] + ",neptune"
        raw = load_nsl_kdd(write(tmp_path, "a.txt", row + "\n"))
        assert raw.records[0].label_text == "neptune"
        ds = encode(raw, default_encoding(raw))
        assert ds.labels.tolist() == [True]

    def test_wrong_field_count(self, tmp_path):
        short = ",".join(NSL_NORMAL.split(",")[:40])
        with pytest.raises(MalformedRow) as err:
            load_nsl_kdd(write(tmp_path, "a.txt", NSL_NORMAL + "\n" + short + "\n"))
        assert err.value.line_no == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            load_nsl_kdd(tmp_path / "nope.txt")

    def test_fixture_loads_in_order(self, nsl_path):
        raw = load_nsl_kdd(nsl_path)
        assert len(raw.records) == 100
        assert [r.line_no for r in raw.records] == list(range(1, 101))
        ds = encode(raw, default_encoding(raw))
        # 38 numeric + 3 + 70 + 11 one-hot indicators
        assert ds.matrix.shape == (100, 38 + 3 + 70 + 11)
        assert ds.labels[:3].tolist() == [False, False, True]
        assert 0 < ds.labels.sum() < 100


class TestUnsw:
    def test_fixture_with_header(self, unsw_path):
        raw = load_unsw_nb15(unsw_path)
        assert len(raw.records) == 60
        assert all(len(r.values) == 42 for r in raw.records)
        assert {r.label_text for r in raw.records} == {"normal", "attack"}

    def test_headerless_and_labels(self, tmp_path, unsw_path):
        lines = unsw_path.read_text().splitlines()[1:3]
        raw = load_unsw_nb15(write(tmp_path, "b.csv", "\n".join(lines) + "\n"))
        expected = ["normal" if l.endswith(",0") else "attack" for l in lines]
        assert [r.label_text for r in raw.records] == expected

    def test_label_zero_is_normal_one_is_anomaly(self, unsw_path):
        raw = load_unsw_nb15(unsw_path)
        ds = encode(raw, default_encoding(raw))
        flags = [l.endswith(",1") for l in unsw_path.read_text().splitlines()[1:]]
        assert ds.labels.tolist() == flags

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyDataset):
            load_unsw_nb15(write(tmp_path, "e.csv", ""))

    def test_bad_label(self, tmp_path, unsw_path):
        line = unsw_path.read_text().splitlines()[1].rsplit(",", 1)[0] + ",2"
        with pytest.raises(MalformedRow):
            load_unsw_nb15(write(tmp_path, "c.csv", line + "\n"))


def _raw(values, label="normal", names=("a", "b")):
    return RawDataset([RawRecord(list(values), label, 1)], list(names), (), "csv")


class TestEncode:
    def test_passthrough(self):
        spec = EncodingSpec((ColumnRule("a"), ColumnRule("b")))
        assert encode(_raw(["1.5", "2.0"]), spec).matrix.tolist() == [[1.5, 2.0]]

    def test_one_hot(self):
        spec = EncodingSpec((ColumnRule("p", ("tcp", "udp", "icmp")),))
        ds = encode(_raw(["tcp"], names=("p",)), spec)
        assert ds.matrix.tolist() == [[1.0, 0.0, 0.0]]
        assert ds.feature_names == ["p=tcp", "p=udp", "p=icmp"]

    def test_unknown_category_strict_and_open(self):
        spec = EncodingSpec((ColumnRule("p", ("tcp", "udp")), ColumnRule("n")))
        raw = _raw(["sctp", "3"], names=("p", "n"))
        with pytest.raises(UnknownCategory) as err:
            encode(raw, spec)
        assert err.value.column == "p" and err.value.value == "sctp"
        assert encode(raw, spec, strict=False).matrix.tolist() == [[0.0, 0.0, 3.0]]

    def test_label_map(self):
        spec = EncodingSpec((ColumnRule("a"),))
        assert encode(_raw(["1"], "neptune", ("a",)), spec).labels.tolist() == [True]
        assert encode(_raw(["1"], "normal", ("a",)), spec).labels.tolist() == [False]

    def test_non_numeric_passthrough(self):
        spec = EncodingSpec((ColumnRule("a"),))
        with pytest.raises(MalformedRow):
            encode(_raw(["x"], names=("a",)), spec)

    def test_invalid_rules(self):
        with pytest.raises(InvalidConfig):
            ColumnRule("p", ())
        with pytest.raises(InvalidConfig):
            ColumnRule("p", ("a", "a"))

    def test_deterministic(self, nsl_path):
        raw = load_nsl_kdd(nsl_path)
        a = encode(raw, default_encoding(raw))
        b = encode(raw, default_encoding(raw))
        assert np.array_equal(a.matrix, b.matrix)


def _ds(matrix):
    matrix = np.asarray(matrix, float)
    return LabeledDataset(matrix, np.zeros(len(matrix), bool),
                          [f"c{j}" for j in range(matrix.shape[1])])


class TestMinMax:
    def test_basic(self):
        ds = _ds([[2.0], [4.0], [6.0]])
        out = apply_minmax(fit_minmax(ds), ds)
        assert out.matrix[:, 0].tolist() == [0.0, 0.5, 1.0]

    def test_constant_column(self):
        ds = _ds([[7.0], [7.0]])
        assert apply_minmax(fit_minmax(ds), ds).matrix[:, 0].tolist() == [0.0, 0.0]

    def test_no_clamping(self):
        scaler = fit_minmax(_ds([[2.0], [6.0]]))
        assert apply_minmax(scaler, _ds([[8.0]])).matrix[0, 0] == 1.5

    def test_dimension_mismatch(self):
        scaler = fit_minmax(_ds([[2.0], [6.0]]))
        with pytest.raises(DimensionMismatch):
            apply_minmax(scaler, _ds([[1.0, 2.0]]))

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 20), st.integers(1, 4)),
                  elements=st.floats(-1e6, 1e6)))
    def test_unit_range_and_order(self, m):
        out = apply_minmax(fit_minmax(_ds(m)), _ds(m)).matrix
        assert np.all((out >= 0) & (out <= 1))
        for j in range(m.shape[1]):
            by_input = np.argsort(m[:, j], kind="stable")
            assert np.all(np.diff(out[by_input, j]) >= 0)


class TestSynthetic:
    def test_rejects_no_normals(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(n_normal=0, n_anomaly=0)

    def test_rejects_balanced_violation(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(n_normal=5, n_anomaly=6)

    def test_deterministic(self):
        a = generate_synthetic(SynthConfig(seed=1))
        b = generate_synthetic(SynthConfig(seed=1))
        assert a.matrix.tobytes() == b.matrix.tobytes()
        assert np.array_equal(a.labels, b.labels)
        c = generate_synthetic(SynthConfig(seed=2))
        assert not np.array_equal(a.matrix, c.matrix)

    def test_counts(self):
        ds = generate_synthetic(SynthConfig(n_normal=990, n_anomaly=10, seed=3))
        assert len(ds) == 1000 and ds.labels.sum() == 10


def test_csv_round_trip(tmp_path):
    ds = generate_synthetic(SynthConfig(n_normal=50, n_anomaly=5, dims=3, seed=4))
    path = tmp_path / "d.csv"
    write_dataset_csv(ds, path)
    back = read_dataset_csv(path)
    assert np.array_equal(back.matrix, ds.matrix)
    assert np.array_equal(back.labels, ds.labels)
    assert back.feature_names == ds.feature_names
    assert path.read_text().splitlines()[0] == "x0,x1,x2,label"


def test_load_dataset_dispatch(nsl_path, unsw_path):
    assert load_dataset("nsl_kdd", nsl_path).source == "nsl_kdd"
    assert load_dataset("unsw_nb15", unsw_path).source == "unsw_nb15"
    with pytest.raises(InvalidConfig):
        load_dataset("kdd99", nsl_path)
