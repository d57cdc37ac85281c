import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpcflow.baselines import (
    DbscanConfig,
    IForestConfig,
    KMeansConfig,
    average_path_length,
    dbscan_detect,
    dbscan_labels,
    iforest_detect,
    kmeans_detect,
    kmeans_plus_plus,
    lloyd,
    nearest_rank_quantile,
)
from dpcflow.errors import InvalidConfig, TooFewPoints


def blob_and_outlier(m=100, seed=0):
    rng = np.random.default_rng(seed)
    return np.vstack([rng.normal(0.5, 0.03, (m - 1, 2)), [[3.0, -2.0]]])


def _check_threshold(verdict):
    assert np.array_equal(verdict.score > verdict.threshold, verdict.is_anomaly)


class TestKMeans:
    def test_far_point_only(self):
        x = blob_and_outlier()
        v = kmeans_detect(x, KMeansConfig(k=1, quantile=0.99, seed=1))
        # brute force: the outlier is strictly farthest from the blob mean
        far = np.linalg.norm(x - x.mean(axis=0), axis=1)
        assert v.is_anomaly.tolist() == (far == far.max()).tolist()
        assert v.is_anomaly.sum() == 1 and v.is_anomaly[-1]
        _check_threshold(v)

    def test_quantile_near_one_flags_nothing(self):
        v = kmeans_detect(blob_and_outlier(), KMeansConfig(k=1, quantile=0.999, seed=1))
        assert not v.is_anomaly.any()

    def test_coincident_points(self):
        v = kmeans_detect(np.ones((20, 3)), KMeansConfig(k=2, seed=0))
        assert np.all(v.score == 0) and not v.is_anomaly.any()

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            kmeans_detect(np.ones((3, 2)), KMeansConfig(k=4))

    def test_deterministic(self):
        x = np.random.default_rng(2).random((200, 3))
        a = kmeans_detect(x, KMeansConfig(k=4, seed=5))
        b = kmeans_detect(x, KMeansConfig(k=4, seed=5))
        assert np.array_equal(a.score, b.score)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
    def test_objective_nonincreasing(self, seed, k):
        rng = np.random.default_rng(seed)
        x = rng.random((60, 3))
        _, _, objectives = lloyd(x, kmeans_plus_plus(x, k, rng), 50)
        assert np.all(np.diff(objectives) <= 1e-9)

    def test_nearest_rank(self):
        assert nearest_rank_quantile(np.arange(1, 101), 0.99) == 99
        assert nearest_rank_quantile([5.0], 0.5) == 5.0


class TestIForest:
    def test_outlier_has_max_score(self):
        rng = np.random.default_rng(4)
        x = np.vstack([rng.random((200, 2)), [[5.0, 5.0]]])
        v = iforest_detect(x, IForestConfig(seed=3))
        assert v.score.argmax() == 200
        assert np.all((v.score > 0) & (v.score < 1))
        assert v.score[200] > np.median(v.score)
        _check_threshold(v)

    def test_duplicates_score_equal(self):
        x = np.random.default_rng(5).random((50, 3))
        x = np.vstack([x, x[:10]])
        v = iforest_detect(x, IForestConfig(seed=1))
        assert np.array_equal(v.score[:10], v.score[50:])

    def test_threshold_one_flags_nothing(self):
        v = iforest_detect(blob_and_outlier(), IForestConfig(threshold=1.0, seed=0))
        assert not v.is_anomaly.any()

    def test_deterministic_and_seed_sensitive(self):
        x = np.random.default_rng(6).random((80, 2))
        a = iforest_detect(x, IForestConfig(seed=7)).score
        assert np.array_equal(a, iforest_detect(x, IForestConfig(seed=7)).score)
        assert not np.array_equal(a, iforest_detect(x, IForestConfig(seed=8)).score)

    def test_path_length_normaliser(self):
        assert average_path_length(1) == 0.0
        assert average_path_length(2) == 1.0
        h = sum(1 / i for i in range(1, 255))
        # harmonic-number approximation vs exact sum
        assert average_path_length(256) == pytest.approx(2 * h - 2 * 255 / 256, abs=0.01)

    def test_too_few(self):
        with pytest.raises(TooFewPoints):
            iforest_detect(np.ones((1, 2)))


class TestDbscan:
    def test_line(self):
        x = np.array([[0.0], [0.1], [0.3]])
        labels = dbscan_labels(x, DbscanConfig(eps=0.15, min_pts=1))
        assert labels[0] == labels[1] >= 0 and labels[2] == -1
        v = dbscan_detect(x, DbscanConfig(eps=0.15, min_pts=1))
        assert v.is_anomaly.tolist() == [False, False, True]
        _check_threshold(v)

    def test_min_pts_zero(self):
        v = dbscan_detect(np.random.default_rng(0).random((10, 2)) * 10,
                          DbscanConfig(eps=0.01, min_pts=0))
        assert not v.is_anomaly.any()

    def test_single_point(self):
        assert dbscan_detect(np.zeros((1, 2)), DbscanConfig(eps=1, min_pts=1)).is_anomaly.tolist() == [True]

    def test_border_point_not_noise(self):
        # only 0.1 has two neighbours; 0 and 0.2 are border points of its cluster
        x = np.array([[0.0], [0.1], [0.2], [0.9]])
        labels = dbscan_labels(x, DbscanConfig(eps=0.1, min_pts=2))
        assert labels[:3].tolist() == [0, 0, 0] and labels[3] == -1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_noise_permutation_invariant(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.random((40, 2))
        perm = rng.permutation(40)
        cfg = DbscanConfig(eps=0.15, min_pts=3)
        a = dbscan_detect(x, cfg).is_anomaly
        b = dbscan_detect(x[perm], cfg).is_anomaly
        assert np.array_equal(a[perm], b)

    def test_config_validation(self):
        with pytest.raises(InvalidConfig):
            DbscanConfig(eps=0)
        with pytest.raises(InvalidConfig):
            KMeansConfig(quantile=1.0)
        with pytest.raises(InvalidConfig):
            IForestConfig(subsample=1)
