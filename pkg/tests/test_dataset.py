import numpy as np
import pytest

from mousetrap.classify.dataset import LabeledDataset, apply_standardization, standardize
from mousetrap.errors import DataError


def feature_ds(X, y, schema="global6"):
    X = np.asarray(X, dtype=float)
    n = len(X)
    return LabeledDataset(np.asarray(y), ["human" if v else "linear_vp1" for v in y],
                          [None] * n, X=X, schema=schema)


class TestLabeledDataset:
    def test_requires_exactly_one_payload(self):
        with pytest.raises(DataError):
            LabeledDataset(np.array([1]), ["human"], [None])

    def test_labels_binary(self):
        with pytest.raises(DataError):
            feature_ds(np.zeros((2, 6)), [1, 2])

    def test_subset(self):
        ds = feature_ds(np.arange(24).reshape(4, 6), [1, 0, 1, 0])
        sub = ds.subset([0, 2])
        assert len(sub) == 2
        assert list(sub.y) == [1, 1]
        np.testing.assert_array_equal(sub.X, ds.X[[0, 2]])

    def test_counts(self):
        ds = feature_ds(np.zeros((3, 6)), [1, 1, 0])
        assert ds.counts() == {"human": 2, "linear_vp1": 1}


class TestStandardize:
    def test_constant_column_unchanged(self):
        X = np.array([[5.0, 1.0], [5.0, 3.0], [5.0, 5.0]])
        X6 = np.hstack([X, np.zeros((3, 4))])
        train = feature_ds(X6, [1, 0, 1])
        out, _, mean, std = standardize(train, train)
        np.testing.assert_array_equal(out.X[:, 0], X6[:, 0])  # constant col untouched
        assert std[0] == 0.0

    def test_sample_estimator_value(self):
        X = np.zeros((2, 6))
        X[:, 0] = [1.0, 3.0]
        train = feature_ds(X, [1, 0])
        out, _, mean, std = standardize(train, train)
        assert mean[0] == 2.0
        assert std[0] == pytest.approx(np.sqrt(2.0))
        assert out.X[1, 0] == pytest.approx((3 - 2) / np.sqrt(2))
        assert out.X[1, 0] == pytest.approx(0.70710678, rel=1e-6)

    def test_no_leakage_from_test(self):
        train = feature_ds(np.random.default_rng(0).normal(0, 1, (50, 6)), [1, 0] * 25)
        shifted = feature_ds(np.random.default_rng(1).normal(10, 1, (50, 6)), [1, 0] * 25)
        _, test_s, mean, std = standardize(train, shifted)
        # test statistics never enter the scaling: shifted data stays far from 0
        assert abs(np.mean(test_s.X)) > 3.0
        np.testing.assert_allclose(
            test_s.X, apply_standardization(shifted.X, mean, std))

    def test_schema_mismatch_rejected(self):
        a = feature_ds(np.zeros((2, 6)), [1, 0])
        b = LabeledDataset(np.array([1, 0]), ["human", "gan"], [None, None],
                           X=np.zeros((2, 37)), schema="neuromotor37")
        with pytest.raises(DataError):
            standardize(a, b)
