import numpy as np
import pytest

from mousetrap.classify.dataset import LabeledDataset
from mousetrap.classify.forest import ForestConfig
from mousetrap.errors import DataError
from mousetrap.gan.train import RnnDetectorConfig
from mousetrap.modelstore import load_model, save_model, train_full_model
from mousetrap.surrogate import sample_human_set


def feature_ds(rng, n=60):
    X = np.vstack([rng.normal(2, 1, (n // 2, 6)), rng.normal(-2, 1, (n // 2, 6))])
    y = np.array([1] * (n // 2) + [0] * (n // 2))
    tags = ["human"] * (n // 2) + ["gan"] * (n // 2)
    return LabeledDataset(y, tags, [None] * n, X=X, schema="global6")


@pytest.mark.parametrize("kind,cfg", [
    ("rf", ForestConfig(n_trees=8)),
    ("knn", {"k": 5}),
    ("mlp", None),
    ("oneclass", None),
])
def test_feature_model_round_trip(tmp_path, rng, kind, cfg):
    ds = feature_ds(rng)
    model = train_full_model(kind, ds, seed=1, model_cfg=cfg)
    path = tmp_path / f"{kind}.bin"
    save_model(path, model)
    loaded = load_model(path)
    assert loaded.kind == kind
    assert loaded.feature_schema == "global6"
    assert loaded.version is not None
    Q = rng.normal(0, 2, (10, 6))
    np.testing.assert_allclose(model.predict_proba(X=Q), loaded.predict_proba(X=Q),
                               atol=1e-12)


def test_rnn_model_round_trip(tmp_path):
    trajs = sample_human_set(16, np.random.default_rng(0))
    ds = LabeledDataset(np.array([1] * 8 + [0] * 8), ["human"] * 8 + ["gan"] * 8,
                        [None] * 16, trajectories=trajs)
    model = train_full_model("rnn", ds, seed=2,
                             model_cfg=RnnDetectorConfig(units=(5, 4), M=12, epochs=2,
                                                         batch=8))
    path = tmp_path / "rnn.bin"
    save_model(path, model)
    loaded = load_model(path)
    probe = trajs[:3]
    np.testing.assert_allclose(model.predict_proba(trajectories=probe),
                               loaded.predict_proba(trajectories=probe), atol=1e-12)


def test_standardization_travels_with_model(tmp_path, rng):
    ds = feature_ds(rng)
    model = train_full_model("knn", ds, seed=0)
    assert model.mean is not None and model.std is not None
    path = tmp_path / "m.bin"
    save_model(path, model)
    loaded = load_model(path)
    np.testing.assert_array_equal(loaded.mean, model.mean)
    np.testing.assert_array_equal(loaded.std, model.std)


def test_not_a_model_file_rejected(tmp_path):
    path = tmp_path / "nope.bin"
    path.write_text('{"kind": "something"}')
    with pytest.raises(DataError):
        load_model(path)
