import math

import numpy as np
import pytest

from mousetrap.errors import ConfigError, DataError
from mousetrap.classify.dataset import LabeledDataset
from mousetrap.gan.model import (
    Discriminator,
    GanBundle,
    GanConfig,
    Generator,
    Normalizer,
    discriminate,
    discriminate_batch,
    generate,
)
from mousetrap.gan.train import (
    RnnDetectorConfig,
    _bce,
    discriminator_as_detector,
    train_gan,
    train_recurrent_detector,
)
from mousetrap.surrogate import sample_human_set
from mousetrap.synth import ShapeSpec, VelocityKind, synth_trajectory

TINY = GanConfig(R=8, M=16, gen_units=(6, 5), disc_units=(6, 5),
                 epochs=3, batch=8, seed=0)


@pytest.fixture(scope="module")
def tiny_bundle():
    humans = sample_human_set(24, np.random.default_rng(2))
    return train_gan(humans, TINY)


class TestConfig:
    def test_paper_preset(self):
        cfg = GanConfig.paper()
        assert cfg.gen_units == (128, 64) and cfg.disc_units == (128, 64)
        assert cfg.R == 100 and cfg.epochs == 50 and cfg.batch == 128
        assert cfg.lr == 2e-4 and cfg.beta1 == 0.5 and cfg.beta2 == 0.999
        assert cfg.eps == 1e-8 and cfg.rate_hz == 200.0

    def test_desk_preset(self):
        cfg = GanConfig.desk()
        assert cfg.gen_units == (32, 16) and cfg.disc_units == (32, 16)

    def test_invariants(self):
        with pytest.raises(ConfigError):
            GanConfig(R=0)
        with pytest.raises(ConfigError):
            GanConfig(M=3)
        with pytest.raises(ConfigError):
            GanConfig(gen_units=(4, 0))

    def test_round_trip(self):
        cfg = GanConfig.desk(M=64, seed=5)
        assert GanConfig.from_dict(cfg.as_dict()) == cfg


class TestNormalizer:
    def test_round_trip_within_tolerance(self, rng):
        coords = rng.uniform(-50, 900, (10, 20, 2))
        norm = Normalizer.from_corpus(coords)
        back = norm.denormalize(norm.normalize(coords))
        assert np.max(np.abs(back - coords)) <= 1e-6

    def test_unit_range(self, rng):
        coords = rng.uniform(0, 100, (5, 30, 2))
        norm = Normalizer.from_corpus(coords)
        z = norm.normalize(coords)
        assert z.min() >= -1 - 1e-12 and z.max() <= 1 + 1e-12


class TestGenerate:
    def test_output_shape_and_timestamps(self, tiny_bundle):
        tr = generate(tiny_bundle, np.zeros(TINY.R))
        assert tr.n_points == TINY.M
        np.testing.assert_allclose(np.diff(tr.t), 1.0 / TINY.rate_hz)
        assert tr.source == "gan"

    def test_deterministic(self, tiny_bundle, rng):
        nz = rng.standard_normal(TINY.R)
        a = generate(tiny_bundle, nz)
        b = generate(tiny_bundle, nz)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.y, b.y)

    def test_wrong_noise_length(self, tiny_bundle):
        with pytest.raises(DataError):
            generate(tiny_bundle, np.zeros(TINY.R + 1))

    def test_zero_output_layer_gives_midpoint(self):
        rng = np.random.default_rng(0)
        gen = Generator(R=4, M=8, units=(4, 3), rng=rng)
        gen.params["out.W"][:] = 0.0
        gen.params["out.b"][:] = 0.0
        norm = Normalizer(0.0, 100.0, 50.0, 250.0)
        bundle = GanBundle(GanConfig(R=4, M=8, gen_units=(4, 3), disc_units=(4, 3)),
                           gen, Discriminator(2, (4, 3), rng=rng), norm)
        tr = generate(bundle, np.ones(4))
        np.testing.assert_allclose(tr.x, 50.0)
        np.testing.assert_allclose(tr.y, 150.0)


class TestDiscriminate:
    def test_score_in_open_interval(self, tiny_bundle, small_human_corpus):
        for tr in small_human_corpus[:5]:
            s = discriminate(tiny_bundle, tr)
            assert 0.0 < s < 1.0

    def test_constant_weights_give_constant_score(self, small_human_corpus):
        rng = np.random.default_rng(0)
        disc = Discriminator(2, (4, 3), rng=rng)
        for k in disc.params:
            disc.params[k][:] = 0.0
        bundle = GanBundle(GanConfig(R=4, M=12, gen_units=(4, 3), disc_units=(4, 3)),
                           Generator(R=4, M=12, units=(4, 3), rng=rng), disc,
                           Normalizer(0, 1000, 0, 600))
        scores = discriminate_batch(bundle, small_human_corpus[:6])
        assert np.all(scores == scores[0])

    def test_cross_entropy_anchor(self):
        # balanced batch at 0.5 output: loss is exactly ln 2
        logits = np.zeros(10)
        targets = np.array([1.0, 0.0] * 5)
        assert _bce(logits, targets) == pytest.approx(math.log(2.0), abs=1e-9)


class TestTrainGan:
    def test_history_lengths(self, tiny_bundle):
        assert len(tiny_bundle.history["gen_loss"]) == TINY.epochs
        assert len(tiny_bundle.history["disc_loss"]) == TINY.epochs

    def test_bit_identical_reproduction(self):
        humans = sample_human_set(20, np.random.default_rng(4))
        a = train_gan(humans, TINY)
        b = train_gan(humans, TINY)
        assert a.history == b.history
        for k in a.generator.params:
            np.testing.assert_array_equal(a.generator.params[k], b.generator.params[k])

    def test_needs_enough_humans(self):
        humans = sample_human_set(8, np.random.default_rng(5))
        with pytest.raises(DataError):
            train_gan(humans, TINY)

    def test_bundle_serialization_round_trip(self, tiny_bundle, rng):
        clone = GanBundle.from_dict(tiny_bundle.as_dict())
        nz = rng.standard_normal(TINY.R)
        a, b = generate(tiny_bundle, nz), generate(clone, nz)
        np.testing.assert_array_equal(a.x, b.x)
        assert clone.history == tiny_bundle.history

    def test_discriminator_prefers_humans_over_fakes(self, tiny_bundle):
        humans = sample_human_set(16, np.random.default_rng(6))
        rng = np.random.default_rng(7)
        fakes = [generate(tiny_bundle, rng.standard_normal(TINY.R)) for _ in range(16)]
        s_h = discriminate_batch(tiny_bundle, humans).mean()
        s_f = discriminate_batch(tiny_bundle, fakes).mean()
        assert s_h > s_f


class TestTrainingOrder:
    def test_generator_update_precedes_discriminator_write(self, monkeypatch):
        # within each iteration the generator step (reading frozen w_D) must
        # finish before the discriminator weights are written
        from mousetrap.optim import Adam

        events = []
        orig = Adam.step

        def spy(self, params, grads):
            head = params.get("out.W")
            events.append("disc" if head is not None and head.shape[0] == 1 else "gen")
            return orig(self, params, grads)

        monkeypatch.setattr(Adam, "step", spy)
        humans = sample_human_set(16, np.random.default_rng(12))
        train_gan(humans, GanConfig(R=6, M=12, gen_units=(5, 4), disc_units=(5, 4),
                                    epochs=2, batch=8, seed=0))
        assert len(events) >= 4 and len(events) % 2 == 0
        assert events == ["gen", "disc"] * (len(events) // 2)


class TestRecurrentDetector:
    def test_separable_toy(self):
        # constant-velocity lines vs lognormal-profile surrogates
        rng = np.random.default_rng(8)
        humans = sample_human_set(40, rng)
        bots = [synth_trajectory(ShapeSpec("linear"), VelocityKind(1),
                                 (0, 0), (400 + 10 * i, 100), 30 + i % 20)
                for i in range(40)]
        trajs = humans + bots
        labels = np.array([1] * 40 + [0] * 40)
        order = rng.permutation(80)
        train_idx, test_idx = order[:60], order[60:]
        det = train_recurrent_detector([trajs[i] for i in train_idx], labels[train_idx],
                                       RnnDetectorConfig(units=(8, 6), M=24, epochs=40,
                                                         batch=16, seed=0))
        scores = det.predict_proba([trajs[i] for i in test_idx])
        acc = np.mean((scores >= 0.5) == labels[test_idx])
        assert acc >= 0.9

    def test_prediction_determinism(self, small_human_corpus):
        det = train_recurrent_detector(
            small_human_corpus[:8] + small_human_corpus[8:16],
            np.array([1] * 8 + [0] * 8),
            RnnDetectorConfig(units=(5, 4), M=16, epochs=2, batch=8, seed=1))
        a = det.predict_proba(small_human_corpus[:4])
        b = det.predict_proba(small_human_corpus[:4])
        np.testing.assert_array_equal(a, b)


class TestDiscriminatorAsDetector:
    def test_scores_own_fakes(self, tiny_bundle):
        humans = sample_human_set(20, np.random.default_rng(9))
        rng = np.random.default_rng(10)
        fakes = [generate(tiny_bundle, rng.standard_normal(TINY.R)) for _ in range(20)]
        ds = LabeledDataset(np.array([1] * 20 + [0] * 20),
                            ["human"] * 20 + ["gan"] * 20,
                            [None] * 40, trajectories=humans + fakes)
        metrics = discriminator_as_detector(tiny_bundle, ds)
        assert 0.0 <= metrics.auc <= 1.0
        assert metrics.acc >= 0.5

    def test_requires_raw_trajectories(self, tiny_bundle):
        ds = LabeledDataset(np.array([1, 0]), ["human", "gan"], [None, None],
                            X=np.zeros((2, 6)), schema="global6")
        with pytest.raises(DataError):
            discriminator_as_detector(tiny_bundle, ds)
