"""Gradient checks: analytic backprop-through-time against central finite
differences on pinned toy configurations."""

import numpy as np
import pytest

from mousetrap.gan.lstm import LSTMLayer, sigmoid
from mousetrap.gan.model import Discriminator, Generator


def flat_of(params):
    return np.concatenate([params[k].ravel() for k in sorted(params)])


def set_flat(params, flat):
    pos = 0
    for k in sorted(params):
        size = params[k].size
        params[k][...] = flat[pos:pos + size].reshape(params[k].shape)
        pos += size


def numeric_grad(loss_fn, params, h=1e-6):
    base = flat_of(params)
    out = np.empty_like(base)
    for i in range(len(base)):
        up, dn = base.copy(), base.copy()
        up[i] += h
        dn[i] -= h
        set_flat(params, up)
        lu = loss_fn()
        set_flat(params, dn)
        ld = loss_fn()
        out[i] = (lu - ld) / (2 * h)
    set_flat(params, base)
    return out


def max_rel_error(analytic, numeric):
    # floor the denominator at 1e-3 of the gradient scale: near-zero
    # coordinates are dominated by finite-difference roundoff
    scale = max(float(np.max(np.abs(numeric))), 1e-8)
    denom = np.maximum(np.maximum(np.abs(numeric), np.abs(analytic)), 1e-3 * scale)
    return float(np.max(np.abs(analytic - numeric) / denom))


def bce(logits, targets):
    return float(np.mean(np.log1p(np.exp(-np.abs(logits)))
                         + np.maximum(logits, 0.0) - logits * targets))


@pytest.mark.parametrize("activation", ["tanh", "relu", "leaky_relu"])
def test_lstm_layer_gradients(activation):
    rng = np.random.default_rng(101)
    layer = LSTMLayer(2, 3, activation=activation, name="l", rng=rng)
    T, B = 2, 2
    xs = rng.normal(0, 1, (T, B, 2))
    h0 = rng.normal(0, 0.5, (B, 3))
    c0 = rng.normal(0, 0.5, (B, 3))
    C = rng.normal(0, 1, (T, B, 3))

    def loss_fn():
        hs, _ = layer.forward(xs, h0, c0)
        return float(np.sum(hs * C))

    hs, cache = layer.forward(xs, h0, c0)
    _, _, _, grads = layer.backward(C, None, None, cache)
    assert max_rel_error(flat_of(grads), numeric_grad(loss_fn, layer.params)) <= 1e-4


def test_lstm_input_and_state_gradients():
    rng = np.random.default_rng(7)
    layer = LSTMLayer(2, 3, activation="tanh", name="l", rng=rng)
    T, B = 3, 2
    xs = rng.normal(0, 1, (T, B, 2))
    h0 = rng.normal(0, 0.5, (B, 3))
    c0 = rng.normal(0, 0.5, (B, 3))
    C = rng.normal(0, 1, (T, B, 3))
    hs, cache = layer.forward(xs, h0, c0)
    dxs, dh0, dc0, _ = layer.backward(C, None, None, cache)

    h = 1e-6
    for arr, grad in ((xs, dxs), (h0, dh0), (c0, dc0)):
        flat = arr.ravel()
        num = np.empty_like(flat)
        for i in range(len(flat)):
            orig = flat[i]
            flat[i] = orig + h
            lu = float(np.sum(layer.forward(xs, h0, c0)[0] * C))
            flat[i] = orig - h
            ld = float(np.sum(layer.forward(xs, h0, c0)[0] * C))
            flat[i] = orig
            num[i] = (lu - ld) / (2 * h)
        assert max_rel_error(grad.ravel(), num) <= 1e-4


def test_generator_gradients_through_frozen_discriminator():
    rng = np.random.default_rng(11)
    gen = Generator(R=4, M=3, units=(3, 2), activation="relu", rng=rng)
    disc = Discriminator(2, (3, 2), activation="leaky_relu", rng=rng)
    noise = rng.normal(0, 1, (2, 4))
    targets = np.ones(2)

    def loss_fn():
        ys, _ = gen.forward(noise)
        logits, _ = disc.forward(ys)
        return bce(logits, targets)

    ys, gcache = gen.forward(noise)
    logits, dcache = disc.forward(ys)
    dlogits = (sigmoid(logits) - targets) / len(targets)
    _, dys = disc.backward(dlogits, dcache, want_dinput=True)
    grads = gen.backward(dys, gcache)
    assert max_rel_error(flat_of(grads), numeric_grad(loss_fn, gen.params)) <= 1e-4


def test_discriminator_gradients():
    rng = np.random.default_rng(13)
    disc = Discriminator(2, (3, 2), activation="leaky_relu", rng=rng)
    coords = rng.normal(0, 1, (4, 3, 2))
    targets = np.array([1.0, 0.0, 1.0])

    def loss_fn():
        logits, _ = disc.forward(coords)
        return bce(logits, targets)

    logits, cache = disc.forward(coords)
    dlogits = (sigmoid(logits) - targets) / len(targets)
    grads, _ = disc.backward(dlogits, cache)
    assert max_rel_error(flat_of(grads), numeric_grad(loss_fn, disc.params)) <= 1e-4


def test_discriminator_input_gradients():
    rng = np.random.default_rng(17)
    disc = Discriminator(2, (3, 2), activation="tanh", rng=rng)
    coords = rng.normal(0, 1, (3, 2, 2))
    targets = np.array([1.0, 0.0])
    logits, cache = disc.forward(coords)
    dlogits = (sigmoid(logits) - targets) / len(targets)
    _, dcoords = disc.backward(dlogits, cache, want_dinput=True)

    h = 1e-6
    flat = coords.ravel()
    num = np.empty_like(flat)
    for i in range(len(flat)):
        orig = flat[i]
        flat[i] = orig + h
        lu = bce(disc.forward(coords)[0], targets)
        flat[i] = orig - h
        ld = bce(disc.forward(coords)[0], targets)
        flat[i] = orig
        num[i] = (lu - ld) / (2 * h)
    assert max_rel_error(dcoords.ravel(), num) <= 1e-4
