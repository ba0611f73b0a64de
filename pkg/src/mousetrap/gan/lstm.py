"""LSTM layer with manual forward/backward over full unrolls.

Gate order inside the stacked weight matrices is (input, forget, candidate,
output). The candidate and cell-output nonlinearity is configurable (tanh,
relu, or leaky_relu) while the gates stay sigmoid.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

__all__ = ["LSTMLayer", "glorot", "sigmoid"]

LEAKY_ALPHA = 0.2


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def glorot(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    fan_out, fan_in = shape[0], shape[-1]
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def _act_pair(name: str):
    if name == "tanh":
        f = np.tanh
        df = lambda pre, post: 1.0 - post * post
    elif name == "relu":
        f = lambda z: np.maximum(z, 0.0)
        df = lambda pre, post: (pre > 0).astype(float)
    elif name == "leaky_relu":
        f = lambda z: np.where(z > 0, z, LEAKY_ALPHA * z)
        df = lambda pre, post: np.where(pre > 0, 1.0, LEAKY_ALPHA)
    else:
        raise ConfigError(f"unknown activation {name!r}")
    return f, df


class LSTMLayer:
    """One recurrent layer; parameters live in `params` under `name.` keys."""

    def __init__(self, in_dim: int, units: int, activation: str = "tanh",
                 name: str = "lstm", rng: np.random.Generator | None = None):
        if units < 1:
            raise ConfigError("LSTM layer needs at least one unit")
        self.in_dim = in_dim
        self.units = units
        self.activation = activation
        self.name = name
        self._act, self._dact = _act_pair(activation)
        rng = rng or np.random.default_rng()
        b = np.zeros(4 * units)
        b[units:2 * units] = 1.0  # forget-gate bias
        self.params = {
            f"{name}.Wx": glorot(rng, (4 * units, in_dim)),
            f"{name}.Wh": glorot(rng, (4 * units, units)),
            f"{name}.b": b,
        }

    def forward(self, xs: np.ndarray, h0: np.ndarray, c0: np.ndarray):
        """xs: (T, B, in_dim); h0, c0: (B, units). Returns (hs, cache)."""
        T, B, _ = xs.shape
        u = self.units
        Wx = self.params[f"{self.name}.Wx"]
        Wh = self.params[f"{self.name}.Wh"]
        b = self.params[f"{self.name}.b"]
        hs = np.empty((T, B, u))
        cache = {
            "xs": xs, "h_prev": np.empty((T, B, u)), "c_prev": np.empty((T, B, u)),
            "i": np.empty((T, B, u)), "f": np.empty((T, B, u)),
            "g": np.empty((T, B, u)), "o": np.empty((T, B, u)),
            "g_pre": np.empty((T, B, u)), "c": np.empty((T, B, u)),
            "ac": np.empty((T, B, u)),
        }
        h, c = h0, c0
        for t in range(T):
            cache["h_prev"][t] = h
            cache["c_prev"][t] = c
            z = xs[t] @ Wx.T + h @ Wh.T + b
            i = sigmoid(z[:, :u])
            f = sigmoid(z[:, u:2 * u])
            g_pre = z[:, 2 * u:3 * u]
            g = self._act(g_pre)
            o = sigmoid(z[:, 3 * u:])
            c = f * c + i * g
            ac = self._act(c)
            h = o * ac
            hs[t] = h
            cache["i"][t], cache["f"][t], cache["g"][t], cache["o"][t] = i, f, g, o
            cache["g_pre"][t], cache["c"][t], cache["ac"][t] = g_pre, c, ac
        return hs, cache

    def backward(self, dhs: np.ndarray | None, dh_last: np.ndarray | None,
                 dc_last: np.ndarray | None, cache: dict):
        """Backpropagate through the unroll.

        dhs: per-step gradients on the outputs (may be None), dh_last/dc_last:
        extra gradient flowing into the final hidden/cell state. Returns
        (dxs, dh0, dc0, grads).
        """
        xs = cache["xs"]
        T, B, _ = xs.shape
        u = self.units
        Wx = self.params[f"{self.name}.Wx"]
        Wh = self.params[f"{self.name}.Wh"]
        dWx = np.zeros_like(Wx)
        dWh = np.zeros_like(Wh)
        db = np.zeros(4 * u)
        dxs = np.empty_like(xs)
        dh = np.zeros((B, u)) if dh_last is None else dh_last.copy()
        dc = np.zeros((B, u)) if dc_last is None else dc_last.copy()
        for t in range(T - 1, -1, -1):
            if dhs is not None:
                dh = dh + dhs[t]
            i, f, g, o = cache["i"][t], cache["f"][t], cache["g"][t], cache["o"][t]
            c, ac = cache["c"][t], cache["ac"][t]
            c_prev = cache["c_prev"][t]
            do = dh * ac
            dz_o = do * o * (1.0 - o)
            dc = dc + dh * o * self._dact(c, ac)
            di = dc * g
            dz_i = di * i * (1.0 - i)
            df = dc * c_prev
            dz_f = df * f * (1.0 - f)
            dg = dc * i
            dz_g = dg * self._dact(cache["g_pre"][t], g)
            dz = np.concatenate([dz_i, dz_f, dz_g, dz_o], axis=1)
            dWx += dz.T @ xs[t]
            dWh += dz.T @ cache["h_prev"][t]
            db += dz.sum(axis=0)
            dxs[t] = dz @ Wx
            dh = dz @ Wh
            dc = dc * f
        grads = {f"{self.name}.Wx": dWx, f"{self.name}.Wh": dWh, f"{self.name}.b": db}
        return dxs, dh, dc, grads
