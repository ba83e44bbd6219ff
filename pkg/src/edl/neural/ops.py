"""Forward/backward primitives: dense, 1-d convolution, GRU, softmax.

Every forward returns (output, cache); the matching backward consumes the
upstream gradient plus the cache and returns gradients for inputs and
parameters.  All math is float64 and gradients are derived by hand (no
autodiff anywhere in the package).
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch

ACTIVATIONS = ("sigmoid", "tanh", "relu", "identity")


def sigmoid(x):
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    expx = np.exp(x[~pos])
    out[~pos] = expx / (1.0 + expx)
    return out


def _activate(pre, activation):
    if activation == "sigmoid":
        return sigmoid(pre)
    if activation == "tanh":
        return np.tanh(pre)
    if activation == "relu":
        return np.maximum(pre, 0.0)
    if activation == "identity":
        return pre
    raise ValueError(f"unknown activation {activation!r}")


def _activation_grad(dout, out, activation):
    if activation == "sigmoid":
        return dout * out * (1.0 - out)
    if activation == "tanh":
        return dout * (1.0 - out * out)
    if activation == "relu":
        return dout * (out > 0.0)
    return dout


def softmax(logits):
    """Probability vector over the last axis, max-subtracted for stability."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    expv = np.exp(shifted)
    return expv / expv.sum(axis=-1, keepdims=True)


def log_softmax(logits):
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax_xent(logits, target):
    """Cross-entropy -log p[target]; returns (loss, dloss/dlogits)."""
    logp = log_softmax(logits)
    probs = np.exp(logp)
    dlogits = probs.copy()
    dlogits[target] -= 1.0
    return -logp[target], dlogits


def dense_forward(x, W, b, activation="identity"):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != W.shape[0]:
        raise ShapeMismatch(f"dense: input {x.shape} vs weights {W.shape}")
    if b.shape != (W.shape[1],):
        raise ShapeMismatch(f"dense: bias {b.shape} vs weights {W.shape}")
    out = _activate(x @ W + b, activation)
    return out, (x, W, out, activation)


def dense_backward(dout, cache):
    x, W, out, activation = cache
    dpre = _activation_grad(np.asarray(dout, dtype=np.float64), out,
                            activation)
    if x.ndim == 1:
        dW = np.outer(x, dpre)
        db = dpre
    else:
        dW = x.T @ dpre
        db = dpre.sum(axis=0)
    dx = dpre @ W.T
    return dx, dW, db


def conv1d_forward(x, kernel, bias):
    """Same-padded 1-d convolution: x (T, D), kernel (w, D, F) -> (T, F)."""
    x = np.asarray(x, dtype=np.float64)
    w, d, f = kernel.shape
    if w % 2 != 1:
        raise ShapeMismatch(f"conv1d: filter size {w} must be odd")
    if x.ndim != 2 or x.shape[1] != d:
        raise ShapeMismatch(f"conv1d: input {x.shape} vs kernel {kernel.shape}")
    if bias.shape != (f,):
        raise ShapeMismatch(f"conv1d: bias {bias.shape} vs kernel {kernel.shape}")
    t = x.shape[0]
    half = w // 2
    padded = np.zeros((t + 2 * half, d))
    padded[half:half + t] = x
    out = np.tile(bias, (t, 1))
    for j in range(w):
        out += padded[j:j + t] @ kernel[j]
    return out, (padded, kernel, t)


def conv1d_backward(dout, cache):
    padded, kernel, t = cache
    w, d, f = kernel.shape
    half = w // 2
    dout = np.asarray(dout, dtype=np.float64)
    dkernel = np.empty_like(kernel)
    dpadded = np.zeros_like(padded)
    for j in range(w):
        dkernel[j] = padded[j:j + t].T @ dout
        dpadded[j:j + t] += dout @ kernel[j].T
    dbias = dout.sum(axis=0)
    dx = dpadded[half:half + t]
    return dx, dkernel, dbias


GRU_PARAM_NAMES = ("Wz", "Uz", "bz", "Wr", "Ur", "br", "Wh", "Uh", "bh")


def gru_init(rng, input_dim, hidden_dim):
    """Fresh GRU parameter dict for gate input (input_dim) and state."""
    from .params import glorot
    p = {}
    for gate in "zrh":
        p[f"W{gate}"] = glorot(rng, (input_dim, hidden_dim))
        p[f"U{gate}"] = glorot(rng, (hidden_dim, hidden_dim))
        p[f"b{gate}"] = np.zeros(hidden_dim)
    return p


def gru_forward(h, x, p):
    """One GRU step: h' = (1-z)*h + z*htilde.

    z = sigmoid(x Wz + h Uz + bz), r = sigmoid(x Wr + h Ur + br),
    htilde = tanh(x Wh + (r*h) Uh + bh).
    """
    h = np.asarray(h, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != p["Wz"].shape[0] or h.shape[0] != p["Uz"].shape[0]:
        raise ShapeMismatch(f"gru: input {x.shape}, state {h.shape}, "
                            f"Wz {p['Wz'].shape}")
    z = sigmoid(x @ p["Wz"] + h @ p["Uz"] + p["bz"])
    r = sigmoid(x @ p["Wr"] + h @ p["Ur"] + p["br"])
    rh = r * h
    htilde = np.tanh(x @ p["Wh"] + rh @ p["Uh"] + p["bh"])
    h_new = (1.0 - z) * h + z * htilde
    return h_new, (h, x, z, r, rh, htilde, p)


def gru_backward(dh_new, cache):
    """Returns (dh, dx, dparams dict keyed like the parameter dict)."""
    h, x, z, r, rh, htilde, p = cache
    dh_new = np.asarray(dh_new, dtype=np.float64)
    dz = dh_new * (htilde - h)
    dhtilde = dh_new * z
    dh = dh_new * (1.0 - z)

    da_h = dhtilde * (1.0 - htilde * htilde)
    dWh = np.outer(x, da_h)
    dUh = np.outer(rh, da_h)
    dbh = da_h
    dx = da_h @ p["Wh"].T
    drh = da_h @ p["Uh"].T
    dr = drh * h
    dh += drh * r

    da_z = dz * z * (1.0 - z)
    dWz = np.outer(x, da_z)
    dUz = np.outer(h, da_z)
    dbz = da_z
    dx += da_z @ p["Wz"].T
    dh += da_z @ p["Uz"].T

    da_r = dr * r * (1.0 - r)
    dWr = np.outer(x, da_r)
    dUr = np.outer(h, da_r)
    dbr = da_r
    dx += da_r @ p["Wr"].T
    dh += da_r @ p["Ur"].T

    grads = {"Wz": dWz, "Uz": dUz, "bz": dbz,
             "Wr": dWr, "Ur": dUr, "br": dbr,
             "Wh": dWh, "Uh": dUh, "bh": dbh}
    return dh, dx, grads
