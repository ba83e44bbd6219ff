"""Named parameter tensors with matching gradient buffers.

Checkpoint format: one manifest line
``#edl-checkpoint<TAB>config_hash=...<TAB>seed=...`` followed by one line
per tensor ``name<TAB>dim,dim,...<TAB>hex`` where hex is the raw
little-endian float64 buffer in base 16.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


def glorot(rng, shape):
    """Uniform(+-sqrt(6/(fan_in+fan_out))) initialization."""
    if len(shape) == 2:
        fan_in, fan_out = shape
    elif len(shape) == 3:  # conv kernel (w, D, F)
        w, d, f = shape
        fan_in, fan_out = w * d, w * f
    else:
        fan_in = fan_out = shape[0]
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def uniform_init(rng, shape, scale=0.1):
    return rng.uniform(-scale, scale, size=shape)


class ParameterStore:
    """Map of name -> (weight, gradient accumulator) of identical shape."""

    def __init__(self):
        self._weights = {}
        self._grads = {}

    def add(self, name, value):
        if name in self._weights:
            raise ValueError(f"duplicate parameter {name!r}")
        value = np.asarray(value, dtype=np.float64)
        self._weights[name] = value
        self._grads[name] = np.zeros_like(value)
        return value

    def __getitem__(self, name):
        return self._weights[name]

    def __contains__(self, name):
        return name in self._weights

    def names(self):
        return list(self._weights)

    def grad(self, name):
        return self._grads[name]

    def add_grad(self, name, g):
        g = np.asarray(g)
        if g.shape != self._weights[name].shape:
            raise ShapeMismatch(
                f"grad for {name}: {g.shape} vs {self._weights[name].shape}")
        self._grads[name] += g

    def zero_grads(self):
        for g in self._grads.values():
            g[...] = 0.0

    def scale_grads(self, factor):
        for g in self._grads.values():
            g *= factor

    def copy(self):
        other = ParameterStore()
        for name, w in self._weights.items():
            other.add(name, w.copy())
        return other

    def load_from(self, other):
        """Copy weight values from another store with identical names."""
        if set(other.names()) != set(self.names()):
            raise ShapeMismatch("parameter name sets differ")
        for name in self.names():
            if other[name].shape != self._weights[name].shape:
                raise ShapeMismatch(f"{name}: {other[name].shape} vs "
                                    f"{self._weights[name].shape}")
            self._weights[name][...] = other[name]

    def num_parameters(self):
        return sum(w.size for w in self._weights.values())

    def save(self, path, config_hash="", seed=0):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"#edl-checkpoint\tconfig_hash={config_hash}"
                     f"\tseed={seed}\n")
            for name in sorted(self._weights):
                w = self._weights[name]
                dims = ",".join(str(d) for d in w.shape)
                fh.write(f"{name}\t{dims}\t"
                         f"{w.astype('<f8').tobytes().hex()}\n")

    @staticmethod
    def load(path):
        store = ParameterStore()
        manifest = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            for item in header.split("\t")[1:]:
                key, _, value = item.partition("=")
                manifest[key] = value
            for line in fh:
                name, dims, hexdata = line.rstrip("\n").split("\t")
                shape = tuple(int(d) for d in dims.split(",") if d)
                data = np.frombuffer(bytes.fromhex(hexdata), dtype="<f8")
                store.add(name, data.reshape(shape).copy())
        return store, manifest
