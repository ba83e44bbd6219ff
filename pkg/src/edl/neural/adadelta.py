"""AdaDelta parameter updates (rho=0.95, eps=1e-6 defaults)."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


def adadelta_update(weight, grad, accum_grad_sq, accum_update_sq,
                    rho=0.95, eps=1e-6):
    """Apply one AdaDelta step in place; returns the applied delta.

    E[g2] <- rho E[g2] + (1-rho) g2
    delta  = -sqrt(E[dx2]+eps)/sqrt(E[g2]+eps) * g
    E[dx2] <- rho E[dx2] + (1-rho) delta2
    """
    if not (weight.shape == grad.shape == accum_grad_sq.shape
            == accum_update_sq.shape):
        raise ShapeMismatch(f"adadelta: {weight.shape} / {grad.shape}")
    accum_grad_sq *= rho
    accum_grad_sq += (1.0 - rho) * grad * grad
    delta = -np.sqrt(accum_update_sq + eps) / np.sqrt(accum_grad_sq + eps) * grad
    accum_update_sq *= rho
    accum_update_sq += (1.0 - rho) * delta * delta
    weight += delta
    return delta


class AdaDelta:
    """Per-parameter AdaDelta state over a ParameterStore."""

    def __init__(self, store, rho=0.95, eps=1e-6):
        self.store = store
        self.rho = rho
        self.eps = eps
        self.accum_grad_sq = {name: np.zeros_like(store[name])
                              for name in store.names()}
        self.accum_update_sq = {name: np.zeros_like(store[name])
                                for name in store.names()}

    def step(self):
        for name in self.store.names():
            adadelta_update(self.store[name], self.store.grad(name),
                            self.accum_grad_sq[name],
                            self.accum_update_sq[name],
                            self.rho, self.eps)
