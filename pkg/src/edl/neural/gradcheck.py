"""Central-difference verification of hand-derived gradients."""

from __future__ import annotations

import numpy as np

from ..errors import NonFiniteLoss


def grad_check(loss_and_grad_fn, store, epsilon=1e-5, rng=None,
               max_coords_per_tensor=None, grad_floor=1e-5):
    """Max relative error between analytic and numeric gradients.

    ``loss_and_grad_fn()`` must return the scalar loss and accumulate
    gradients into the store's grad buffers; grad_check zeroes them
    around every call.  Error per coordinate is
    ``|analytic - numeric| / max(|analytic|, |numeric|, 1e-8)``.

    Central differences at step ``epsilon`` carry roundoff noise of
    roughly ``machine_eps * |loss| / epsilon``, so coordinates whose
    analytic gradient is below ``grad_floor`` cannot be resolved and are
    not sampled (set ``grad_floor=0`` to force-check everything).  When
    ``max_coords_per_tensor`` is set, at most that many eligible
    coordinates per tensor are probed, sampled with ``rng``.
    """
    store.zero_grads()
    loss0 = float(loss_and_grad_fn())
    if not np.isfinite(loss0):
        raise NonFiniteLoss(f"loss {loss0}")
    analytic = {name: store.grad(name).copy() for name in store.names()}

    max_err = 0.0
    for name in store.names():
        flat = store[name].reshape(-1)
        a_flat = analytic[name].reshape(-1)
        coords = np.flatnonzero(np.abs(a_flat) >= grad_floor)
        if max_coords_per_tensor is not None \
                and coords.size > max_coords_per_tensor:
            if rng is None:
                rng = np.random.default_rng(0)
            coords = rng.choice(coords, size=max_coords_per_tensor,
                                replace=False)
        for c in coords:
            orig = flat[c]
            flat[c] = orig + epsilon
            store.zero_grads()
            loss_plus = float(loss_and_grad_fn())
            flat[c] = orig - epsilon
            store.zero_grads()
            loss_minus = float(loss_and_grad_fn())
            flat[c] = orig
            if not (np.isfinite(loss_plus) and np.isfinite(loss_minus)):
                raise NonFiniteLoss(f"perturbed loss at {name}[{c}]")
            numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
            err = abs(a_flat[c] - numeric) / max(abs(a_flat[c]),
                                                 abs(numeric), 1e-8)
            max_err = max(max_err, err)
    store.zero_grads()
    return max_err
