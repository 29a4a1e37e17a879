"""Gaussian random-walk transition prior, used directly as the proposal."""

from __future__ import annotations

import numpy as np

from .core import StateVector

MIN_BOX = 1.0


def make_rng(seed: int) -> np.random.Generator:
    """The generator every run draws from: PCG64 seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def propagate_states(
    states: np.ndarray,
    sigma_diag,
    rng: np.random.Generator,
    constant_velocity: bool = False,
) -> np.ndarray:
    """Draw ``X_t ~ N(mean, diag(sigma_diag**2))`` for every row of ``states``.

    The mean is the previous state; with ``constant_velocity`` the position
    is first advanced by the velocity.  Noise is drawn as one
    ``(N, 6)`` standard-normal block, so row ``i`` consumes the same stream
    positions as the ``i``-th of ``N`` successive :func:`propagate` calls.
    """
    states = np.asarray(states, dtype=np.float64)
    sigma = np.asarray(sigma_diag, dtype=np.float64)
    if sigma.shape != (6,) or np.any(sigma < 0):
        raise ValueError("sigma_diag must be 6 non-negative numbers")
    mean = states.copy()
    if constant_velocity:
        mean[:, 0:2] += mean[:, 2:4]
    out = mean + rng.standard_normal(states.shape) * sigma
    np.maximum(out[:, 4:6], MIN_BOX, out=out[:, 4:6])
    return out


def propagate(
    s: StateVector,
    sigma_diag,
    rng: np.random.Generator,
    constant_velocity: bool = False,
) -> StateVector:
    return StateVector.from_array(propagate_states(s.as_array()[None, :], sigma_diag, rng, constant_velocity)[0])
