"""Shared test oracles, kept independent of the library's propagator path."""

import numpy as np
from scipy.linalg import expm


def trotter_propagator(h_a, h_b, t, n_steps=10_000):
    """Second-order Trotter product for exp(-1j (A + B) t).

    Uses Pade-based expm for the split factors (a different algorithm from
    the library's eigendecomposition) and a matrix power for the repeated
    step, which is algebraically the n-step product.
    """
    dt = t / n_steps
    half_a = expm(-0.5j * h_a * dt)
    step = half_a @ expm(-1j * h_b * dt) @ half_a
    return np.linalg.matrix_power(step, n_steps)
