"""Closed-form image update for single-coil Cartesian MRI.

With wrap-around patches the normal matrix is diagonal in (unshifted)
k-space, so the constrained least-squares image update reduces to a
pointwise division plus a scalar search for the Lagrange multiplier of the
norm bound ``||x||_2 <= C``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalError
from .grid import ifft2

NEWTON_MAX_ITER = 100
ROOT_RTOL = 1e-9


@dataclass
class ImageUpdateInputs:
    """k-space quantities for the image update (unshifted coordinates).

    S is the spectrum of the patch feedback image ``sum_j P_j^T W^H b_j``;
    S0 is the zero-filled measured spectrum, zero off ``mask``.
    """
    S: np.ndarray
    S0: np.ndarray
    beta: float
    nu: float
    C: float
    mask: np.ndarray

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=np.complex128)
        self.S0 = np.asarray(self.S0, dtype=np.complex128)
        self.mask = np.asarray(self.mask, dtype=bool)
        if not (self.S.shape == self.S0.shape == self.mask.shape):
            raise InvalidInputError("S, S0 and mask must share one shape")
        if not (np.all(np.isfinite(self.S)) and np.all(np.isfinite(self.S0))):
            raise InvalidInputError("non-finite k-space input")
        if np.any(self.S0[~self.mask] != 0):
            raise InvalidInputError("S0 must vanish outside the sampled set")
        if not (self.beta > 0 and self.nu >= 0 and self.C > 0):
            raise InvalidInputError("beta and C must be positive, nu non-negative")


def _energies(inputs):
    m = inputs.mask
    off = np.sum(np.abs(inputs.S[~m]) ** 2)
    on = np.sum(np.abs(inputs.S[m] + inputs.nu * inputs.S0[m]) ** 2)
    return off, on


def multiplier_f(mu, inputs, _energy=None):
    """``||x_mu||_2^2`` for the image solving the shifted normal equation."""
    off, on = _energy if _energy is not None else _energies(inputs)
    b, v = inputs.beta, inputs.nu
    return off / (b + mu) ** 2 + on / (b + v + mu) ** 2


def _f_prime(mu, inputs, energy):
    off, on = energy
    b, v = inputs.beta, inputs.nu
    return -2.0 * off / (b + mu) ** 3 - 2.0 * on / (b + v + mu) ** 3


def kspace_solution(mu, inputs):
    """Pointwise k-space image at multiplier ``mu``."""
    b, v = inputs.beta, inputs.nu
    return np.where(inputs.mask,
                    (inputs.S + v * inputs.S0) / (b + v + mu),
                    inputs.S / (b + mu))


def find_multiplier(inputs):
    """Smallest ``mu >= 0`` with ``f(mu) <= C^2``.

    Newton on ``f(mu) - C^2`` from ``mu = 0``; ``f`` is convex and
    decreasing so the iterates increase monotonically, but each step is
    still kept inside a bisection bracket.
    """
    energy = _energies(inputs)
    target = inputs.C ** 2
    if multiplier_f(0.0, inputs, energy) <= target:
        return 0.0

    lo, hi = 0.0, inputs.beta
    while multiplier_f(hi, inputs, energy) >= target:
        hi *= 2.0
        if not np.isfinite(hi):
            raise NumericalError("could not bracket the norm-constraint multiplier")

    mu = 0.0
    for _ in range(NEWTON_MAX_ITER):
        g = multiplier_f(mu, inputs, energy) - target
        if abs(g) <= ROOT_RTOL * target:
            return mu
        if g > 0:
            lo = mu
        else:
            hi = mu
        step = mu - g / _f_prime(mu, inputs, energy)
        mu = step if lo < step < hi else 0.5 * (lo + hi)

    # Newton stalled: finish by plain bisection
    for _ in range(400):
        mu = 0.5 * (lo + hi)
        g = multiplier_f(mu, inputs, energy) - target
        if abs(g) <= ROOT_RTOL * target or hi - lo <= 1e-15 * hi:
            break
        if g > 0:
            lo = mu
        else:
            hi = mu
    return mu


def solve_image(inputs):
    """Exact minimizer of the image subproblem.

    Returns
    -------
    x : (h, w) complex array
    mu_hat : float
    """
    mu = find_multiplier(inputs)
    return ifft2(kspace_solution(mu, inputs)), mu
