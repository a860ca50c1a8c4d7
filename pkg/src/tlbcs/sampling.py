"""Sampling masks, simulated measurements and zero-filled reconstruction.

Masks live on the centered k-space grid produced by
:func:`tlbcs.grid.simulate_kspace` (DC at ``(h // 2, w // 2)``).
Measurements ``y`` are the sampled values in row-major mask order.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidInputError
from .grid import as_image, fft2, simulate_kspace, unsimulate_kspace

DENSITY_POWER = 4
CENTER_FRACTION = 0.04


@dataclass(frozen=True, eq=False)
class SamplingMask:
    mask: np.ndarray
    undersampling: float
    seed: int = 0

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.ndim != 2:
            raise InvalidInputError("mask must be 2D")
        if not m.any():
            raise InvalidInputError("mask samples nothing")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_array(cls, mask, seed=0):
        m = np.asarray(mask, dtype=bool)
        return cls(m, m.size / max(int(m.sum()), 1), seed)

    @property
    def shape(self):
        return self.mask.shape

    @property
    def num_samples(self):
        return int(self.mask.sum())

    def unshifted(self):
        """Mask in ``np.fft.fft2`` (unshifted) coordinates."""
        return np.fft.ifftshift(self.mask)


def _check_uf(undersampling):
    if not undersampling > 1:
        raise ConfigError(f"undersampling factor must exceed 1, got {undersampling}",
                          ["undersampling"])


def _weighted_pick(rng, candidates, weights, count):
    if count <= 0:
        return np.empty(0, dtype=int)
    p = weights / weights.sum()
    return rng.choice(candidates, size=count, replace=False, p=p)


def make_cartesian_mask(height, width, undersampling, seed=0):
    """Variable-density random phase encodes (whole k-space rows)."""
    _check_uf(undersampling)
    lines = math.ceil(height / undersampling)
    if lines > height:
        raise ConfigError("requested lines exceed height", ["undersampling"])
    rng = np.random.default_rng(seed)
    center = height // 2
    dist = np.abs(np.arange(height) - center).astype(float)
    order = np.argsort(dist, kind="stable")
    n_center = min(lines, max(1, round(CENTER_FRACTION * height)))
    chosen = order[:n_center]
    rest = order[n_center:]
    dmax = dist.max() + 1.0
    w = (1.0 - dist[rest] / dmax) ** DENSITY_POWER
    chosen = np.concatenate([chosen, _weighted_pick(rng, rest, w, lines - n_center)])
    mask = np.zeros((height, width), dtype=bool)
    mask[chosen, :] = True
    return SamplingMask(mask, undersampling, seed)


def make_random2d_mask(height, width, undersampling, seed=0):
    """Variable-density random 2D sampling of individual k-space locations."""
    _check_uf(undersampling)
    p = height * width
    count = math.ceil(p / undersampling)
    rng = np.random.default_rng(seed)
    ky = (np.arange(height) - height // 2) / height
    kx = (np.arange(width) - width // 2) / width
    dist = np.hypot(ky[:, None], kx[None, :]).ravel()
    order = np.argsort(dist, kind="stable")
    n_center = min(count, max(1, round(CENTER_FRACTION * p)))
    chosen = order[:n_center]
    rest = order[n_center:]
    dmax = dist.max() + 1.0 / max(height, width)
    w = (1.0 - dist[rest] / dmax) ** DENSITY_POWER
    chosen = np.concatenate([chosen, _weighted_pick(rng, rest, w, count - n_center)])
    mask = np.zeros(p, dtype=bool)
    mask[chosen] = True
    return SamplingMask(mask.reshape(height, width), undersampling, seed)


def measure(img, mask, noise_sigma=0.0, seed=0):
    """Sampled centered k-space values, optionally with complex Gaussian noise.

    ``noise_sigma`` is the standard deviation of each of the real and
    imaginary parts.
    """
    x = as_image(img)
    if x.shape != mask.shape:
        raise InvalidInputError(f"image shape {x.shape} != mask shape {mask.shape}")
    y = simulate_kspace(x)[mask.mask]
    if noise_sigma > 0:
        # offset stream so the noise never correlates with the mask draw
        rng = np.random.default_rng([seed, 1])
        noise = rng.standard_normal((2, y.size))
        y = y + noise_sigma * (noise[0] + 1j * noise[1])
    return y


def zero_filled_spectrum(y, mask):
    """Centered full-size k-space with zeros at unsampled locations."""
    y = np.asarray(y, dtype=np.complex128).ravel()
    if y.size != mask.num_samples:
        raise InvalidInputError(f"got {y.size} measurements for a mask with "
                                f"{mask.num_samples} samples")
    S0 = np.zeros(mask.shape, dtype=np.complex128)
    S0[mask.mask] = y
    return S0


def zero_fill(y, mask):
    """Adjoint of :func:`measure` (noiseless): zero-filled image."""
    return unsimulate_kspace(zero_filled_spectrum(y, mask))


def solver_data(y, mask):
    """Measured data converted to the solver's unshifted k-space frame.

    Returns ``(S0, omega)`` with ``S0 = fft2(A^H y)`` supported on ``omega``.
    The data term then reads ``||omega * fft2(x) - S0||``.
    """
    omega = mask.unshifted()
    S0 = fft2(zero_fill(y, mask))
    S0[~omega] = 0  # remove roundoff outside the support
    return S0, omega
