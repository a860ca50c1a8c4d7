"""Periodic patch extraction and its adjoint.

Patches wrap around the image borders, so with a stride ``r`` dividing both
image dimensions and the patch side every pixel is covered by exactly ``n / r**2`` patches and
``sum_j P_j^T P_j = beta * I``.

Patch vectors are column-major within the ``d x d`` window; patches are
enumerated row-major over the grid of top-left offsets.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, InvalidInputError


@dataclass(frozen=True)
class PatchGeometry:
    patch_side: int
    stride: int
    height: int
    width: int

    def __post_init__(self):
        d, r, h, w = self.patch_side, self.stride, self.height, self.width
        bad = [k for k, v in (("patch_side", d), ("stride", r), ("height", h), ("width", w))
               if int(v) != v or v < 1]
        if bad:
            raise ConfigError(f"non-positive or non-integer geometry fields: {bad}", bad)
        if d > min(h, w):
            raise ConfigError(f"patch side {d} exceeds image size {h}x{w}", ["patch_side"])
        if h % r or w % r:
            raise ConfigError(f"stride {r} must divide image dimensions {h}x{w}", ["stride"])
        if d % r:
            # otherwise pixels are covered unevenly and sum_j P_j^T P_j != beta I
            raise ConfigError(f"stride {r} must divide patch side {d}", ["stride"])

    @property
    def n(self):
        return self.patch_side ** 2

    @property
    def num_patches(self):
        return (self.height // self.stride) * (self.width // self.stride)

    @property
    def beta(self):
        return self.n / self.stride ** 2

    @property
    def shape(self):
        return (self.height, self.width)

    def indices(self):
        """``(n, N)`` array of flat pixel indices; column j lists patch j's pixels."""
        return _patch_indices(self.patch_side, self.stride, self.height, self.width)


@lru_cache(maxsize=32)
def _patch_indices(d, r, h, w):
    i0 = np.arange(0, h, r)
    j0 = np.arange(0, w, r)
    a = np.arange(d)
    # window element (a, b) sits at vector position a + d*b (column-major)
    rows = (i0[None, :, None] + a[:, None, None]) % h          # (d, nI, 1)
    cols = (j0[None, None, :] + a[:, None, None]) % w          # (d, 1, nJ)
    flat = rows[None, :, :, :] * w + cols[:, None, :, :]       # (b, a, nI, nJ)
    idx = flat.reshape(d * d, len(i0) * len(j0))
    idx.setflags(write=False)
    return idx


def extract_patches(img, geom):
    """Return the ``(n, N)`` complex patch matrix of ``img``."""
    x = np.asarray(img)
    if x.shape != geom.shape:
        raise InvalidInputError(f"image shape {x.shape} does not match geometry {geom.shape}")
    return x.astype(np.complex128, copy=False).ravel()[geom.indices()]


def aggregate_patches(patches, geom):
    """Adjoint of :func:`extract_patches`: ``sum_j P_j^T patches[:, j]``."""
    Y = np.asarray(patches)
    idx = geom.indices()
    if Y.shape != idx.shape:
        raise InvalidInputError(f"patch matrix shape {Y.shape} != expected {idx.shape}")
    p = geom.height * geom.width
    flat = idx.ravel()
    re = np.bincount(flat, weights=Y.real.ravel(), minlength=p)
    im = np.bincount(flat, weights=Y.imag.ravel(), minlength=p)
    return (re + 1j * im).reshape(geom.shape)
