"""Complex images and the unitary 2D Fourier transform.

Images are plain ``complex128`` numpy arrays of shape ``(height, width)``.
All transforms use the orthonormal DFT (scale ``1/sqrt(p)`` both ways) so
that ``F^H F = I``.
"""
import numpy as np

from .errors import InvalidInputError


def as_image(img, name="image"):
    """Validate and promote ``img`` to a 2D complex128 array."""
    a = np.asarray(img)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2D array, got shape {a.shape}")
    a = a.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return a


def fft2(img):
    """Unitary 2D DFT (unshifted)."""
    return np.fft.fft2(as_image(img), norm="ortho")


def ifft2(ksp):
    """Inverse of :func:`fft2`."""
    return np.fft.ifft2(as_image(ksp, "k-space"), norm="ortho")


def simulate_kspace(img):
    """Centered k-space, ``fftshift(fft2(ifftshift(x)))`` with unitary scaling.

    DC lands at ``(h // 2, w // 2)``.
    """
    x = as_image(img)
    return np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(x), norm="ortho"))


def unsimulate_kspace(ksp):
    """Inverse of :func:`simulate_kspace`."""
    k = as_image(ksp, "k-space")
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(k), norm="ortho"))
