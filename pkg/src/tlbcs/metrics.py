"""Reconstruction quality metrics on magnitude images."""
import numpy as np
from scipy.signal import convolve2d

from .errors import InvalidInputError
from .patches import PatchGeometry

LOG_SIZE = 15
LOG_SIGMA = 1.5


def _magnitudes(recon, reference):
    a = np.abs(np.asarray(recon))
    b = np.abs(np.asarray(reference))
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def psnr(recon, reference):
    """PSNR in dB between magnitudes; ``inf`` when they coincide.

    The peak is the maximum magnitude of the reference.
    """
    a, b = _magnitudes(recon, reference)
    peak = b.max()
    if peak == 0:
        raise InvalidInputError("reference image is identically zero")
    rmse = np.sqrt(np.mean((a - b) ** 2))
    if rmse == 0:
        return float("inf")
    return float(20.0 * np.log10(peak / rmse))


def log_kernel(size=LOG_SIZE, sigma=LOG_SIGMA):
    """Rotationally symmetric Laplacian of Gaussian, shifted to zero sum."""
    half = size // 2
    t = np.arange(-half, half + 1, dtype=float)
    r2 = t[:, None] ** 2 + t[None, :] ** 2
    k = (r2 - 2 * sigma ** 2) / (2 * np.pi * sigma ** 6) * np.exp(-r2 / (2 * sigma ** 2))
    return k - k.mean()


def hfen(recon, reference):
    """l2 norm of the LoG-filtered magnitude difference (zero-padded borders)."""
    a, b = _magnitudes(recon, reference)
    k = log_kernel()
    fa = convolve2d(a, k, mode="same", boundary="fill")
    fb = convolve2d(b, k, mode="same", boundary="fill")
    return float(np.linalg.norm(fa - fb))


def pixel_cluster_map(labels, geom: PatchGeometry, K=None):
    """Label each pixel by majority vote of the patches covering it.

    Ties go to the lowest cluster index.
    """
    labels = np.asarray(labels, dtype=np.intp)
    idx = geom.indices()
    if labels.shape != (idx.shape[1],):
        raise InvalidInputError(f"expected {idx.shape[1]} labels, got {labels.shape}")
    K = int(labels.max()) + 1 if K is None else K
    p = geom.height * geom.width
    votes = np.zeros((K, p), dtype=np.int64)
    for k in range(K):
        cols = idx[:, labels == k].ravel()
        votes[k] = np.bincount(cols, minlength=p)
    return votes.argmax(axis=0).reshape(geom.shape)
