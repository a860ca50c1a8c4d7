"""Transform update: orthogonal Procrustes per cluster."""
import numpy as np

from .errors import NumericalError
from .sparse_model import as_transform_set


def update_transform(X, B):
    """Unitary ``W`` minimizing ``||W X - B||_F``: ``W = V U^H`` where
    ``X B^H = U S V^H`` (full SVD)."""
    X = np.asarray(X, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if X.shape != B.shape:
        raise ValueError(f"X and B shapes differ: {X.shape} vs {B.shape}")
    M = X @ B.conj().T
    if not np.all(np.isfinite(M)):
        raise NumericalError("non-finite input to Procrustes SVD")
    try:
        U, _, Vh = np.linalg.svd(M, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    return Vh.conj().T @ U.conj().T


def update_all_transforms(patches, codes, labels, transforms):
    """Refit every cluster's transform; empty clusters keep their old one."""
    X = np.asarray(patches)
    B = np.asarray(codes)
    labels = np.asarray(labels)
    W = as_transform_set(transforms).copy()
    for k in range(W.shape[0]):
        sel = labels == k
        if sel.any():
            W[k] = update_transform(X[:, sel], B[:, sel])
    return W
