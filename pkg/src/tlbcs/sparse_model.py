"""Hard-thresholding sparse coding and patch clustering over a union of
unitary transforms.

A transform set is an array of shape ``(K, n, n)``. Cluster labels are
0-based integers in ``[0, K)``; ties in the cluster choice go to the lowest
index.
"""
import itertools

import numpy as np

from .errors import InvalidInputError

# Costs within this relative gap count as tied. Exact ties are common (a
# patch whose coefficients are all thresholded costs ||x_j||^2 under every
# unitary transform) and must not be decided by roundoff.
TIE_RTOL = 1e-12


def as_transform_set(transforms):
    W = np.asarray(transforms, dtype=np.complex128)
    if W.ndim == 2:
        W = W[None]
    if W.ndim != 3 or W.shape[1] != W.shape[2]:
        raise InvalidInputError(f"transforms must have shape (K, n, n), got {W.shape}")
    return W


def unitarity_error(transforms):
    """Largest ``||W_k^H W_k - I||_F`` over the set."""
    W = as_transform_set(transforms)
    eye = np.eye(W.shape[1])
    return max(np.linalg.norm(Wk.conj().T @ Wk - eye) for Wk in W)


def hard_threshold(v, eta):
    """Zero entries with ``|v_i| < eta``; entries with ``|v_i| >= eta`` are kept."""
    v = np.asarray(v)
    return np.where(np.abs(v) >= eta, v, 0)


def patch_cost(z, eta):
    """Sparse coding cost ``||z - H(z)||^2 + eta^2 ||H(z)||_0`` along axis 0."""
    z = np.asarray(z)
    b = hard_threshold(z, eta)
    return np.sum(np.abs(z - b) ** 2, axis=0) + eta ** 2 * np.count_nonzero(b, axis=0)


def _cost_min_form(z, eta):
    # equal to patch_cost: each entry contributes min(|z_i|^2, eta^2)
    return np.minimum(z.real ** 2 + z.imag ** 2, eta ** 2).sum(axis=0)


def sparse_code_and_cluster(patches, transforms, eta, labels=None):
    """Jointly pick each patch's transform and its sparse code.

    Parameters
    ----------
    patches : (n, N) complex array
    transforms : (K, n, n) complex array of unitary matrices
    eta : float
        Threshold; the sparsity penalty weight is ``eta**2``.
    labels : (N,) int array, optional
        If given, clustering is skipped and patches are coded in these
        clusters.

    Returns
    -------
    codes : (n, N) complex array
    labels : (N,) int array
    """
    X = np.asarray(patches, dtype=np.complex128)
    W = as_transform_set(transforms)
    K, n, _ = W.shape
    if X.ndim != 2 or X.shape[0] != n:
        raise InvalidInputError(f"patch matrix shape {X.shape} incompatible with n={n}")
    N = X.shape[1]

    if labels is not None:
        labels = np.asarray(labels, dtype=np.intp)
        Z = np.empty_like(X)
        for k in range(K):
            sel = labels == k
            if sel.any():
                Z[:, sel] = W[k] @ X[:, sel]
        return hard_threshold(Z, eta), labels

    if K == 1:
        return hard_threshold(W[0] @ X, eta), np.zeros(N, dtype=np.intp)

    best = np.full(N, np.inf)
    out_labels = np.zeros(N, dtype=np.intp)
    Z = np.empty_like(X)
    for k in range(K):
        Zk = W[k] @ X
        cost = _cost_min_form(Zk, eta)
        better = cost < best * (1.0 - TIE_RTOL)  # earlier index wins ties
        best[better] = cost[better]
        out_labels[better] = k
        Z[:, better] = Zk[:, better]
    return hard_threshold(Z, eta), out_labels


def coding_objective(patches, transforms, codes, labels, eta):
    """``sum_j ||W_{label_j} x_j - b_j||^2 + eta^2 ||b_j||_0``."""
    X = np.asarray(patches)
    W = as_transform_set(transforms)
    B = np.asarray(codes)
    labels = np.asarray(labels)
    total = 0.0
    for k in range(W.shape[0]):
        sel = labels == k
        if sel.any():
            R = W[k] @ X[:, sel] - B[:, sel]
            total += np.vdot(R, R).real
    return total + eta ** 2 * np.count_nonzero(B)


def cluster_sizes(labels, K):
    return np.bincount(np.asarray(labels), minlength=K)


def _best_s_sparse_error(z, s):
    """Error of the best s-term approximation of z (keep the s largest)."""
    mags = np.sort(np.abs(z) ** 2)
    return float(mags[: len(z) - s].sum())


def octobos_equivalence_check(z, transforms, s, rtol=1e-12):
    """Check that union-of-transforms and OCTOBOS sparse coding agree.

    The union side takes, for each transform, the best s-sparse approximation
    of ``W_k z`` by magnitude sorting. The OCTOBOS side works on the stacked
    transform ``[W_1; ...; W_K]`` and enumerates which block is cosparse and
    every size-s support in that block; the remaining blocks are free and
    contribute zero error.
    """
    W = as_transform_set(transforms)
    K, n, _ = W.shape
    z = np.asarray(z, dtype=np.complex128)
    if not 0 <= s <= n:
        raise InvalidInputError(f"sparsity s={s} outside [0, {n}]")

    union_err = min(_best_s_sparse_error(Wk @ z, s) for Wk in W)

    stacked = (W.reshape(K * n, n) @ z).reshape(K, n)
    octobos_err = np.inf
    for k in range(K):
        block = stacked[k]
        for support in itertools.combinations(range(n), s):
            off = np.ones(n, dtype=bool)
            off[list(support)] = False
            octobos_err = min(octobos_err, float(np.sum(np.abs(block[off]) ** 2)))

    scale = max(union_err, octobos_err, np.vdot(z, z).real)
    return bool(abs(union_err - octobos_err) <= rtol * scale + 1e-300)
