"""Objective evaluation and per-iteration diagnostics."""
import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InfeasibleIterateError
from .grid import fft2
from .patches import extract_patches
from .sparse_model import coding_objective, unitarity_error

UNITARY_TOL = 1e-10
NORM_RTOL = 1e-9


@dataclass
class IterationStats:
    t: int
    objective: float
    sparsity: float
    delta_x: float
    mu_hat: float
    cluster_sizes: list
    psnr: Optional[float] = None
    hfen: Optional[float] = None
    eta: float = field(default=float("nan"), repr=False)


def data_fidelity(x, S0, omega):
    """``||A x - y||_2^2`` expressed in unshifted k-space."""
    r = np.where(omega, fft2(x), 0) - S0
    return np.vdot(r, r).real


def check_feasible(x, transforms, labels, K, C):
    """Raise :class:`InfeasibleIterateError` if any constraint set is violated."""
    err = unitarity_error(transforms)
    if not err < UNITARY_TOL:
        raise InfeasibleIterateError(f"transform unitarity error {err:.3e}")
    norm = np.linalg.norm(x)
    if not norm <= C * (1 + NORM_RTOL):
        raise InfeasibleIterateError(f"||x||_2 = {norm:.6g} exceeds C = {C:.6g}")
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= K):
        raise InfeasibleIterateError("cluster labels outside [0, K)")


def evaluate_h(x, transforms, codes, labels, S0, omega, geom, nu, eta, C):
    """Objective ``nu ||Ax - y||^2 + sum_j ||W_{k_j} P_j x - b_j||^2 + eta^2 ||b_j||_0``.

    Raises InfeasibleIterateError instead of returning +inf when an iterate
    lies outside the constraint sets.
    """
    W = np.asarray(transforms)
    check_feasible(x, W, labels, W.shape[0], C)
    X = extract_patches(x, geom)
    return nu * data_fidelity(x, S0, omega) + coding_objective(X, W, codes, labels, eta)


def evaluate_g(x, transform, codes, S0, omega, geom, nu, eta, C):
    """Single-transform objective; same as :func:`evaluate_h` with K = 1."""
    W = np.asarray(transform).reshape(1, *np.shape(transform)[-2:])
    labels = np.zeros(np.shape(codes)[1], dtype=np.intp)
    return evaluate_h(x, W, codes, labels, S0, omega, geom, nu, eta, C)


def _fmt(v):
    if v is None:
        return ""
    return repr(float(v))


def write_stats_csv(path, stats):
    K = len(stats[0].cluster_sizes) if stats else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "objective", "sparsity", "delta_x", "mu_hat", "psnr", "hfen"]
                   + [f"cluster_size_{k}" for k in range(K)])
        for s in stats:
            w.writerow([s.t, _fmt(s.objective), _fmt(s.sparsity), _fmt(s.delta_x),
                        _fmt(s.mu_hat), _fmt(s.psnr), _fmt(s.hfen)]
                       + [int(c) for c in s.cluster_sizes])


def read_stats_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
