"""Block coordinate descent for blind compressed sensing with a union of
learned unitary transforms.

Each outer iteration runs, in order: transform update, sparse coding and
clustering, image update. ``K = 1`` gives the single-transform method.
"""
import logging
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.fft import dct

from .errors import ConfigError, InfeasibleIterateError
from .grid import fft2
from .image_update import ImageUpdateInputs, solve_image
from .metrics import hfen, psnr
from .objective import IterationStats, check_feasible, data_fidelity, evaluate_h
from .patches import PatchGeometry, aggregate_patches, extract_patches
from .sampling import solver_data, zero_fill
from .sparse_model import coding_objective, sparse_code_and_cluster
from .transform_update import update_all_transforms

log = logging.getLogger(__name__)

INIT_CHOICES = ("random", "kmeans", "provided")
MONOTONE_RTOL = 1e-9


@dataclass
class SolverConfig:
    """Solver parameters. ``nu=None`` means ``1e6 / p``; ``eta_initial=None``
    means ``4 * eta``."""
    K: int = 16
    patch_side: int = 6
    stride: int = 1
    nu: Optional[float] = None
    eta: float = 0.007
    eta_initial: Optional[float] = None
    eta_warmup_iters: int = 30
    C: float = 1e5
    iterations: int = 120
    cluster_every_m: int = 1
    init_clustering: str = "random"
    seed: int = 0
    debug: bool = False
    initial_labels: Optional[np.ndarray] = field(default=None, repr=False)

    def validate(self):
        bad = []
        for name in ("K", "patch_side", "stride", "iterations", "cluster_every_m"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                bad.append(name)
        if not isinstance(self.eta_warmup_iters, (int, np.integer)) or self.eta_warmup_iters < 0:
            bad.append("eta_warmup_iters")
        if not self.eta > 0:
            bad.append("eta")
        if self.eta_initial is not None and not self.eta_initial >= self.eta:
            bad.append("eta_initial")
        if self.nu is not None and not self.nu > 0:
            bad.append("nu")
        if not self.C > 0:
            bad.append("C")
        if self.init_clustering not in INIT_CHOICES:
            bad.append("init_clustering")
        elif self.init_clustering == "provided" and self.initial_labels is None and self.K > 1:
            bad.append("initial_labels")
        if bad:
            raise ConfigError("invalid configuration keys: " + ", ".join(bad), bad)
        return self

    def eta_at(self, t):
        """Threshold used in (1-based) iteration ``t``."""
        start = 4 * self.eta if self.eta_initial is None else self.eta_initial
        warm = self.eta_warmup_iters
        if warm == 0 or t > warm:
            return self.eta
        return start * (self.eta / start) ** ((t - 1) / warm)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls) if f.name not in ("initial_labels",)]


@dataclass
class ReconstructionResult:
    image: np.ndarray
    transforms: np.ndarray
    codes: np.ndarray
    labels: np.ndarray
    stats: list


def dct_matrix(n):
    """Orthonormal 1D DCT-II matrix."""
    return dct(np.eye(n), norm="ortho", axis=0)


def dct2_matrix(d):
    """2D DCT acting on column-major vectorized ``d x d`` patches."""
    D = dct_matrix(d)
    return np.kron(D, D)


def _initial_labels(X, config, rng):
    K, N = config.K, X.shape[1]
    if K == 1:
        return np.zeros(N, dtype=np.intp)
    if config.init_clustering == "provided":
        labels = np.asarray(config.initial_labels, dtype=np.intp)
        if labels.shape != (N,) or labels.min() < 0 or labels.max() >= K:
            raise ConfigError(f"initial_labels must be {N} integers in [0, {K})",
                              ["initial_labels"])
        return labels.copy()
    if config.init_clustering == "kmeans":
        feats = np.concatenate([X.real, X.imag]).T
        _, labels = kmeans2(feats, K, iter=10, minit="++", seed=rng)
        return labels.astype(np.intp)
    return rng.integers(0, K, size=N).astype(np.intp)


def initialize(y, mask, config):
    """Zero-filled image, DCT transforms, initial clusters and matching codes."""
    config.validate()
    h, w = mask.shape
    geom = PatchGeometry(config.patch_side, config.stride, h, w)
    rng = np.random.default_rng(config.seed)
    x0 = zero_fill(y, mask)
    norm = np.linalg.norm(x0)
    if norm > config.C:
        x0 = x0 * (config.C / norm)
    W0 = np.repeat(dct2_matrix(config.patch_side)[None].astype(np.complex128), config.K, axis=0)
    X = extract_patches(x0, geom)
    labels0 = _initial_labels(X, config, rng)
    eta1 = config.eta_at(1)
    B0, _ = sparse_code_and_cluster(X, W0, eta1, labels=labels0)
    return x0, W0, labels0, B0


def reconstruct(y, mask, config, reference=None):
    """Run the alternating minimization for ``config.iterations`` iterations.

    Parameters
    ----------
    y : (m,) complex array
        Measurements at the sampled locations of ``mask`` (row-major order).
    mask : SamplingMask
    config : SolverConfig
    reference : (h, w) array, optional
        Ground truth for PSNR/HFEN tracking.

    Returns
    -------
    ReconstructionResult
    """
    config.validate()
    h, w = mask.shape
    geom = PatchGeometry(config.patch_side, config.stride, h, w)
    nu = 1e6 / (h * w) if config.nu is None else config.nu
    K, C, beta = config.K, config.C, geom.beta
    S0, omega = solver_data(y, mask)

    x, W, labels, B = initialize(y, mask, config)
    stats = []
    prev_h, prev_eta = None, None

    def h_of(xx, WW, BB, ll, eta):
        return evaluate_h(xx, WW, BB, ll, S0, omega, geom, nu, eta, C)

    for t in range(1, config.iterations + 1):
        eta = config.eta_at(t)
        X = extract_patches(x, geom)
        if config.debug:
            steps = [h_of(x, W, B, labels, eta)]

        W = update_all_transforms(X, B, labels, W)
        if config.debug:
            steps.append(h_of(x, W, B, labels, eta))

        recluster = K > 1 and (t - 1) % config.cluster_every_m == 0
        B, labels = sparse_code_and_cluster(X, W, eta, labels=None if recluster else labels)
        if config.debug:
            steps.append(h_of(x, W, B, labels, eta))

        feedback = np.empty_like(X)
        for k in range(K):
            sel = labels == k
            if sel.any():
                feedback[:, sel] = W[k].conj().T @ B[:, sel]
        S = fft2(aggregate_patches(feedback, geom))
        x_new, mu = solve_image(ImageUpdateInputs(S, S0, beta, nu, C, omega))

        try:
            check_feasible(x_new, W, labels, K, C)
        except InfeasibleIterateError as exc:
            raise InfeasibleIterateError(f"iteration {t}: {exc}") from exc

        objective = nu * data_fidelity(x_new, S0, omega) + coding_objective(
            extract_patches(x_new, geom), W, B, labels, eta)
        if config.debug:
            steps.append(objective)
            for a, b in zip(steps, steps[1:]):
                if b > a + MONOTONE_RTOL * abs(a):
                    raise AssertionError(f"iteration {t}: sub-step increased objective "
                                         f"{a!r} -> {b!r}")
            if prev_eta == eta and objective > prev_h + MONOTONE_RTOL * abs(prev_h):
                raise AssertionError(f"iteration {t}: objective rose {prev_h!r} -> {objective!r}")

        delta_x = float(np.linalg.norm(x_new - x))
        x = x_new
        st = IterationStats(
            t=t,
            objective=float(objective),
            sparsity=np.count_nonzero(B) / B.size,
            delta_x=delta_x,
            mu_hat=float(mu),
            cluster_sizes=np.bincount(labels, minlength=K).tolist(),
            eta=eta,
        )
        if reference is not None:
            st.psnr = psnr(x, reference)
            st.hfen = hfen(x, reference)
        stats.append(st)
        log.debug("iter %d h=%.6e sparsity=%.4f dx=%.3e", t, objective, st.sparsity, delta_x)
        prev_h, prev_eta = objective, eta

    return ReconstructionResult(image=x, transforms=W, codes=B, labels=labels, stats=stats)
