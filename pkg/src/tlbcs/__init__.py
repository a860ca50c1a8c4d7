"""Blind compressed sensing MRI with learned unitary sparsifying transforms.

Joint image reconstruction from undersampled Fourier data and learning of a
single unitary transform (``K = 1``) or a union of ``K`` unitary transforms
with patch clustering.
"""
from .errors import ConfigError, InfeasibleIterateError, InvalidInputError, NumericalError
from .grid import fft2, ifft2, simulate_kspace, unsimulate_kspace
from .image_update import ImageUpdateInputs, multiplier_f, solve_image
from .metrics import hfen, pixel_cluster_map, psnr
from .objective import IterationStats, evaluate_g, evaluate_h
from .patches import PatchGeometry, aggregate_patches, extract_patches
from .phantom import shepp_logan
from .reconstructor import ReconstructionResult, SolverConfig, initialize, reconstruct
from .sampling import (SamplingMask, make_cartesian_mask, make_random2d_mask, measure,
                       zero_fill)
from .sparse_model import (hard_threshold, octobos_equivalence_check, patch_cost,
                           sparse_code_and_cluster)
from .transform_update import update_all_transforms, update_transform

__version__ = "0.1.0"
