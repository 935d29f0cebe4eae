"""Kernels on the symmetric group: evaluation, feature maps, Fourier analysis, MMD tests and ridge regression."""

from .distribution import DistributionOnSd
from .kernels import GramMatrix, KernelSpec, eval_kernel, gram, kernel_self_norm
from .perm import (
    Permutation,
    adjacent_decomposition,
    compose,
    count_inversions,
    discordant_pairs,
    enumerate_sn,
    from_index,
    inverse,
    perm_index,
)

__version__ = "0.1.0"
