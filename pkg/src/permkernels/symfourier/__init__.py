"""Representation theory and Fourier analysis on the symmetric group."""

from .combinatorics import (
    Partition,
    conjugate,
    content,
    count_tabloids,
    dominates,
    hook_length_dimension,
    hook_partition,
    irrep_dimension,
    kostka_number,
    partitions,
    standard_tableaux,
    strictly_below,
    tabloids,
    validate_partition,
)
from .representations import adjacent_matrix, iter_yor, tau_matrix, tau_transform, yor_matrix, yor_tensor
from .spectrum import (
    BlockSpectrum,
    SpectrumReport,
    Thresholds,
    james_dimension_check,
    james_eigen_comparison,
    kendall_tau_closed_form,
    kendall_tau_transforms,
    kernel_function,
    spectrum_report,
)
from .transform import FourierTransform, convolve, fourier_inner, fourier_transform, inverse_fourier, reflect

__all__ = [name for name in dir() if not name.startswith("_")]
