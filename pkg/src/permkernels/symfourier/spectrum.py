"""Spectral certification of right-invariant kernels.

A right-invariant kernel ``k(sigma, sigma') = f(sigma' sigma^{-1})`` with
``f(pi) = k(e, pi)`` is positive definite iff every Fourier block of ``f`` is
positive semi-definite. :func:`spectrum_report` reports, per partition, the
block's rank and eigenvalue range together with zero / PSD / strict-PD flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..kernels import KernelSpec, kernel_from_discordant
from ..perm import count_inversions, enumerate_sn
from .combinatorics import Partition, irrep_dimension, kostka_number, partitions, tabloids
from .representations import tau_transform
from .transform import FourierTransform, fourier_transform


@dataclass(frozen=True)
class Thresholds:
    zero_rel: float = 1e-9  # max|entry| < zero_rel * d!
    rank_rel: float = 1e-9  # sigma_i > rank_rel * sigma_max
    strict_pd_rel: float = 1e-8  # min eig > strict_pd_rel * trace / d_lam
    psd_rel: float = 1e-9  # min eig >= -psd_rel * max|eig|


@dataclass(frozen=True)
class BlockSpectrum:
    partition: Partition
    dimension: int
    rank: int
    min_eig: float
    max_eig: float
    is_zero: bool
    is_psd: bool
    is_strict_pd: bool

    def label(self) -> str:
        return "(" + ",".join(str(x) for x in self.partition) + ")"


@dataclass(frozen=True)
class SpectrumReport:
    spec: str
    degree: int
    blocks: tuple[BlockSpectrum, ...]
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __getitem__(self, lam) -> BlockSpectrum:
        lam = tuple(lam)
        for b in self.blocks:
            if b.partition == lam:
                return b
        raise KeyError(lam)

    def nonzero_partitions(self) -> list[Partition]:
        return [b.partition for b in self.blocks if not b.is_zero]

    def zero_partitions(self) -> list[Partition]:
        return [b.partition for b in self.blocks if b.is_zero]

    @property
    def all_psd(self) -> bool:
        return all(b.is_psd for b in self.blocks)

    @property
    def all_strict_pd(self) -> bool:
        return all(b.is_strict_pd for b in self.blocks)

    def to_text(self) -> str:
        lines = [f"# spectrum kernel={self.spec} d={self.degree}"]
        header = f"{'partition':<16}{'dim':>5}{'rank':>6}{'min_eig':>15}{'max_eig':>15}  flags"
        lines.append(header)
        for b in self.blocks:
            flags = [name for name, on in (("zero", b.is_zero), ("psd", b.is_psd), ("strict_pd", b.is_strict_pd)) if on]
            lines.append(
                f"{b.label():<16}{b.dimension:>5}{b.rank:>6}{b.min_eig:>15.6e}{b.max_eig:>15.6e}  {','.join(flags) or '-'}"
            )
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        lines = [f"kernel={self.spec}", f"d={self.degree}", f"n_partitions={len(self.blocks)}"]
        for b in self.blocks:
            key = "block." + "-".join(str(x) for x in b.partition)
            lines += [
                f"{key}.dim={b.dimension}",
                f"{key}.rank={b.rank}",
                f"{key}.min_eig={b.min_eig:.17g}",
                f"{key}.max_eig={b.max_eig:.17g}",
                f"{key}.zero={str(b.is_zero).lower()}",
                f"{key}.psd={str(b.is_psd).lower()}",
                f"{key}.strict_pd={str(b.is_strict_pd).lower()}",
            ]
        lines += [f"all_psd={str(self.all_psd).lower()}", f"all_strict_pd={str(self.all_strict_pd).lower()}"]
        return "\n".join(lines) + "\n"


def kernel_function(spec: KernelSpec, d: int) -> np.ndarray:
    """``sigma -> k(e, sigma)`` over canonical S_d; ``n_d(e, sigma)`` is the inversion count."""
    inv = np.array([count_inversions(s) for s in enumerate_sn(d)], dtype=float)
    return np.asarray(kernel_from_discordant(spec, inv, d), dtype=float)


def block_spectrum(lam: Partition, block: np.ndarray, d: int, thresholds: Thresholds = Thresholds()) -> BlockSpectrum:
    n = block.shape[0]
    sym = (block + block.T) / 2.0
    eig = np.linalg.eigvalsh(sym)
    sv = np.linalg.svd(block, compute_uv=False)
    is_zero = bool(np.max(np.abs(block)) < thresholds.zero_rel * math.factorial(d))
    if is_zero:
        # numerically the zero matrix: relative eigenvalue tests would only see roundoff
        return BlockSpectrum(tuple(lam), n, 0, float(eig[0]), float(eig[-1]), True, True, False)
    rank = int(np.sum(sv > thresholds.rank_rel * sv[0]))
    scale = max(abs(eig[0]), abs(eig[-1]))
    is_psd = bool(eig[0] >= -thresholds.psd_rel * scale)
    trace = float(np.trace(sym))
    is_strict = bool(trace > 0 and eig[0] > thresholds.strict_pd_rel * trace / n)
    return BlockSpectrum(tuple(lam), n, rank, float(eig[0]), float(eig[-1]), is_zero, is_psd, is_strict)


def spectrum_from_transform(
    spec_label: str, F: FourierTransform, thresholds: Thresholds = Thresholds()
) -> SpectrumReport:
    blocks = tuple(block_spectrum(lam, F[lam], F.degree, thresholds) for lam in F)
    return SpectrumReport(spec_label, F.degree, blocks, thresholds)


def spectrum_report(
    spec: KernelSpec, d: int, thresholds: Thresholds = Thresholds(), threads: int = 1
) -> SpectrumReport:
    F = fourier_transform(kernel_function(spec, d), d, threads=threads)
    return spectrum_from_transform(str(spec), F, thresholds)


def kendall_tau_closed_form(d: int) -> dict[Partition, np.ndarray]:
    """Closed-form Kendall transforms at the tabloid representations of the four shapes with ``d - lam_1 <= 2``.

    Tabloid indices follow :func:`tabloids`: for ``(d-1, 1)`` and ``(d-2, 2)``
    by the lower row, for ``(d-2, 1, 1)`` by the ordered pair ``(i, j)`` of
    row-2 and row-3 entries.
    """
    if d < 4:
        raise ValueError(f"closed form needs d >= 4, got {d}")
    C = math.comb(d, 2)
    a = math.factorial(d - 2) / C
    b = math.factorial(d - 3) / C

    u = np.array([d - 2 * t[1][0] + 1 for t in tabloids((d - 1, 1))], dtype=float)
    w = np.array([2 * d - 2 * sum(t[1]) + 2 for t in tabloids((d - 2, 2))], dtype=float)
    pairs = [(t[1][0], t[2][0]) for t in tabloids((d - 2, 1, 1))]
    v1 = np.array([1 - 2 * (i > j) for i, j in pairs], dtype=float)
    v2 = np.array([d - 2 * i + 2 - 2 * (i < j) for i, j in pairs], dtype=float)
    v3 = np.array([d - 2 * j + 2 - 2 * (i > j) for i, j in pairs], dtype=float)
    return {
        (d,): np.zeros((1, 1)),
        (d - 1, 1): a * np.outer(u, u),
        (d - 2, 2): b * np.outer(w, w),
        (d - 2, 1, 1): a * np.outer(v1, v1) + b * (np.outer(v2, v2) + np.outer(v3, v3)),
    }


def kendall_tau_transforms(d: int) -> dict[Partition, np.ndarray]:
    """Direct ``sum_sigma k_tau(e, sigma) tau_lam(sigma)`` for the same four shapes."""
    f = kernel_function(KernelSpec.kendall(), d)
    return {lam: tau_transform(f, lam, d) for lam in ((d,), (d - 1, 1), (d - 2, 2), (d - 2, 1, 1))}


def james_eigen_comparison(f: np.ndarray, lam: Partition, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted eigenvalues of the tau-block and of the Kostka-weighted irrep blocks.

    ``tau_lam`` is orthogonally equivalent to ``sum_mu K(mu, lam) rho_mu``, so for
    any ``f`` the two multisets agree. Eigenvalues of the (possibly
    non-symmetric) blocks are compared as sorted complex values.
    """
    lam = tuple(lam)
    T = tau_transform(f, lam, d)
    F = fourier_transform(f, d)
    parts = []
    for mu in partitions(d):
        mult = kostka_number(mu, lam)
        if mult:
            parts.extend([np.linalg.eigvals(F[mu])] * mult)
    irrep_eigs = np.concatenate(parts)
    tau_eigs = np.linalg.eigvals(T)
    key = lambda z: (round(z.real, 6), round(z.imag, 6))  # noqa: E731
    return np.array(sorted(tau_eigs, key=key)), np.array(sorted(irrep_eigs, key=key))


def james_dimension_check(lam: Partition) -> bool:
    """Number of tabloids equals ``sum_mu K(mu, lam) d_mu``."""
    d = sum(lam)
    return len(tabloids(tuple(lam))) == sum(kostka_number(mu, tuple(lam)) * irrep_dimension(mu) for mu in partitions(d))
