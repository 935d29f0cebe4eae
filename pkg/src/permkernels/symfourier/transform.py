"""Fourier transform on S_d over Young's orthogonal irreps.

``f_hat[lam] = sum_sigma f(sigma) rho_lam(sigma)``, with inverse
``f(sigma) = (1/d!) sum_lam d_lam tr(rho_lam(sigma)^T f_hat[lam])``.
Functions on S_d are length-``d!`` vectors in canonical (lexicographic) order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..perm import MAX_DEGREE, perm_indices, sn_array
from .combinatorics import Partition, irrep_dimension, partitions
from .representations import iter_yor, tensor_fits, yor_tensor


@dataclass(frozen=True)
class FourierTransform:
    degree: int
    blocks: dict[Partition, np.ndarray]

    def __post_init__(self):
        expected = partitions(self.degree)
        if set(self.blocks) != set(expected):
            raise ValueError(f"blocks must be indexed by exactly the partitions of {self.degree}")
        for lam in expected:
            n = irrep_dimension(lam)
            if np.shape(self.blocks[lam]) != (n, n):
                raise ValueError(f"block {lam} has shape {np.shape(self.blocks[lam])}, expected {(n, n)}")

    def __getitem__(self, lam) -> np.ndarray:
        return self.blocks[tuple(lam)]

    def __iter__(self):
        return iter(partitions(self.degree))

    def __sub__(self, other: "FourierTransform") -> "FourierTransform":
        return FourierTransform(self.degree, {lam: self.blocks[lam] - other.blocks[lam] for lam in self})

    def __matmul__(self, other: "FourierTransform") -> "FourierTransform":
        return FourierTransform(self.degree, {lam: self.blocks[lam] @ other.blocks[lam] for lam in self})

    def max_abs_diff(self, other: "FourierTransform") -> float:
        return max(float(np.max(np.abs(self.blocks[lam] - other.blocks[lam]))) for lam in self)


def _check_function(f, d: int) -> np.ndarray:
    if not 1 <= d <= MAX_DEGREE:
        raise ValueError(f"degree {d} outside 1..{MAX_DEGREE}")
    f = np.asarray(f, dtype=float).reshape(-1)
    if f.size != math.factorial(d):
        raise ValueError(f"function has {f.size} values, expected d! = {math.factorial(d)}")
    return f


def fourier_block(f, lam: Partition, d: int) -> np.ndarray:
    f = _check_function(f, d)
    lam = tuple(lam)
    if tensor_fits(lam, d):
        return np.einsum("s,sij->ij", f, yor_tensor(lam, d))
    n = irrep_dimension(lam)
    out = np.zeros((n, n))
    for idx, M in iter_yor(lam, d):
        if f[idx] != 0.0:
            out += f[idx] * M
    return out


def fourier_transform(f, d: int, threads: int = 1) -> FourierTransform:
    f = _check_function(f, d)
    shapes = partitions(d)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            blocks = list(ex.map(lambda lam: fourier_block(f, lam, d), shapes))
    else:
        blocks = [fourier_block(f, lam, d) for lam in shapes]
    return FourierTransform(d, dict(zip(shapes, blocks)))


def inverse_fourier(F: FourierTransform) -> np.ndarray:
    d = F.degree
    out = np.zeros(math.factorial(d))
    for lam in F:
        block = np.asarray(F[lam], dtype=float)
        if tensor_fits(lam, d):
            out += irrep_dimension(lam) * np.einsum("sij,ij->s", yor_tensor(lam, d), block)
        else:
            for idx, M in iter_yor(lam, d):
                out[idx] += irrep_dimension(lam) * float(np.sum(M * block))
    return out / math.factorial(d)


def fourier_inner(F: FourierTransform, G: FourierTransform) -> float:
    """``(1/d!) sum_lam d_lam tr(F G)``; equals ``sum_sigma f(sigma^-1) g(sigma)``."""
    d = F.degree
    return sum(irrep_dimension(lam) * float(np.trace(F[lam] @ G[lam])) for lam in F) / math.factorial(d)


def reflect(f, d: int) -> np.ndarray:
    """``sigma -> f(sigma^{-1})``."""
    f = _check_function(f, d)
    inv = perm_indices(np.argsort(sn_array(d), axis=1))
    return f[inv]


def convolve(f, g, d: int) -> np.ndarray:
    """``(f * g)(pi) = sum_sigma f(pi sigma^{-1}) g(sigma)``."""
    f = _check_function(f, d)
    g = _check_function(g, d)
    X = sn_array(d)
    out = np.zeros_like(f)
    for s_idx, sigma in enumerate(X):
        if g[s_idx] == 0.0:
            continue
        sigma_inv = np.argsort(sigma)
        # (pi o sigma^-1)(i) = pi(sigma^-1(i))
        out += g[s_idx] * f[perm_indices(X[:, sigma_inv])]
    return out
