"""Maximum mean discrepancy between distributions on S_d and the two-sample permutation test.

The unbiased statistic for samples ``a`` (size n1) and ``b`` (size n2) is::

    T = sum_{i!=j} k(a_i, a_j) / (n1 (n1-1)) + sum_{i!=j} k(b_i, b_j) / (n2 (n2-1))
        - 2 sum_{i,j} k(a_i, b_j) / (n1 n2)

The permutation test pools both samples, redraws group labels ``n_perms``
times, and compares the observed statistic with the redrawn ones.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distribution import DistributionOnSd, as_probability_vector, sample_indices
from .kernels import KernelSpec, discordant_matrix, kernel_from_discordant, kernel_matrix
from .perm import Permutation, as_array, perm_indices, sn_array
from .symfourier import fourier_transform, irrep_dimension
from .symfourier.spectrum import kernel_function

__all__ = [
    "DistributionOnSd",
    "TestResult",
    "u_statistic",
    "mmd_squared_exact",
    "mmd_squared_fourier",
    "mmd_fourier_terms",
    "permutation_test",
    "power_simulation",
    "u_statistic_moments",
]

#: Above this degree the d! x d! kernel table is not built; kernels are evaluated per sample.
TABLE_MAX_DEGREE = 6


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    statistic: float
    threshold: float
    p_value: float
    n_permutations: int
    reject: bool
    seed: int
    level: float = 0.05

    def to_kv(self) -> str:
        return (
            f"statistic={self.statistic:.17g}\n"
            f"threshold={self.threshold:.17g}\n"
            f"p_value={self.p_value:.17g}\n"
            f"n_permutations={self.n_permutations}\n"
            f"level={self.level:g}\n"
            f"seed={self.seed}\n"
            f"reject={str(self.reject).lower()}\n"
        )


def _u_from_gram(K: np.ndarray, n1: int) -> float:
    n2 = K.shape[0] - n1
    Kaa, Kbb, Kab = K[:n1, :n1], K[n1:, n1:], K[:n1, n1:]
    saa = Kaa.sum() - np.trace(Kaa)
    sbb = Kbb.sum() - np.trace(Kbb)
    return float(saa / (n1 * (n1 - 1)) + sbb / (n2 * (n2 - 1)) - 2.0 * Kab.sum() / (n1 * n2))


def _u_batch(K0: np.ndarray, row_sums: np.ndarray, total: float, Z: np.ndarray, n1: int) -> np.ndarray:
    """Statistics for many labelings at once.

    ``K0`` is the pooled Gram with zeroed diagonal and each column of ``Z``
    indicates group ``a``. Cross and ``b``-group sums follow from the
    ``a``-group sum and row sums.
    """
    n2 = K0.shape[0] - n1
    saa = np.einsum("ib,ib->b", Z, K0 @ Z)
    zr = row_sums @ Z
    sab = zr - saa
    sbb = total - 2.0 * zr + saa
    return saa / (n1 * (n1 - 1)) + sbb / (n2 * (n2 - 1)) - 2.0 * sab / (n1 * n2)


def _check_sizes(n1: int, n2: int) -> None:
    if n1 < 2 or n2 < 2:
        raise ValueError(f"each sample needs at least 2 permutations, got {n1} and {n2}")


def u_statistic(samples_a: Sequence[Permutation], samples_b: Sequence[Permutation], spec: KernelSpec) -> float:
    _check_sizes(len(samples_a), len(samples_b))
    X = as_array(list(samples_a) + list(samples_b))
    return _u_from_gram(kernel_matrix(spec, X), len(samples_a))


def _full_gram(spec: KernelSpec, d: int) -> np.ndarray:
    return kernel_matrix(spec, sn_array(d))


def mmd_squared_exact(P, Q, spec: KernelSpec) -> float:
    """``(P - Q)^T K (P - Q)`` with ``K`` the Gram matrix over all of S_d.

    ``K`` is rebuilt from the integer discordance counts and the form is
    accumulated in extended precision, so that values that vanish in exact
    arithmetic come out at the 1e-20 level rather than at double roundoff.
    """
    p, d = as_probability_vector(P)
    q, dq = as_probability_vector(Q)
    if d != dq:
        raise ValueError(f"degree mismatch: {d} vs {dq}")
    diff = p.astype(np.longdouble) - q.astype(np.longdouble)
    nd = discordant_matrix(sn_array(d)).astype(np.longdouble)
    K = kernel_from_discordant(spec, nd, d)
    return float(diff @ (K @ diff))


def mmd_fourier_terms(P, Q, spec: KernelSpec) -> dict[tuple[int, ...], float]:
    """Per-partition terms ``d_lam tr(D^T k_hat D) / d!`` with ``D`` the transform of ``P - Q``."""
    p, d = as_probability_vector(P)
    q, dq = as_probability_vector(Q)
    if d != dq:
        raise ValueError(f"degree mismatch: {d} vs {dq}")
    D = fourier_transform(p - q, d)
    Khat = fourier_transform(kernel_function(spec, d), d)
    n = math.factorial(d)
    return {lam: irrep_dimension(lam) * float(np.trace(D[lam].T @ Khat[lam] @ D[lam])) / n for lam in D}


def mmd_squared_fourier(P, Q, spec: KernelSpec) -> float:
    return sum(mmd_fourier_terms(P, Q, spec).values())


def _ceil_index(level: float, n_perms: int) -> int:
    # small slack so that e.g. 0.95 * 200 is not rounded up to 191
    k = math.ceil((1.0 - level) * n_perms - 1e-9)
    return min(max(k, 1), n_perms) - 1


def _test_from_gram(K: np.ndarray, n1: int, n_perms: int, level: float, rng: np.random.Generator):
    N = K.shape[0]
    K0 = K.copy()
    np.fill_diagonal(K0, 0.0)
    row_sums = K0.sum(axis=1)
    total = float(row_sums.sum())
    Z = np.zeros((N, n_perms))
    for b in range(n_perms):
        Z[rng.permutation(N)[:n1], b] = 1.0
    permuted = _u_batch(K0, row_sums, total, Z, n1)
    observed = _u_from_gram(K, n1)
    threshold = float(np.sort(permuted)[_ceil_index(level, n_perms)])
    p_value = (1.0 + np.count_nonzero(permuted >= observed)) / (1.0 + n_perms)
    return observed, threshold, float(p_value)


def _validate_test(n1: int, n2: int, n_perms: int, level: float) -> None:
    _check_sizes(n1, n2)
    if n_perms < 1:
        raise ValueError(f"n_perms must be >= 1, got {n_perms}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")


def permutation_test(
    samples_a: Sequence[Permutation],
    samples_b: Sequence[Permutation],
    spec: KernelSpec,
    n_perms: int = 200,
    level: float = 0.05,
    seed: int = 0,
) -> TestResult:
    """Monte Carlo permutation test of ``P == Q``.

    Each sample is put in canonical order before pooling, so the result does
    not depend on the input order. Threshold is the ``ceil((1 - level) B)``-th
    smallest permuted statistic, ``reject`` iff the observed statistic exceeds
    it, and ``p = (1 + #{permuted >= observed}) / (1 + B)``.
    """
    _validate_test(len(samples_a), len(samples_b), n_perms, level)
    Xa, Xb = as_array(list(samples_a)), as_array(list(samples_b))
    if Xa.shape[1] != Xb.shape[1]:
        raise ValueError(f"degree mismatch: {Xa.shape[1]} vs {Xb.shape[1]}")
    Xa = Xa[np.argsort(perm_indices(Xa), kind="stable")]
    Xb = Xb[np.argsort(perm_indices(Xb), kind="stable")]
    K = kernel_matrix(spec, np.vstack([Xa, Xb]))
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    stat, thr, pv = _test_from_gram(K, len(Xa), n_perms, level, rng)
    return TestResult(stat, thr, pv, n_perms, stat > thr, seed, level)


def _trial(P, Q, n, table, spec, d, n_perms, level, seed, trial) -> bool:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))
    ia = np.sort(sample_indices(P, n, rng))
    ib = np.sort(sample_indices(Q, n, rng))
    idx = np.concatenate([ia, ib])
    if table is not None:
        K = table[np.ix_(idx, idx)]
    else:
        X = sn_array(d)
        K = kernel_matrix(spec, X[idx])
    stat, thr, _ = _test_from_gram(K, n, n_perms, level, rng)
    return stat > thr


def power_simulation(
    P: DistributionOnSd,
    Q: DistributionOnSd,
    n: int,
    trials: int,
    spec: KernelSpec,
    n_perms: int = 200,
    level: float = 0.05,
    seed: int = 0,
    threads: int = 1,
) -> float:
    """Rejection frequency over ``trials`` independent data sets of size ``n`` from each of P and Q.

    Trial ``t`` draws everything from ``SeedSequence(seed, spawn_key=(t,))``,
    so the result is the same for any ``threads``.
    """
    if P.degree != Q.degree:
        raise ValueError(f"degree mismatch: {P.degree} vs {Q.degree}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    _validate_test(n, n, n_perms, level)
    d = P.degree
    table = _full_gram(spec, d) if d <= TABLE_MAX_DEGREE else None
    run = lambda t: _trial(P, Q, n, table, spec, d, n_perms, level, seed, t)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rejections = list(ex.map(run, range(trials)))
    else:
        rejections = [run(t) for t in range(trials)]
    return float(np.mean(rejections))


def u_statistic_moments(P, Q, features: np.ndarray, n: int, centered: bool = True) -> tuple[float, float]:
    """Mean and variance of ``T`` for two samples of size ``n``, from explicit features.

    ``features`` has one row per permutation of S_d in canonical order. With
    ``centered`` the second-moment matrices are covariances; otherwise they are
    the raw ``E[phi phi^T]``. This is a diagnostic only.
    """
    p, _ = as_probability_vector(P)
    q, _ = as_probability_vector(Q)
    mu_p, mu_q = p @ features, q @ features
    S_p = (features * p[:, None]).T @ features
    S_q = (features * q[:, None]).T @ features
    if centered:
        S_p = S_p - np.outer(mu_p, mu_p)
        S_q = S_q - np.outer(mu_q, mu_q)
    delta = mu_p - mu_q
    mean = float(delta @ delta)
    var = (
        2.0 / (n * (n - 1)) * np.trace(S_p @ S_p)
        + 2.0 / (n * (n - 1)) * np.trace(S_q @ S_q)
        + 4.0 / n**2 * np.trace(S_p @ S_q)
        + 4.0 / n * delta @ S_p @ delta
        + 4.0 / n * delta @ S_q @ delta
    )
    return mean, float(var)
