"""Probability distributions on S_d as vectors indexed by the canonical enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .perm import MAX_DEGREE, Permutation, perm_index

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class DistributionOnSd:
    probs: np.ndarray
    degree: int

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if self.degree > MAX_DEGREE:
            raise ValueError(f"degree {self.degree} exceeds cap {MAX_DEGREE}")
        if probs.size != math.factorial(self.degree):
            raise ValueError(f"expected {math.factorial(self.degree)} probabilities for d={self.degree}, got {probs.size}")
        if not np.all(np.isfinite(probs)) or probs.min() < 0:
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(probs.sum() - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {probs.sum():.15g}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, d: int) -> "DistributionOnSd":
        n = math.factorial(d)
        return cls(np.full(n, 1.0 / n), d)

    @classmethod
    def point_mass(cls, sigma: Permutation) -> "DistributionOnSd":
        probs = np.zeros(math.factorial(sigma.degree))
        probs[perm_index(sigma)] = 1.0
        return cls(probs, sigma.degree)

    @classmethod
    def from_weights(cls, weights, d: int) -> "DistributionOnSd":
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum(), d)

    @classmethod
    def random(cls, d: int, rng: np.random.Generator, concentration: float = 1.0) -> "DistributionOnSd":
        """Dirichlet draw over the simplex."""
        w = rng.dirichlet(np.full(math.factorial(d), concentration))
        return cls(w / w.sum(), d)


def as_probability_vector(P, d: int | None = None) -> tuple[np.ndarray, int]:
    """Accept a :class:`DistributionOnSd` or a raw vector; return ``(probs, d)``."""
    if isinstance(P, DistributionOnSd):
        return P.probs, P.degree
    v = np.asarray(P, dtype=float).reshape(-1)
    if d is None:
        d = next((k for k in range(1, MAX_DEGREE + 1) if math.factorial(k) == v.size), None)
        if d is None:
            raise ValueError(f"length {v.size} is not d! for any d <= {MAX_DEGREE}")
    dist = DistributionOnSd(v, d)
    return dist.probs, dist.degree


def sample_indices(P: DistributionOnSd, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. canonical indices by inverse CDF; zero-mass indices are never drawn."""
    if n < 0:
        raise ValueError(f"sample size must be nonnegative, got {n}")
    cdf = np.cumsum(P.probs)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(n), side="right")
