"""Explicit finite-dimensional feature maps for the Kendall, Mallows and polynomial kernels.

These exist to verify kernel identities on small ``d``; kernel evaluation never
goes through them.

Coordinates use the pair order ``(1,2), (1,3), ..., (1,d), (2,3), ...``. The
Mallows map is indexed by subsets of pairs encoded as bitmasks (bit ``i`` is
the ``i``-th pair). The degree-``p`` polynomial map is the ``p``-fold tensor
power of ``[1, phi_kendall]``, flattened with the first factor most significant.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distribution import as_probability_vector
from .kernels import sign_features
from .perm import Permutation, enumerate_sn, iter_pairs, sn_array

#: Largest explicit feature vector phi_poly will build.
FEATURE_BUDGET = 10**7
MALLOWS_MAX_DEGREE = 5

SENTINEL_PAIR = (-1, 0)


@dataclass(frozen=True)
class PairIndex:
    pairs: tuple[tuple[int, int], ...]
    with_sentinel: bool = False

    @classmethod
    def build(cls, d: int, with_sentinel: bool = False) -> "PairIndex":
        pairs = tuple(iter_pairs(d))
        if with_sentinel:
            pairs = (SENTINEL_PAIR,) + pairs
        return cls(pairs, with_sentinel)

    def __len__(self) -> int:
        return len(self.pairs)

    def position(self, a: int, b: int) -> int:
        return self.pairs.index((min(a, b), max(a, b)))


@dataclass(frozen=True)
class FeatureVector:
    coords: np.ndarray
    scheme: str
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.coords.size

    def dot(self, other: "FeatureVector") -> float:
        return float(self.coords @ other.coords)

    def header(self) -> str:
        extras = " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"# scheme={self.scheme} dim={self.coords.size}" + (f" {extras}" if extras else "")

    def to_csv(self, path_or_buf=None) -> str | None:
        text = self.header() + "\n" + "\n".join(f"{x:.17g}" for x in self.coords) + "\n"
        if path_or_buf is None:
            return text
        if isinstance(path_or_buf, io.TextIOBase):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", encoding="utf-8") as fh:
                fh.write(text)
        return None


def _signs(a: Permutation) -> np.ndarray:
    return sign_features(np.asarray([a.zero_based]))[0]


def phi_kendall(a: Permutation) -> FeatureVector:
    d = a.degree
    if d < 2:
        raise ValueError("Kendall features need d >= 2")
    coords = _signs(a) / math.sqrt(math.comb(d, 2))
    return FeatureVector(coords, "kendall", {"d": d})


def a_tau_matrix(d: int) -> np.ndarray:
    """0/1 matrix with rows indexed by pairs ``{a,b}`` and columns by S_d: ``1(sigma(a) < sigma(b))``."""
    if d < 2:
        raise ValueError("A_tau needs d >= 2")
    S = sign_features(sn_array(d))
    return ((S.T + 1.0) / 2.0).astype(np.int8)


def phi_mallows(a: Permutation, nu: float) -> FeatureVector:
    d = a.degree
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if d > MALLOWS_MAX_DEGREE:
        raise ValueError(
            f"Mallows features have 2^C(d,2) = 2^{math.comb(d, 2)} coordinates; refusing d={d} > {MALLOWS_MAX_DEGREE}"
        )
    npairs = math.comb(d, 2)
    q = math.exp(-nu)
    scale = ((1.0 + q) / 2.0) ** (npairs / 2.0)
    ratio = math.sqrt((1.0 - q) / (1.0 + q))
    neg_mask = 0
    for i, s in enumerate(_signs(a)):
        if s < 0:
            neg_mask |= 1 << i
    masks = np.arange(1 << npairs, dtype=np.int64)
    size = _popcount(masks)
    parity = _popcount(masks & neg_mask) & 1
    coords = scale * ratio**size * np.where(parity == 1, -1.0, 1.0)
    return FeatureVector(coords, "mallows", {"d": d, "nu": nu})


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x >>= 1
    return count


def phi_poly(a: Permutation, p: int, budget: int = FEATURE_BUDGET) -> FeatureVector:
    d = a.degree
    if p < 1:
        raise ValueError("degree p must be >= 1")
    base = 1 + math.comb(d, 2)
    if base**p > budget:
        raise ValueError(f"polynomial features need (1 + C(d,2))^p = {base**p} coordinates, over budget {budget}")
    phi1 = np.concatenate(([1.0], phi_kendall(a).coords))
    coords = phi1
    for _ in range(p - 1):
        coords = np.kron(coords, phi1)
    return FeatureVector(coords, "poly", {"d": d, "p": p})


_MAPS = {
    "kendall": lambda s, params: phi_kendall(s),
    "mallows": lambda s, params: phi_mallows(s, params["nu"]),
    "poly": lambda s, params: phi_poly(s, params["p"]),
}


def feature_matrix(perms: Sequence[Permutation], feature_map: str, **params) -> np.ndarray:
    """Rows are the feature vectors of ``perms``."""
    if feature_map not in _MAPS:
        raise ValueError(f"unknown feature map {feature_map!r}")
    return np.vstack([_MAPS[feature_map](s, params).coords for s in perms])


def mean_embedding(P, feature_map: str, **params) -> FeatureVector:
    """Expected feature vector under ``P`` (a distribution over canonical S_d)."""
    probs, d = as_probability_vector(P)
    Phi = feature_matrix(enumerate_sn(d), feature_map, **params)
    return FeatureVector(probs @ Phi, feature_map, {"d": d, **params})
