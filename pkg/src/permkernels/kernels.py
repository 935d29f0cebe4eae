"""Right-invariant kernels on S_d.

Every kernel here is a function of the number of discordant pairs ``n_d``
alone, so evaluation reduces to one inversion count:

* Kendall:   ``(n_c - n_d) / C(d,2)``
* Mallows:   ``exp(-nu * n_d)``
* Poly:      ``(1 + k_tau)^p``
* NorPoly:   ``(1 + k_tau / p)^p``
* NuPoly:    ``exp(-nu C(d,2) / 2) * (1 + nu C(d,2) k_tau / (2p))^p``
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .perm import Permutation, as_array, discordant_pairs, iter_pairs

KINDS = ("kendall", "mallows", "poly", "norpoly", "nupoly")

#: Poly(p) has self-similarity 2^p; beyond this degree use NorPoly/NuPoly.
POLY_MAX_DEGREE = 64


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    nu: float | None = None
    p: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        needs_nu = self.kind in ("mallows", "nupoly")
        needs_p = self.kind in ("poly", "norpoly", "nupoly")
        if needs_nu:
            if self.nu is None or not self.nu > 0 or not math.isfinite(self.nu):
                raise ValueError(f"{self.kind} kernel needs a positive bandwidth nu, got {self.nu}")
        elif self.nu is not None:
            raise ValueError(f"{self.kind} kernel takes no bandwidth")
        if needs_p:
            if self.p is None or int(self.p) != self.p or self.p < 1:
                raise ValueError(f"{self.kind} kernel needs a positive integer degree p, got {self.p}")
            if self.kind == "poly" and self.p > POLY_MAX_DEGREE:
                raise ValueError(
                    f"poly degree {self.p} > {POLY_MAX_DEGREE}: self-similarity 2^p overflows; "
                    "use norpoly or nupoly instead"
                )
        elif self.p is not None:
            raise ValueError(f"{self.kind} kernel takes no degree")

    @classmethod
    def kendall(cls) -> "KernelSpec":
        return cls("kendall")

    @classmethod
    def mallows(cls, nu: float) -> "KernelSpec":
        return cls("mallows", nu=float(nu))

    @classmethod
    def poly(cls, p: int) -> "KernelSpec":
        return cls("poly", p=int(p))

    @classmethod
    def norpoly(cls, p: int) -> "KernelSpec":
        return cls("norpoly", p=int(p))

    @classmethod
    def nupoly(cls, p: int, nu: float) -> "KernelSpec":
        return cls("nupoly", nu=float(nu), p=int(p))

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        """Parse ``kendall``, ``mallows:nu=1``, ``poly:p=3``, ``nupoly:p=4,nu=0.5``."""
        m = re.fullmatch(r"\s*(\w+)\s*(?::(.*))?", text)
        if not m:
            raise ValueError(f"cannot parse kernel spec {text!r}")
        kind = m.group(1).lower()
        params: dict[str, str] = {}
        if m.group(2):
            for item in m.group(2).split(","):
                if "=" not in item:
                    raise ValueError(f"bad kernel parameter {item!r} in {text!r}")
                k, v = item.split("=", 1)
                params[k.strip().lower()] = v.strip()
        unknown = set(params) - {"nu", "p"}
        if unknown:
            raise ValueError(f"unknown kernel parameters {sorted(unknown)} in {text!r}")
        nu = float(params["nu"]) if "nu" in params else None
        p = int(params["p"]) if "p" in params else None
        return cls(kind, nu=nu, p=p)

    def __str__(self) -> str:
        parts = []
        if self.p is not None:
            parts.append(f"p={self.p}")
        if self.nu is not None:
            parts.append(f"nu={self.nu:g}")
        return self.kind + (":" + ",".join(parts) if parts else "")


def _ipow(base, p: int):
    """Exact binary exponentiation, elementwise for arrays."""
    result = np.ones_like(base) if isinstance(base, np.ndarray) else 1.0
    sq = base
    while p:
        if p & 1:
            result = result * sq
        p >>= 1
        if p:
            sq = sq * sq
    return result


def kernel_from_discordant(spec: KernelSpec, n_disc, d: int):
    """Kernel value(s) for discordant-pair count(s) ``n_disc`` at degree ``d``."""
    if d < 2:
        raise ValueError(f"kernels need d >= 2 (C(d,2) = 0 for d = {d})")
    pairs = math.comb(d, 2)
    if np.isscalar(n_disc):
        n_disc = float(n_disc)
    else:
        # float64 unless the caller passes a wider float type
        n_disc = np.asarray(n_disc, dtype=np.result_type(n_disc, np.float64))
    if spec.kind == "mallows":
        return np.exp(-spec.nu * n_disc)
    ktau = 1.0 - 2.0 * n_disc / pairs
    if spec.kind == "kendall":
        return ktau
    if spec.kind == "poly":
        return _ipow(1.0 + ktau, spec.p)
    if spec.kind == "norpoly":
        return _ipow(1.0 + ktau / spec.p, spec.p)
    # nupoly
    return math.exp(-spec.nu * pairs / 2.0) * _ipow(1.0 + spec.nu * pairs * ktau / (2.0 * spec.p), spec.p)


def eval_kernel(spec: KernelSpec, a: Permutation, b: Permutation) -> float:
    return float(kernel_from_discordant(spec, discordant_pairs(a, b), a.degree))


def kernel_self_norm(spec: KernelSpec, d: int) -> float:
    """``k(sigma, sigma)``, the same for every sigma."""
    return float(kernel_from_discordant(spec, 0, d))


def sign_features(X: np.ndarray) -> np.ndarray:
    """``(n, C(d,2))`` matrix of ``2 * 1(sigma(a) < sigma(b)) - 1`` over pairs ``a < b``."""
    d = X.shape[1]
    ia, ib = (np.array(v, dtype=np.int64) - 1 for v in zip(*iter_pairs(d)))
    return np.where(X[:, ia] < X[:, ib], 1.0, -1.0)


def discordant_matrix(X: np.ndarray, Y: np.ndarray | None = None) -> np.ndarray:
    """Pairwise ``n_d`` between rows of ``X`` and ``Y`` (0-based rank arrays)."""
    d = X.shape[1]
    pairs = math.comb(d, 2)
    SX = sign_features(X)
    SY = SX if Y is None else sign_features(Y)
    # concordant - discordant = <psi, psi'>, concordant + discordant = C(d,2)
    return np.rint((pairs - SX @ SY.T) / 2.0)


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    index_map: tuple[Permutation, ...]

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def rank(self, rel_tol: float = 1e-9) -> int:
        s = np.linalg.svd(self.entries, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.sum(s > rel_tol * s[0]))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_psd(self, rel_tol: float = 1e-9) -> bool:
        w = np.linalg.eigvalsh(self.entries)
        return bool(w[0] >= -rel_tol * max(abs(w[-1]), 0.0))

    def to_csv(self, path_or_buf, fmt: str = "%.17g") -> None:
        np.savetxt(path_or_buf, self.entries, delimiter=",", fmt=fmt)


def kernel_matrix(spec: KernelSpec, X: np.ndarray, Y: np.ndarray | None = None) -> np.ndarray:
    """Cross-kernel matrix between 0-based rank arrays."""
    return kernel_from_discordant(spec, discordant_matrix(X, Y), X.shape[1])


def gram(spec: KernelSpec, perms: Sequence[Permutation], threads: int = 1) -> GramMatrix:
    """Gram matrix over ``perms``; identical output for any ``threads``."""
    perms = tuple(perms)
    X = as_array(list(perms))
    n = X.shape[0]
    if threads <= 1 or n < 64:
        K = kernel_matrix(spec, X)
    else:
        blocks = np.array_split(np.arange(n), threads)
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(lambda idx: kernel_matrix(spec, X[idx], X), blocks))
        K = np.vstack(rows)
    # mirror the upper triangle so symmetry is exact
    iu = np.triu_indices(n, 1)
    K[(iu[1], iu[0])] = K[iu]
    return GramMatrix(K, perms)
