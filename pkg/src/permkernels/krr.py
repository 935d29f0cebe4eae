"""Kernel ridge regression on permutations.

``w = (K + lambda I)^{-1} y`` is obtained from a Cholesky factorization, and
``f(sigma) = sum_i w_i k(sigma_i, sigma)``. Binary classification uses the sign
of ``f``, with 0 mapped to +1.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .kernels import KernelSpec, kernel_matrix
from .perm import Permutation, as_array

RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class RidgeModel:
    spec: KernelSpec
    train_perms: tuple[Permutation, ...]
    weights: np.ndarray
    lam: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size != len(self.train_perms):
            raise ValueError(f"{w.size} weights for {len(self.train_perms)} training permutations")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def degree(self) -> int:
        return self.train_perms[0].degree

    def to_text(self) -> str:
        lines = [
            "# permkernels ridge model",
            f"kernel={self.spec}",
            f"lambda={float(self.lam)!r}",
            f"d={self.degree}",
            f"n={len(self.train_perms)}",
            "ranks,weight",
        ]
        lines += [" ".join(map(str, p.ranks)) + f",{float(w)!r}" for p, w in zip(self.train_perms, self.weights)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RidgeModel":
        meta: dict[str, str] = {}
        rows = iter(line for line in text.splitlines() if line.strip() and not line.startswith("#"))
        for line in rows:
            if line == "ranks,weight":
                break
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
        else:
            raise ValueError("model text has no 'ranks,weight' section")
        for key in ("kernel", "lambda", "n"):
            if key not in meta:
                raise ValueError(f"model text missing {key!r}")
        perms, weights = [], []
        for line in rows:
            ranks, _, w = line.partition(",")
            perms.append(Permutation(int(x) for x in ranks.split()))
            weights.append(float(w))
        if len(perms) != int(meta["n"]):
            raise ValueError(f"model declares n={meta['n']} but lists {len(perms)} rows")
        return cls(KernelSpec.parse(meta["kernel"]), tuple(perms), np.array(weights), float(meta["lambda"]))


def _solve(K: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    A = K + lam * np.eye(K.shape[0])
    w = scipy.linalg.cho_solve(scipy.linalg.cho_factor(A, lower=True), y)
    resid = np.linalg.norm(A @ w - y)
    if resid > RESIDUAL_RTOL * max(np.linalg.norm(y), 1e-300):
        raise FloatingPointError(f"ridge solve residual {resid:.3g} exceeds tolerance")
    return w


def _check_targets(perms: Sequence[Permutation], y) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(perms) == 0:
        raise ValueError("need at least one training permutation")
    if y.size != len(perms):
        raise ValueError(f"{len(perms)} permutations but {y.size} targets")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    return y


def fit(perms: Sequence[Permutation], y, spec: KernelSpec, lam: float) -> RidgeModel:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    y = _check_targets(perms, y)
    X = as_array(list(perms))
    w = _solve(kernel_matrix(spec, X), y, lam)
    return RidgeModel(spec, tuple(perms), w, float(lam))


def predict(model: RidgeModel, perms: Sequence[Permutation]) -> np.ndarray:
    X = as_array(list(perms))
    if X.shape[1] != model.degree:
        raise ValueError(f"model trained on degree {model.degree}, got degree {X.shape[1]}")
    return kernel_matrix(model.spec, X, as_array(list(model.train_perms))) @ model.weights


def classify(model: RidgeModel, perms: Sequence[Permutation]) -> np.ndarray:
    return np.where(predict(model, perms) >= 0, 1, -1)


@dataclass(frozen=True)
class CVCell:
    spec: KernelSpec
    lam: float
    score: float


@dataclass(frozen=True)
class CVResult:
    best_spec: KernelSpec
    best_lambda: float
    metric: str
    cells: tuple[CVCell, ...]

    @property
    def best_score(self) -> float:
        return min(c.score for c in self.cells)


def fold_assignment(n: int, folds: int, seed: int) -> np.ndarray:
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    if folds > n:
        raise ValueError(f"{folds} folds for only {n} samples")
    order = np.random.default_rng(seed).permutation(n)
    out = np.empty(n, dtype=np.int64)
    out[order] = np.arange(n) % folds
    return out


def _score(err: np.ndarray, metric: str) -> float:
    return float(np.mean(err**2) if metric == "mse" else np.mean(np.abs(err)))


def cross_validate(
    perms: Sequence[Permutation],
    y,
    spec_grid: Sequence[KernelSpec],
    lambda_grid: Sequence[float],
    folds: int = 5,
    seed: int = 0,
    metric: str = "mse",
    threads: int = 1,
) -> CVResult:
    """Grid search over ``spec_grid x lambda_grid`` with seeded K-fold splits.

    The best cell minimizes the held-out score; ties go to the smaller lambda,
    then to the earlier cell in grid order.
    """
    if metric not in ("mse", "mae"):
        raise ValueError(f"metric must be 'mse' or 'mae', got {metric!r}")
    if not spec_grid or not lambda_grid:
        raise ValueError("spec and lambda grids must be nonempty")
    if any(not lam > 0 for lam in lambda_grid):
        raise ValueError("all lambdas must be positive")
    y = _check_targets(perms, y)
    X = as_array(list(perms))
    fold_of = fold_assignment(len(y), folds, seed)
    grams = {spec: kernel_matrix(spec, X) for spec in dict.fromkeys(spec_grid)}

    def run(cell):
        spec, lam = cell
        K = grams[spec]
        err = np.empty_like(y)
        for f in range(folds):
            test, train = fold_of == f, fold_of != f
            w = _solve(K[np.ix_(train, train)], y[train], lam)
            err[test] = K[np.ix_(test, train)] @ w - y[test]
        return CVCell(spec, float(lam), _score(err, metric))

    grid = [(spec, lam) for spec in spec_grid for lam in lambda_grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            cells = tuple(ex.map(run, grid))
    else:
        cells = tuple(run(c) for c in grid)
    best = min(range(len(cells)), key=lambda i: (cells[i].score, cells[i].lam, i))
    return CVResult(cells[best].spec, cells[best].lam, metric, cells)


def export_model(model: RidgeModel, path_or_buf) -> None:
    if isinstance(path_or_buf, io.TextIOBase):
        path_or_buf.write(model.to_text())
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(model.to_text())


def import_model(path_or_buf) -> RidgeModel:
    if isinstance(path_or_buf, io.TextIOBase):
        return RidgeModel.from_text(path_or_buf.read())
    with open(path_or_buf, encoding="utf-8") as fh:
        return RidgeModel.from_text(fh.read())
