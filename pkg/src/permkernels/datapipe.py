"""Ranking and rating files, ratings-to-ranking conversion, sampling, and shifted distributions.

Rankings CSV: header row required, ranking columns ``r1..rd`` (``r_i`` is the
rank of item ``i``, 1 = best); any other columns are kept as labels.
Ratings CSV: columns ``c1..cd`` of floats plus optional labels.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg

from .distribution import DistributionOnSd, sample_indices
from .features import a_tau_matrix
from .perm import Permutation, from_index

NULL_SPACE_RCOND = 1e-9


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class RejectedRow:
    row: int  # 1-based data row number (header is row 0)
    reason: str


@dataclass(frozen=True)
class RankingDataset:
    degree: int
    perms: tuple[Permutation, ...]
    labels: tuple[dict[str, str], ...]
    label_columns: tuple[str, ...] = ()
    rejected: tuple[RejectedRow, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.perms)

    def column(self, name: str) -> list[str]:
        if name not in self.label_columns:
            raise DataError(f"no label column {name!r}; available: {list(self.label_columns)}")
        return [lab[name] for lab in self.labels]

    def numeric_column(self, name: str) -> np.ndarray:
        values = self.column(name)
        out = np.empty(len(values))
        for i, v in enumerate(values):
            try:
                out[i] = float(v)
            except ValueError:
                raise DataError(f"row {i + 1}: column {name!r} value {v!r} is not numeric") from None
        if not np.all(np.isfinite(out)):
            raise DataError(f"column {name!r} has non-finite values")
        return out


def _open_text(path_or_buf):
    if isinstance(path_or_buf, io.TextIOBase):
        return path_or_buf, False
    return open(path_or_buf, newline="", encoding="utf-8"), True


def _rank_columns(header: Sequence[str], prefix: str, d: int | None) -> list[str]:
    present = [h for h in header if h.startswith(prefix) and h[len(prefix):].isdigit()]
    if d is None:
        d = len(present)
    wanted = [f"{prefix}{i}" for i in range(1, d + 1)]
    missing = [c for c in wanted if c not in header]
    if d < 1 or missing:
        raise DataError(f"missing columns {missing or wanted} in header {list(header)}")
    return wanted


def load_rankings_csv(path_or_buf, d: int | None = None, strict: bool = False) -> RankingDataset:
    """Read rankings; rows that are not a bijection of ``1..d`` are collected in ``rejected``.

    With ``strict`` the first bad row raises :class:`DataError` instead.
    """
    fh, close = _open_text(path_or_buf)
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("empty file: header row required")
        header = [h.strip() for h in reader.fieldnames]
        reader.fieldnames = header
        cols = _rank_columns(header, "r", d)
        d = len(cols)
        label_cols = tuple(h for h in header if h not in cols)
        perms, labels, rejected = [], [], []
        for rownum, rec in enumerate(reader, start=1):
            reason = None
            present = [c for c in cols if (rec.get(c) or "").strip()]
            if None in rec:
                reason = "more fields than header columns"
            elif len(present) != d:
                reason = f"has {len(present)} ranks, expected {d} (degree mismatch)"
            else:
                try:
                    ranks = [int(rec[c].strip()) for c in cols]
                except ValueError:
                    reason = "non-integer rank"
                else:
                    if sorted(ranks) != list(range(1, d + 1)):
                        reason = f"ranks {ranks} are not a permutation of 1..{d}"
            if reason is not None:
                if strict:
                    raise DataError(f"row {rownum}: {reason}")
                rejected.append(RejectedRow(rownum, reason))
                continue
            perms.append(Permutation(ranks))
            labels.append({c: rec[c] for c in label_cols})
    finally:
        if close:
            fh.close()
    return RankingDataset(d, tuple(perms), tuple(labels), label_cols, tuple(rejected))


def write_rankings_csv(path_or_buf, dataset: RankingDataset) -> None:
    fh, close = (path_or_buf, False) if isinstance(path_or_buf, io.TextIOBase) else (
        open(path_or_buf, "w", newline="", encoding="utf-8"),
        True,
    )
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"r{i}" for i in range(1, dataset.degree + 1)] + list(dataset.label_columns))
        for p, lab in zip(dataset.perms, dataset.labels):
            w.writerow(list(p.ranks) + [lab.get(c, "") for c in dataset.label_columns])
    finally:
        if close:
            fh.close()


def load_ratings_csv(path_or_buf) -> tuple[np.ndarray, list[dict[str, str]], tuple[str, ...]]:
    """Return ``(ratings matrix, labels, label columns)``; NaN cells are kept for the caller to reject."""
    fh, close = _open_text(path_or_buf)
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("empty file: header row required")
        header = [h.strip() for h in reader.fieldnames]
        reader.fieldnames = header
        cols = _rank_columns(header, "c", None)
        label_cols = tuple(h for h in header if h not in cols)
        rows, labels = [], []
        for rownum, rec in enumerate(reader, start=1):
            try:
                rows.append([float(rec[c]) for c in cols])
            except (TypeError, ValueError):
                raise DataError(f"row {rownum}: non-numeric rating") from None
            labels.append({c: rec[c] for c in label_cols})
    finally:
        if close:
            fh.close()
    return np.array(rows, dtype=float).reshape(-1, len(cols)), labels, label_cols


def ratings_to_ranking(ratings: Sequence[float], rng: np.random.Generator | int | None = 0) -> Permutation:
    """Highest rating gets rank 1; tied items are ordered by a uniform random shuffle."""
    r = np.asarray(ratings, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("ratings must be a nonempty vector")
    if np.any(np.isnan(r)):
        raise ValueError(f"NaN rating at item(s) {[int(i) + 1 for i in np.flatnonzero(np.isnan(r))]}")
    rng = np.random.default_rng(rng)
    tiebreak = rng.permutation(r.size)
    # primary key: rating descending; secondary: the random tiebreak
    order = np.lexsort((tiebreak, -r))
    ranks = np.empty(r.size, dtype=np.int64)
    ranks[order] = np.arange(r.size)
    return Permutation._from_zero_based(ranks)


def sample(P: DistributionOnSd, n: int, seed: int | np.random.Generator = 0) -> list[Permutation]:
    """``n`` i.i.d. draws via inverse CDF over the canonical enumeration."""
    rng = np.random.default_rng(seed)
    return [from_index(int(i), P.degree) for i in sample_indices(P, n, rng)]


@lru_cache(maxsize=None)
def _subspace_bases(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of ``V = null(A_tau) ∩ 1^⊥`` and of its complement ``U`` within ``1^⊥``."""
    A = a_tau_matrix(d).astype(float)
    n = A.shape[1]
    ones = np.ones((1, n))
    V = scipy.linalg.null_space(np.vstack([A, ones]), rcond=NULL_SPACE_RCOND)
    # project rows of A onto the sum-zero hyperplane, then orthonormalize
    A0 = A - A.mean(axis=1, keepdims=True)
    U = scipy.linalg.orth(A0.T, rcond=NULL_SPACE_RCOND)
    for M in (V, U):
        M.setflags(write=False)
    return V, U


def null_space_basis(d: int) -> np.ndarray:
    """Columns span ``null(A_tau) ∩ {x : sum x = 0}``; dimension ``d! - C(d,2) - 1``."""
    return _subspace_bases(d)[0]


def complement_basis(d: int) -> np.ndarray:
    """Columns span the orthogonal complement of ``null(A_tau)`` inside the sum-zero hyperplane."""
    return _subspace_bases(d)[1]


def construct_shifted_distribution(
    P: DistributionOnSd,
    delta: float,
    in_null_space: bool,
    seed: int | np.random.Generator = 0,
    max_draws: int = 1,
) -> DistributionOnSd:
    """``Q = P + eps * gamma`` for a random unit direction ``gamma``.

    With ``in_null_space`` the direction lies in ``null(A_tau)`` and ``eps`` is
    the largest step keeping ``Q >= 0``, so ``A_tau (P - Q) = 0``. Otherwise the
    direction lies in the complement and ``eps`` is set so that
    ``||A_tau (P - Q)|| == delta``. Directions are isotropic Gaussian vectors
    projected onto the subspace and normalized.

    If the step leaves the simplex, up to ``max_draws`` directions are tried
    from the same stream (i.e. a direction uniform among the feasible ones);
    after that a :class:`DataError` is raised.
    """
    d = P.degree
    if d < 3:
        raise ValueError("the shifted construction needs d >= 3")
    if delta < 0 or not math.isfinite(delta):
        raise ValueError(f"delta must be finite and >= 0, got {delta}")
    if max_draws < 1:
        raise ValueError(f"max_draws must be >= 1, got {max_draws}")
    rng = np.random.default_rng(seed)
    p = np.asarray(P.probs, dtype=float)
    if in_null_space and p.min() <= 0:
        raise DataError("P must be strictly positive for a null-space shift")
    if not in_null_space and delta == 0:
        return P
    A = a_tau_matrix(d).astype(float)
    B = null_space_basis(d) if in_null_space else complement_basis(d)
    worst = 0.0
    for _ in range(max_draws):
        gamma = B @ rng.standard_normal(B.shape[1])
        gamma /= np.linalg.norm(gamma)
        if in_null_space:
            steps = np.full(p.size, np.inf)
            neg = gamma < 0
            steps[neg] = p[neg] / -gamma[neg]
            j = int(np.argmin(steps))
            q = p + steps[j] * gamma
            q[j] = 0.0
        else:
            q = p + delta / float(np.linalg.norm(A @ gamma)) * gamma
            if q.min() < 0:
                worst = float(q.min())
                continue
        q = np.clip(q, 0.0, None)
        q /= q.sum()
        return DistributionOnSd(q, d)
    raise DataError(
        f"delta={delta} is unreachable inside the simplex in {max_draws} drawn direction(s) "
        f"(last min coordinate {worst:.3g})"
    )
