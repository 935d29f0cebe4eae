"""Young's orthogonal representation and the tabloid permutation representations.

Both are genuine homomorphisms for the composition ``(a*b)(i) = a(b(i))``:
``rho(a * b) == rho(a) @ rho(b)``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from ..perm import Permutation, adjacent_decomposition, enumerate_sn
from .combinatorics import Partition, content, standard_tableaux, tabloids, validate_partition


def _check_shape(lam: Sequence[int], d: int) -> Partition:
    lam = validate_partition(lam)
    if sum(lam) != d:
        raise ValueError(f"partition {lam} is not a partition of {d}")
    return lam


@lru_cache(maxsize=None)
def _generator_data(lam: Partition, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sparse form of ``rho(s_k)``: column ``i`` is ``diag[i] e_i + off[i] e_partner[i]``.

    ``r`` is the axial distance ``content(k+1) - content(k)``; swapping ``k`` and
    ``k+1`` in a tableau is standard exactly when ``|r| > 1``.
    """
    tabs = standard_tableaux(lam)
    index = {t: i for i, t in enumerate(tabs)}
    n = len(tabs)
    diag = np.empty(n)
    off = np.zeros(n)
    partner = np.arange(n)
    for i, t in enumerate(tabs):
        r = content(t, k + 1) - content(t, k)
        diag[i] = 1.0 / r
        if abs(r) > 1:
            swapped = tuple(tuple(k + 1 if v == k else k if v == k + 1 else v for v in row) for row in t)
            partner[i] = index[swapped]
            off[i] = math.sqrt(1.0 - 1.0 / r**2)
    for arr in (diag, off, partner):
        arr.setflags(write=False)
    return diag, off, partner


def adjacent_matrix(lam: Sequence[int], k: int) -> np.ndarray:
    """Dense ``rho_lam(s_k)``; symmetric, orthogonal and an involution."""
    lam = validate_partition(lam)
    diag, off, partner = _generator_data(lam, k)
    n = diag.size
    m = np.diag(diag)
    m[partner, np.arange(n)] += off
    return m


def right_multiply_adjacent(M: np.ndarray, lam: Partition, k: int) -> np.ndarray:
    """``M @ rho_lam(s_k)`` in O(d_lam^2)."""
    diag, off, partner = _generator_data(lam, k)
    return M * diag + M[:, partner] * off


def yor_matrix(lam: Sequence[int], sigma: Permutation, word: Sequence[int] | None = None) -> np.ndarray:
    """``rho_lam(sigma)`` as the ordered product over a reduced word for ``sigma``."""
    lam = _check_shape(lam, sigma.degree)
    n = len(standard_tableaux(lam))
    M = np.eye(n)
    for k in adjacent_decomposition(sigma) if word is None else word:
        M = right_multiply_adjacent(M, lam, k)
    return M


@lru_cache(maxsize=None)
def _spanning_tree(d: int) -> tuple[tuple[int, int, int], ...]:
    """Pre-order schedule ``(index, parent_index, k)`` covering S_d from the identity.

    The parent of ``sigma != e`` is ``sigma o s_k`` with ``k`` its first descent,
    which has one inversion fewer, so ``rho(sigma) = rho(parent) rho(s_k)``.
    """
    schedule: list[tuple[int, int, int]] = []
    stack = [tuple(range(d))]
    index_of = {tuple(p.zero_based): i for i, p in enumerate(enumerate_sn(d))}
    while stack:
        node = stack.pop()
        idx = index_of[node]
        for k in range(1, d):
            if node[k - 1] < node[k]:
                child = list(node)
                child[k - 1], child[k] = child[k], child[k - 1]
                first_descent = next(j for j in range(1, d) if child[j - 1] > child[j])
                if first_descent == k:
                    child = tuple(child)
                    schedule.append((index_of[child], idx, k))
                    stack.append(child)
    return tuple(schedule)


def iter_yor(lam: Sequence[int], d: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(perm_index, rho_lam(sigma))`` for every sigma in S_d.

    Walks the spanning tree keeping only matrices whose subtrees are unfinished.
    """
    lam = _check_shape(lam, d)
    n = len(standard_tableaux(lam))
    schedule = _spanning_tree(d)
    pending = {0: 0}
    for _, parent, _k in schedule:
        pending[parent] = pending.get(parent, 0) + 1
    mats = {0: np.eye(n)}
    yield 0, mats[0]
    for idx, parent, k in schedule:
        M = right_multiply_adjacent(mats[parent], lam, k)
        pending[parent] -= 1
        if pending[parent] == 0:
            del mats[parent]
        if pending.get(idx, 0):
            mats[idx] = M
        yield idx, M


#: Materialize all irrep matrices of a shape only below this many floats.
TENSOR_BUDGET = 2 * 10**7


@lru_cache(maxsize=64)
def yor_tensor(lam: Partition, d: int) -> np.ndarray:
    """``(d!, d_lam, d_lam)`` array of all ``rho_lam(sigma)`` in canonical order."""
    lam = _check_shape(lam, d)
    n = len(standard_tableaux(lam))
    total = math.factorial(d) * n * n
    if total > TENSOR_BUDGET:
        raise MemoryError(f"irrep tensor for {lam} needs {total} floats, over budget {TENSOR_BUDGET}")
    out = np.empty((math.factorial(d), n, n))
    for idx, M in iter_yor(lam, d):
        out[idx] = M
    out.setflags(write=False)
    return out


def tensor_fits(lam: Partition, d: int) -> bool:
    n = len(standard_tableaux(lam))
    return math.factorial(d) * n * n <= TENSOR_BUDGET


def _act_on_tabloid(sigma: Permutation, t) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sorted(sigma(x) for x in row)) for row in t)


def tau_matrix(lam: Sequence[int], sigma: Permutation) -> np.ndarray:
    """Permutation matrix of sigma on tabloids of shape ``lam``.

    Entry ``(i, j)`` is 1 iff sigma maps tabloid ``j`` to tabloid ``i``. This
    column convention is what makes ``tau(a * b) == tau(a) @ tau(b)``.
    """
    lam = _check_shape(lam, sigma.degree)
    tabs = tabloids(lam)
    index = {t: i for i, t in enumerate(tabs)}
    M = np.zeros((len(tabs), len(tabs)))
    for j, t in enumerate(tabs):
        M[index[_act_on_tabloid(sigma, t)], j] = 1.0
    return M


def tau_transform(f: np.ndarray, lam: Sequence[int], d: int) -> np.ndarray:
    """``sum_sigma f(sigma) tau_lam(sigma)``: entry ``(i, j)`` sums f over sigma sending tabloid j to i."""
    lam = _check_shape(lam, d)
    f = np.asarray(f, dtype=float).reshape(-1)
    if f.size != math.factorial(d):
        raise ValueError(f"function has {f.size} values, expected {math.factorial(d)}")
    tabs = tabloids(lam)
    index = {t: i for i, t in enumerate(tabs)}
    out = np.zeros((len(tabs), len(tabs)))
    for sigma, w in zip(enumerate_sn(d), f):
        if w == 0:
            continue
        for j, t in enumerate(tabs):
            out[index[_act_on_tabloid(sigma, t)], j] += w
    return out
