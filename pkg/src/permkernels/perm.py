"""Permutations of {1..d} in one-line notation.

A permutation ``sigma`` is stored as the tuple of ranks ``(sigma(1), ..., sigma(d))``
where ``sigma(i)`` is the rank given to item ``i``. Values are 0-based
internally and 1-based at every public boundary (constructor, ``ranks``,
``str``).

Composition follows ``(a * b)(i) = a(b(i))``: ``b`` is applied first.
"""

from __future__ import annotations

import math
from itertools import permutations as _itertools_permutations
from typing import Iterable, Iterator, Sequence

import numpy as np

#: Largest degree for which any routine materializes all of S_d.
MAX_DEGREE = 8


class DegreeMismatchError(ValueError):
    pass


class Permutation:
    """Immutable permutation of {1..d}.

    >>> Permutation([2, 1, 3]) * Permutation([1, 3, 2])
    Permutation([2, 3, 1])
    """

    __slots__ = ("_a", "_hash")

    def __init__(self, ranks: Iterable[int]):
        a = tuple(int(r) - 1 for r in ranks)
        if not a:
            raise ValueError("a permutation needs at least one item")
        if sorted(a) != list(range(len(a))):
            raise ValueError(f"not a bijection of 1..{len(a)}: {[x + 1 for x in a]}")
        self._a = a
        self._hash = hash(a)

    @classmethod
    def _from_zero_based(cls, a: Sequence[int]) -> "Permutation":
        obj = cls.__new__(cls)
        obj._a = tuple(int(x) for x in a)
        obj._hash = hash(obj._a)
        return obj

    @classmethod
    def from_zero_based(cls, a: Sequence[int]) -> "Permutation":
        """Build from 0-based ranks, validating bijectivity."""
        return cls(x + 1 for x in a)

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls._from_zero_based(range(d))

    @classmethod
    def reversal(cls, d: int) -> "Permutation":
        return cls._from_zero_based(range(d - 1, -1, -1))

    @classmethod
    def adjacent_transposition(cls, d: int, k: int) -> "Permutation":
        """The transposition swapping ``k`` and ``k + 1`` (1-based, ``1 <= k < d``)."""
        if not 1 <= k < d:
            raise ValueError(f"adjacent transposition index {k} out of range for d={d}")
        a = list(range(d))
        a[k - 1], a[k] = a[k], a[k - 1]
        return cls._from_zero_based(a)

    @property
    def degree(self) -> int:
        return len(self._a)

    @property
    def ranks(self) -> tuple[int, ...]:
        """1-based one-line array."""
        return tuple(x + 1 for x in self._a)

    @property
    def zero_based(self) -> tuple[int, ...]:
        return self._a

    def __call__(self, i: int) -> int:
        """Rank of item ``i`` (both 1-based)."""
        return self._a[i - 1] + 1

    def __len__(self) -> int:
        return len(self._a)

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._a == other._a

    def __lt__(self, other: "Permutation") -> bool:
        return self._a < other._a

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Permutation({list(self.ranks)})"

    def __str__(self) -> str:
        return "[" + ",".join(str(r) for r in self.ranks) + "]"

    def inverse(self) -> "Permutation":
        return inverse(self)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self._a))


def _check_same_degree(a: Permutation, b: Permutation) -> None:
    if a.degree != b.degree:
        raise DegreeMismatchError(f"degree mismatch: {a.degree} vs {b.degree}")


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Return ``a o b``, i.e. ``i -> a(b(i))``."""
    _check_same_degree(a, b)
    aa = a.zero_based
    return Permutation._from_zero_based([aa[j] for j in b.zero_based])


def inverse(a: Permutation) -> Permutation:
    out = [0] * a.degree
    for i, x in enumerate(a.zero_based):
        out[x] = i
    return Permutation._from_zero_based(out)


def _merge_count(seq: list[int]) -> tuple[list[int], int]:
    n = len(seq)
    if n < 2:
        return seq, 0
    mid = n // 2
    left, cl = _merge_count(seq[:mid])
    right, cr = _merge_count(seq[mid:])
    merged = []
    count = cl + cr
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            # every remaining left element exceeds right[j]
            count += len(left) - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, count


def count_inversions(a: Permutation | Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``a(i) > a(j)``, by merge sort in O(d log d)."""
    seq = list(a.zero_based) if isinstance(a, Permutation) else list(a)
    return _merge_count(seq)[1]


def count_inversions_bruteforce(a: Permutation | Sequence[int]) -> int:
    seq = list(a.zero_based) if isinstance(a, Permutation) else list(a)
    n = len(seq)
    return sum(1 for i in range(n) for j in range(i + 1, n) if seq[i] > seq[j])


def discordant_pairs(a: Permutation, b: Permutation) -> int:
    """Number of item pairs ordered oppositely by ``a`` and ``b``.

    Computed as the inversion count of ``b o a^{-1}``: listing ``b``'s ranks in
    the order of ``a``'s ranks leaves exactly the discordant pairs inverted.
    """
    _check_same_degree(a, b)
    seq = [0] * a.degree
    bb = b.zero_based
    for i, r in enumerate(a.zero_based):
        seq[r] = bb[i]
    return _merge_count(seq)[1]


def concordant_pairs(a: Permutation, b: Permutation) -> int:
    return math.comb(a.degree, 2) - discordant_pairs(a, b)


def _check_cap(d: int, max_degree: int | None) -> None:
    cap = MAX_DEGREE if max_degree is None else max_degree
    if d < 1:
        raise ValueError(f"degree must be positive, got {d}")
    if d > cap:
        raise ValueError(f"degree {d} exceeds the materialization cap {cap} ({math.factorial(d)} permutations)")


def enumerate_sn(d: int, max_degree: int | None = None) -> list[Permutation]:
    """All of S_d in lexicographic order of the one-line array.

    The position of a permutation in this list is its :func:`perm_index`.
    """
    _check_cap(d, max_degree)
    return [Permutation._from_zero_based(p) for p in _itertools_permutations(range(d))]


def sn_array(d: int, max_degree: int | None = None) -> np.ndarray:
    """``(d!, d)`` int array of 0-based one-line arrays in canonical order."""
    _check_cap(d, max_degree)
    return np.array(list(_itertools_permutations(range(d))), dtype=np.int64).reshape(-1, d)


def perm_index(a: Permutation) -> int:
    """Lexicographic rank of ``a`` among the permutations of its degree (Lehmer code)."""
    a0 = a.zero_based
    d = len(a0)
    idx = 0
    for i in range(d):
        smaller = sum(1 for j in range(i + 1, d) if a0[j] < a0[i])
        idx += smaller * math.factorial(d - 1 - i)
    return idx


def from_index(index: int, d: int) -> Permutation:
    if not 0 <= index < math.factorial(d):
        raise ValueError(f"index {index} out of range for S_{d}")
    items = list(range(d))
    out = []
    for i in range(d - 1, -1, -1):
        q, index = divmod(index, math.factorial(i))
        out.append(items.pop(q))
    return Permutation._from_zero_based(out)


def adjacent_decomposition(a: Permutation) -> list[int]:
    """Reduced word ``[k_1, ..., k_m]`` with ``a = s_{k_1} o ... o s_{k_m}``.

    ``s_k`` swaps ``k`` and ``k + 1``. Bubble sort on the one-line array swaps
    adjacent positions, i.e. right-multiplies by ``s_k``; reversing the swap
    sequence then gives a word for ``a`` of length ``count_inversions(a)``.
    """
    arr = list(a.zero_based)
    swaps = []
    n = len(arr)
    for end in range(n - 1, 0, -1):
        for i in range(end):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                swaps.append(i + 1)
    swaps.reverse()
    return swaps


def adjacent_decomposition_insertion(a: Permutation) -> list[int]:
    """Alternative reduced word built by insertion sort.

    Used to check that representation matrices do not depend on the word chosen.
    """
    arr = list(a.zero_based)
    swaps = []
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            swaps.append(j)
            j -= 1
    swaps.reverse()
    return swaps


def from_word(word: Iterable[int], d: int) -> Permutation:
    out = Permutation.identity(d)
    for k in word:
        out = compose(out, Permutation.adjacent_transposition(d, k))
    return out


def random_permutation(d: int, rng: np.random.Generator) -> Permutation:
    return Permutation._from_zero_based(rng.permutation(d))


def as_array(perms: Sequence[Permutation]) -> np.ndarray:
    """Stack permutations into an ``(n, d)`` array of 0-based ranks."""
    if not perms:
        raise ValueError("empty permutation list")
    d = perms[0].degree
    for i, p in enumerate(perms):
        if p.degree != d:
            raise DegreeMismatchError(f"permutation {i} has degree {p.degree}, expected {d}")
    return np.array([p.zero_based for p in perms], dtype=np.int64).reshape(len(perms), d)


def iter_pairs(d: int) -> Iterator[tuple[int, int]]:
    """Item pairs ``(a, b)``, ``1 <= a < b <= d``, ordered by ``a`` then ``b``."""
    for a in range(1, d + 1):
        for b in range(a + 1, d + 1):
            yield a, b


def perm_indices(X: np.ndarray) -> np.ndarray:
    """Vectorized :func:`perm_index` over rows of an ``(n, d)`` 0-based rank array."""
    X = np.asarray(X)
    n, d = X.shape
    idx = np.zeros(n, dtype=np.int64)
    for i in range(d):
        smaller = np.sum(X[:, i + 1 :] < X[:, i : i + 1], axis=1)
        idx += smaller * math.factorial(d - 1 - i)
    return idx


def inverse_indices(d: int) -> np.ndarray:
    """``inv[i]`` is the index of the inverse of permutation ``i``."""
    X = sn_array(d)
    return perm_indices(np.argsort(X, axis=1))
