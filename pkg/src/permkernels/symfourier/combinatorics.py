"""Partitions, standard Young tableaux and tabloids.

A partition is a plain tuple of non-increasing positive ints. Tableaux are
tuples of rows (each a tuple of ints); tabloids are tuples of row-sets stored
as sorted tuples.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import factorial, prod
from typing import Sequence

Partition = tuple[int, ...]
Tableau = tuple[tuple[int, ...], ...]
Tabloid = tuple[tuple[int, ...], ...]


def validate_partition(lam: Sequence[int]) -> Partition:
    lam = tuple(int(x) for x in lam)
    if not lam or any(x < 1 for x in lam) or any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError(f"not a partition: {lam}")
    return lam


@lru_cache(maxsize=None)
def partitions(d: int) -> tuple[Partition, ...]:
    """All partitions of ``d`` in reverse lexicographic order: ``(d)`` first, ``(1,...,1)`` last."""
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    out: list[Partition] = []

    def rec(remaining: int, largest: int, prefix: list[int]):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(min(remaining, largest), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(d, d, [])
    return tuple(out)


def dominates(lam: Sequence[int], mu: Sequence[int]) -> bool:
    """``lam`` dominates ``mu``: every prefix sum of ``lam`` is at least that of ``mu``.

    Prefixes are compared up to the shorter length.
    """
    lam, mu = validate_partition(lam), validate_partition(mu)
    if sum(lam) != sum(mu):
        raise ValueError(f"partitions of different integers: {lam} vs {mu}")
    s_l = s_m = 0
    for a, b in zip(lam, mu):
        s_l += a
        s_m += b
        if s_l < s_m:
            return False
    return True


def strictly_below(lam: Sequence[int], mu: Sequence[int]) -> bool:
    """Negation of :func:`dominates`; on partitions this is a total complement, not a strict order."""
    return not dominates(lam, mu)


def hook_partition(d: int, first_row: int) -> Partition:
    """``(first_row, 1, ..., 1)`` of size ``d``."""
    if not 1 <= first_row <= d:
        raise ValueError(f"first row {first_row} out of range for d={d}")
    return (first_row,) + (1,) * (d - first_row)


def conjugate(lam: Sequence[int]) -> Partition:
    lam = validate_partition(lam)
    return tuple(sum(1 for x in lam if x > j) for j in range(lam[0]))


def hook_length_dimension(lam: Sequence[int]) -> int:
    lam = validate_partition(lam)
    lam_t = conjugate(lam)
    hooks = prod(lam[i] - j + lam_t[j] - i - 1 for i in range(len(lam)) for j in range(lam[i]))
    return factorial(sum(lam)) // hooks


def irrep_dimension(lam: Sequence[int]) -> int:
    return hook_length_dimension(lam)


def _last_letter_key(t: Tableau) -> tuple[int, ...]:
    n = sum(len(r) for r in t)
    row_of = {v: i for i, row in enumerate(t) for v in row}
    return tuple(row_of[v] for v in range(n, 0, -1))


@lru_cache(maxsize=None)
def standard_tableaux(lam: Partition) -> tuple[Tableau, ...]:
    """Standard tableaux of shape ``lam`` in last-letter order.

    Tableaux are compared by the row holding ``d``, then the row holding
    ``d - 1``, and so on; a higher row sorts first.
    """
    lam = validate_partition(lam)
    n = sum(lam)
    out: list[Tableau] = []
    rows: list[list[int]] = [[] for _ in lam]

    def rec(k: int):
        if k > n:
            out.append(tuple(tuple(r) for r in rows))
            return
        for i in range(len(lam)):
            if len(rows[i]) < lam[i] and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(k)
                rec(k + 1)
                rows[i].pop()

    rec(1)
    return tuple(sorted(out, key=_last_letter_key))


def content(t: Tableau, value: int) -> int:
    """Column minus row of the box holding ``value``."""
    for i, row in enumerate(t):
        if value in row:
            return row.index(value) - i
    raise ValueError(f"{value} not in tableau")


def _tabloid_key(t: Tabloid):
    return t[1:]


@lru_cache(maxsize=None)
def tabloids(lam: Partition) -> tuple[Tabloid, ...]:
    """Tabloids of shape ``lam``.

    Ordered lexicographically by their rows below the first (each a sorted
    tuple); the first row is then determined. For ``(d-1, 1)`` this is the
    order of the single lower entry, for ``(d-2, 1, 1)`` the lexicographic
    order of ``(row 2 entry, row 3 entry)``.
    """
    lam = validate_partition(lam)
    n = sum(lam)
    out: list[Tabloid] = []

    def rec(i: int, remaining: tuple[int, ...], acc: list[tuple[int, ...]]):
        if i == len(lam):
            out.append(tuple(acc))
            return
        for row in combinations(remaining, lam[i]):
            rest = tuple(x for x in remaining if x not in row)
            acc.append(row)
            rec(i + 1, rest, acc)
            acc.pop()

    rec(0, tuple(range(1, n + 1)), [])
    return tuple(sorted(out, key=_tabloid_key))


def count_tabloids(lam: Sequence[int]) -> int:
    lam = validate_partition(lam)
    return factorial(sum(lam)) // prod(factorial(x) for x in lam)


@lru_cache(maxsize=None)
def kostka_number(shape: Partition, weight: Partition) -> int:
    """Number of semistandard tableaux of ``shape`` with content ``weight``.

    ``tau_weight`` contains the irrep ``rho_shape`` this many times.
    """
    shape, weight = validate_partition(shape), validate_partition(weight)
    if sum(shape) != sum(weight):
        raise ValueError("shape and weight must partition the same integer")

    # fill values 1..len(weight) one at a time as horizontal strips
    def rec(level: int, current: tuple[int, ...]) -> int:
        if level == len(weight):
            return 1 if current == shape else 0
        total = 0
        k = weight[level]

        def strips(row: int, left: int, new: list[int]):
            nonlocal total
            if row == len(shape):
                if left == 0:
                    total += rec(level + 1, tuple(x for x in new if x > 0))
                return
            cur = current[row] if row < len(current) else 0
            upper = shape[row] - cur
            if row > 0:
                prev_old = current[row - 1] if row - 1 < len(current) else 0
                upper = min(upper, prev_old - cur)
            for add in range(min(upper, left), -1, -1):
                new.append(cur + add)
                strips(row + 1, left - add, new)
                new.pop()

        strips(0, k, [])
        return total

    return rec(0, ())
