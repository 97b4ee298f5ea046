"""
Permutations of ``[n] = {1, ..., n}`` in one-line notation, their inversions,
the Lehmer bijection ``S_n <-> G_n = [1] x [2] x ... x [n]`` and a factoradic
rank used to index bitsets over ``S_n``.

Conventions (1-based throughout):

* a permutation is a tuple ``(a_1, ..., a_n)`` of the values ``1..n``;
* the Lehmer code is ``f_j = |{i <= j : pos(a, i) <= pos(a, j)}|``, so the
  identity maps to ``(1, 2, ..., n)`` and the reversal to ``(1, 1, ..., 1)``;
* ``rank(a) = sum_k (k - f_k) * (k-1)!``, so the identity has rank 0 and the
  reversal rank ``n! - 1``.  The identity is the top of every order used in
  this package, which makes rank 0 the top element.

>>> encode_lehmer((3, 1, 2))
(1, 2, 1)
>>> rank((3, 1, 2))
4
>>> unrank(4, 3)
(3, 1, 2)
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Iterable, NewType, Sequence

import numpy as np

__all__ = [
    "MAX_N", "Permutation", "LehmerCode",
    "check_perm", "parse_perm", "format_perm", "identity", "reversal",
    "pos", "positions", "inversions", "inversion_count", "adjacent_inversions",
    "encode_lehmer", "encode_lehmer_naive", "decode_lehmer", "decode_lehmer_naive",
    "rank", "unrank", "grid_join", "grid_meet",
    "displacement", "displacement_list",
    "all_perms", "all_positions", "all_codes", "rank_many", "decode_many",
]

# factorials beyond 20! overflow 64-bit ranks
MAX_N = 20

# a permutation of 1..n in one-line notation
Permutation = NewType("Permutation", tuple)

# (f_1, ..., f_n) with 1 <= f_k <= k
LehmerCode = NewType("LehmerCode", tuple)


def check_perm(values: Iterable[int]) -> Permutation:
    """Validate and freeze a one-line permutation."""
    a = tuple(int(v) for v in values)
    n = len(a)
    if n < 1:
        raise ValueError("a permutation needs n >= 1")
    if n > MAX_N:
        raise ValueError(f"n={n} exceeds the supported maximum {MAX_N}")
    if sorted(a) != list(range(1, n + 1)):
        raise ValueError(f"{a} is not a permutation of 1..{n}")
    return Permutation(a)


def parse_perm(text: str) -> Permutation:
    """Parse the text form ``"3,1,2"``."""
    return check_perm(int(x) for x in text.replace(" ", "").split(",") if x)


def format_perm(a: Sequence[int]) -> str:
    return ",".join(str(int(x)) for x in a)


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def reversal(n: int) -> Permutation:
    return Permutation(tuple(range(n, 0, -1)))


def positions(a: Sequence[int]) -> list[int]:
    """``p[i] = pos(a, i)`` for ``i = 1..n``; ``p[0]`` is unused."""
    p = [0] * (len(a) + 1)
    for k, v in enumerate(a, start=1):
        p[v] = k
    return p


def pos(a: Sequence[int], i: int) -> int:
    """Position (1-based) of value ``i`` in ``a``."""
    if not 1 <= i <= len(a):
        raise ValueError(f"value {i} out of range 1..{len(a)}")
    return a.index(i) + 1


def inversions(a: Sequence[int]) -> set[tuple[int, int]]:
    """Value pairs ``(i, j)``, ``i < j``, with ``j`` placed before ``i``."""
    p = positions(a)
    n = len(a)
    return {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if p[i] > p[j]}


def inversion_count(a: Sequence[int]) -> int:
    n = len(a)
    return sum(1 for x in range(n) for y in range(x + 1, n) if a[x] > a[y])


def adjacent_inversions(a: Sequence[int]) -> set[tuple[int, int]]:
    """Inversions whose two values sit in consecutive positions."""
    return {(a[k + 1], a[k]) for k in range(len(a) - 1) if a[k] > a[k + 1]}


class _Fenwick:
    """Prefix counts over 1..n for the O(n log n) Lehmer maps."""

    def __init__(self, n: int):
        self.n = n
        self.tree = [0] * (n + 1)

    def add(self, i: int, delta: int = 1) -> None:
        while i <= self.n:
            self.tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        s = 0
        while i > 0:
            s += self.tree[i]
            i -= i & -i
        return s

    def find_kth(self, k: int) -> int:
        # smallest index whose prefix count reaches k
        idx = 0
        step = 1 << self.n.bit_length()
        while step:
            nxt = idx + step
            if nxt <= self.n and self.tree[nxt] < k:
                idx = nxt
                k -= self.tree[nxt]
            step >>= 1
        return idx + 1


def encode_lehmer(a: Sequence[int]) -> LehmerCode:
    """Lehmer code ``f(a)``; ``f_j`` counts ``i <= j`` placed at or before ``j``."""
    n = len(a)
    p = positions(a)
    fw = _Fenwick(n)
    f = [0] * n
    for j in range(1, n + 1):
        f[j - 1] = fw.prefix(p[j]) + 1
        fw.add(p[j])
    return LehmerCode(tuple(f))


def encode_lehmer_naive(a: Sequence[int]) -> LehmerCode:
    p = positions(a)
    n = len(a)
    return LehmerCode(tuple(
        sum(1 for i in range(1, j + 1) if p[i] <= p[j]) for j in range(1, n + 1)
    ))


def _check_code(f: Sequence[int]) -> tuple[int, ...]:
    f = tuple(int(x) for x in f)
    if not f or len(f) > MAX_N:
        raise ValueError(f"code length {len(f)} out of range 1..{MAX_N}")
    for k, fk in enumerate(f, start=1):
        if not 1 <= fk <= k:
            raise ValueError(f"f_{k} = {fk} not in [1..{k}]")
    return f


def decode_lehmer_naive(f: Sequence[int]) -> Permutation:
    """Insert ``j`` as the ``f_j``-th of ``{1..j}``, for ``j = 1..n``."""
    f = _check_code(f)
    out: list[int] = []
    for j, fj in enumerate(f, start=1):
        out.insert(fj - 1, j)
    return Permutation(tuple(out))


def decode_lehmer(f: Sequence[int]) -> Permutation:
    """Inverse of :func:`encode_lehmer`.

    Processed from ``j = n`` down: element ``j`` has ``j - f_j`` smaller
    elements after it, all of them placed later, so it takes the
    ``(j - f_j + 1)``-th free slot counted from the right.
    """
    f = _check_code(f)
    n = len(f)
    fw = _Fenwick(n)
    for k in range(1, n + 1):
        fw.add(k)
    out = [0] * n
    for j in range(n, 0, -1):
        from_right = j - f[j - 1] + 1
        free = fw.prefix(n)
        slot = fw.find_kth(free - from_right + 1)
        out[slot - 1] = j
        fw.add(slot, -1)
    return Permutation(tuple(out))


@lru_cache(maxsize=None)
def _factorials(n: int) -> tuple[int, ...]:
    return tuple(factorial(k) for k in range(n + 1))


def rank(a: Sequence[int]) -> int:
    f = encode_lehmer(a)
    fact = _factorials(len(f))
    return sum((k - fk) * fact[k - 1] for k, fk in enumerate(f, start=1))


def unrank(r: int, n: int) -> Permutation:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n={n} out of range 1..{MAX_N}")
    if not 0 <= r < factorial(n):
        raise ValueError(f"rank {r} out of range [0, {n}!)")
    fact = _factorials(n)
    f = [k - (r // fact[k - 1]) % k for k in range(1, n + 1)]
    return decode_lehmer(f)


def _same_n(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise ValueError(f"mismatched n: {len(a)} vs {len(b)}")


def grid_join(a: Sequence[int], b: Sequence[int]) -> Permutation:
    """Permutation whose Lehmer code is the componentwise max."""
    _same_n(a, b)
    return decode_lehmer([max(x, y) for x, y in zip(encode_lehmer(a), encode_lehmer(b))])


def grid_meet(a: Sequence[int], b: Sequence[int]) -> Permutation:
    _same_n(a, b)
    return decode_lehmer([min(x, y) for x, y in zip(encode_lehmer(a), encode_lehmer(b))])


def displacement(a: Sequence[int], i: int) -> int:
    return abs(i - pos(a, i))


def displacement_list(a: Sequence[int]) -> tuple[int, ...]:
    p = positions(a)
    return tuple(abs(i - p[i]) for i in range(1, len(a) + 1))


# -- whole-S_n tables, indexed by rank -------------------------------------

# full tables are materialised up to this n (10! rows)
TABLE_MAX_N = 10


def _check_table_n(n: int) -> None:
    if not 1 <= n <= TABLE_MAX_N:
        raise ValueError(f"n={n} out of range 1..{TABLE_MAX_N} for S_n tables")


@lru_cache(maxsize=None)
def all_codes(n: int) -> np.ndarray:
    """``codes[r] = f(unrank(r))`` as an ``(n!, n)`` int8 array."""
    _check_table_n(n)
    r = np.arange(factorial(n), dtype=np.int64)
    codes = np.empty((r.size, n), dtype=np.int8)
    for k in range(1, n + 1):
        codes[:, k - 1] = k - (r // factorial(k - 1)) % k
    codes.flags.writeable = False
    return codes


def decode_many(codes: np.ndarray) -> np.ndarray:
    """Vectorised :func:`decode_lehmer`; returns the position array.

    ``out[r, i-1] = pos(a_r, i) - 1`` (0-based positions).
    """
    codes = np.asarray(codes)
    m, n = codes.shape
    p = np.zeros((m, n), dtype=np.int8)
    for j in range(2, n + 1):
        slot = (codes[:, j - 1] - 1).astype(np.int8)
        head = p[:, : j - 1]
        head += head >= slot[:, None]
        p[:, j - 1] = slot
    return p


@lru_cache(maxsize=None)
def all_positions(n: int) -> np.ndarray:
    """``pos[r, i-1] = pos(unrank(r), i) - 1``."""
    p = decode_many(all_codes(n))
    p.flags.writeable = False
    return p


@lru_cache(maxsize=None)
def all_perms(n: int) -> np.ndarray:
    """``perms[r] = unrank(r, n)`` as an ``(n!, n)`` int8 array of values."""
    p = all_positions(n).astype(np.int64)
    perms = np.empty_like(p, dtype=np.int8)
    rows = np.arange(p.shape[0])[:, None]
    perms[rows, p] = np.arange(1, n + 1, dtype=np.int8)[None, :]
    perms.flags.writeable = False
    return perms


def rank_many(perms: np.ndarray) -> np.ndarray:
    """Vectorised :func:`rank` over the rows of a one-line array."""
    perms = np.asarray(perms)
    m, n = perms.shape
    p = np.empty((m, n), dtype=np.int64)
    rows = np.arange(m)[:, None]
    p[rows, perms.astype(np.int64) - 1] = np.arange(n)[None, :]
    r = np.zeros(m, dtype=np.int64)
    for j in range(2, n + 1):
        # j - f_j = number of smaller values placed after j
        after = (p[:, : j - 1] > p[:, j - 1 : j]).sum(axis=1)
        r += after * factorial(j - 1)
    return r
