"""
Strong, weak, grid and t-bounded orders on ``S_n``.

Orientation: swapping an inversion into increasing order moves *up*, so the
identity is the unique maximum and the reversal the unique minimum.  This is
the mirror image of the usual Bruhat convention; textbook criteria have to be
flipped before use here.

* strong: swap any inversion;
* weak: swap an inversion sitting in adjacent positions;
* t-bounded ``T(t)``: swap an inversion whose positions are at most ``t``
  apart (``T(1)`` is weak, ``T(n-1)`` and above are strong);
* grid: componentwise order on Lehmer codes.  A single step raises one
  coordinate ``f_k`` by one, which is the same as swapping a dominated
  inversion (see :func:`dominated_inversions`).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, log
from typing import Iterator, Sequence

import numpy as np
from scipy import sparse

from .perm import (
    Permutation, all_codes, all_perms, check_perm, decode_lehmer, encode_lehmer,
    inversion_count, inversions, rank, rank_many,
)
from .permset import PermSet

__all__ = [
    "Order", "STRONG", "WEAK", "GRID", "T", "parse_order",
    "up_moves", "leq", "leq_bfs", "up_edges", "inversion_counts", "upper_sets",
    "is_up_set", "up_closure", "up_closure_many", "slice_family", "slice_family_direct",
    "dominated_inversions", "iter_up_sets", "enumerate_up_sets",
    "random_up_set", "random_up_sets",
]

# n above which the full reachability relation is not tabulated
RELATION_MAX_N = 7


@dataclass(frozen=True)
class Order:
    kind: str
    t: int | None = None

    def __post_init__(self):
        if self.kind not in ("strong", "weak", "grid", "t"):
            raise ValueError(f"unknown order kind {self.kind!r}")
        if self.kind == "t" and (self.t is None or self.t < 1):
            raise ValueError("T(t) needs t >= 1")

    def max_gap(self, n: int) -> int | None:
        """Largest allowed position gap for swap-based orders."""
        if self.kind == "strong":
            return n - 1
        if self.kind == "weak":
            return 1
        if self.kind == "t":
            return min(self.t, n - 1)
        return None

    def __str__(self) -> str:
        return f"t:{self.t}" if self.kind == "t" else self.kind


STRONG = Order("strong")
WEAK = Order("weak")
GRID = Order("grid")


def T(t: int) -> Order:
    return Order("t", int(t))


def parse_order(text: str) -> Order:
    text = text.strip().lower()
    if text.startswith("t:"):
        return T(int(text[2:]))
    return Order(text)


def up_moves(a: Sequence[int], order: Order) -> list[Permutation]:
    """All permutations one permitted swap above ``a``."""
    a = check_perm(a)
    n = len(a)
    if order.kind == "grid":
        f = list(encode_lehmer(a))
        out = []
        for k in range(n):
            if f[k] < k + 1:
                g = f.copy()
                g[k] += 1
                out.append(decode_lehmer(g))
        return out
    gap = order.max_gap(n)
    out = []
    for p in range(n):
        for q in range(p + 1, min(n, p + gap + 1)):
            if a[p] > a[q]:
                b = list(a)
                b[p], b[q] = b[q], b[p]
                out.append(Permutation(tuple(b)))
    return out


@lru_cache(maxsize=None)
def inversion_counts(n: int) -> np.ndarray:
    codes = all_codes(n).astype(np.int64)
    inv = (np.arange(1, n + 1)[None, :] - codes).sum(axis=1)
    inv.flags.writeable = False
    return inv


@lru_cache(maxsize=None)
def up_edges(n: int, order: Order) -> tuple[np.ndarray, np.ndarray]:
    """Every single up-move over ``S_n`` as parallel rank arrays ``(src, dst)``."""
    srcs, dsts = [], []
    if order.kind == "grid":
        codes = all_codes(n)
        for k in range(1, n + 1):
            rows = np.flatnonzero(codes[:, k - 1] < k)
            srcs.append(rows)
            dsts.append(rows - factorial(k - 1))
    else:
        perms = all_perms(n)
        gap = order.max_gap(n)
        for p in range(n):
            for q in range(p + 1, min(n, p + gap + 1)):
                rows = np.flatnonzero(perms[:, p] > perms[:, q])
                if rows.size == 0:
                    continue
                swapped = perms[rows].copy()
                swapped[:, [p, q]] = swapped[:, [q, p]]
                srcs.append(rows)
                dsts.append(rank_many(swapped))
    if not srcs:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    src = np.concatenate(srcs).astype(np.int64)
    dst = np.concatenate(dsts).astype(np.int64)
    src.flags.writeable = False
    dst.flags.writeable = False
    return src, dst


@lru_cache(maxsize=None)
def _layered_propagators(n: int, order: Order):
    """Per inversion layer, the sparse map from that layer's members to their up-moves."""
    src, dst = up_edges(n, order)
    inv = inversion_counts(n)
    size = factorial(n)
    out = []
    for level in range(int(inv.max()), 0, -1):
        members = np.flatnonzero(inv == level)
        sel = inv[src] == level
        local = np.searchsorted(members, src[sel])
        mat = sparse.csr_matrix(
            (np.ones(local.size, dtype=np.float32), (local, dst[sel])),
            shape=(members.size, size),
        )
        out.append((members, mat))
    return out


def up_closure_many(seeds: np.ndarray, n: int, order: Order) -> np.ndarray:
    """Row-wise up-closure of a ``(K, n!)`` boolean matrix."""
    x = np.array(seeds, dtype=bool, copy=True).reshape(-1, factorial(n))
    for members, mat in _layered_propagators(n, order):
        block = x[:, members]
        if not block.any():
            continue
        x |= np.asarray(mat.T.dot(block.T.astype(np.float32)).T) > 0
    return x


def up_closure(s: PermSet, order: Order) -> PermSet:
    """Smallest up-set of ``order`` containing ``s``."""
    return PermSet(s.n, up_closure_many(s.bits[None, :], s.n, order)[0])


def is_up_set(s: PermSet, order: Order) -> bool:
    src, dst = up_edges(s.n, order)
    b = s.bits
    return not np.any(b[src] & ~b[dst])


@lru_cache(maxsize=None)
def upper_sets(n: int, order: Order) -> tuple[int, ...]:
    """``upper[r]`` is an int bitset of every rank ``>=`` rank ``r`` (BFS ground truth)."""
    if n > RELATION_MAX_N:
        raise ValueError(f"relation tables only up to n={RELATION_MAX_N}")
    src, dst = up_edges(n, order)
    size = factorial(n)
    targets: list[list[int]] = [[] for _ in range(size)]
    for s, d in zip(src.tolist(), dst.tolist()):
        targets[s].append(d)
    inv = inversion_counts(n)
    upper = [0] * size
    for r in np.argsort(inv, kind="stable").tolist():
        acc = 1 << r
        for d in targets[r]:
            acc |= upper[d]
        upper[r] = acc
    return tuple(upper)


def leq_bfs(a: Sequence[int], b: Sequence[int], order: Order) -> bool:
    """``a <= b`` by explicit search over up-moves from ``a``."""
    a, b = check_perm(a), check_perm(b)
    if len(a) != len(b):
        raise ValueError(f"mismatched n: {len(a)} vs {len(b)}")
    if a == b:
        return True
    target_inv = inversion_count(b)
    seen = {a}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        for y in up_moves(x, order):
            if y == b:
                return True
            if y not in seen and inversion_count(y) > target_inv:
                seen.add(y)
                queue.append(y)
    return False


def _strong_leq_tableau(a: Sequence[int], b: Sequence[int]) -> bool:
    # mirrored tableau criterion: every sorted prefix of b is dominated by that of a
    for k in range(1, len(a)):
        pa, pb = sorted(a[:k]), sorted(b[:k])
        if any(x < y for x, y in zip(pa, pb)):
            return False
    return True


def leq(a: Sequence[int], b: Sequence[int], order: Order, method: str = "auto") -> bool:
    """``a <= b`` in ``order`` (``b`` is at least as close to the identity).

    ``method="bfs"`` forces the search ground truth; ``"auto"`` uses the
    inversion-containment criterion for weak, the sorted-prefix criterion for
    strong, Lehmer codes for grid and tabulated reachability for ``T(t)``.
    """
    a, b = check_perm(a), check_perm(b)
    n = len(a)
    if len(b) != n:
        raise ValueError(f"mismatched n: {n} vs {len(b)}")
    if order.kind == "grid":
        return all(x <= y for x, y in zip(encode_lehmer(a), encode_lehmer(b)))
    if method == "bfs":
        return leq_bfs(a, b, order)
    if order.kind == "weak" or (order.kind == "t" and order.t == 1):
        return inversions(b) <= inversions(a)
    if order.kind == "strong" or order.t >= n - 1:
        return _strong_leq_tableau(a, b)
    if n <= RELATION_MAX_N:
        return bool(upper_sets(n, order)[rank(a)] >> rank(b) & 1)
    return leq_bfs(a, b, order)


def dominated_inversions(a: Sequence[int]) -> set[tuple[int, int]]:
    """Inversions ``(i, j)``, ``i < j``, with every entry strictly between them above ``j``.

    With ``j`` at position ``k`` and ``i`` at position ``l > k``, the pair is
    dominated when ``a_m > j`` for all ``k < m < l``.  Swapping it raises
    ``f_j`` by one and changes no other Lehmer coordinate.
    """
    a = check_perm(a)
    n = len(a)
    out = set()
    for k in range(n):
        hi = a[k]
        for l in range(k + 1, n):
            if a[l] < hi:
                out.add((a[l], hi))
                # anything further right is blocked by this smaller entry
                break
    return out


def slice_family(s: PermSet, k: int) -> PermSet:
    """Slice ``A_k``: members with ``n`` in position ``k``, with ``n`` deleted.

    ``f_n`` is the position of ``n`` and deleting ``n`` leaves the other
    Lehmer coordinates unchanged, so the slice is a contiguous rank block.
    """
    n = s.n
    if not 1 <= k <= n:
        raise ValueError(f"slice position {k} out of range 1..{n}")
    if n == 1:
        raise ValueError("cannot slice S_1")
    block = factorial(n - 1)
    start = (n - k) * block
    return PermSet(n - 1, s.bits[start:start + block])


def slice_family_direct(s: PermSet, k: int) -> PermSet:
    """Slice by literal deletion of ``n`` (reference for :func:`slice_family`)."""
    n = s.n
    if not 1 <= k <= n:
        raise ValueError(f"slice position {k} out of range 1..{n}")
    kept = [a[: k - 1] + a[k:] for a in s if a[k - 1] == n]
    return PermSet.from_perms(n - 1, kept)


def _iter_up_masks(n: int, order: Order) -> Iterator[int]:
    src, dst = up_edges(n, order)
    size = factorial(n)
    above: list[int] = [0] * size
    for s, d in zip(src.tolist(), dst.tolist()):
        above[s] |= 1 << d
    # top-down linear extension: every up-move target precedes its source
    sequence = np.argsort(inversion_counts(n), kind="stable").tolist()

    def walk(idx: int, mask: int) -> Iterator[int]:
        if idx == size:
            yield mask
            return
        r = sequence[idx]
        yield from walk(idx + 1, mask)
        if above[r] & mask == above[r]:
            yield from walk(idx + 1, mask | (1 << r))

    yield from walk(0, 0)


def iter_up_sets(n: int, order: Order) -> Iterator[PermSet]:
    """Every up-set of ``order`` on ``S_n`` exactly once (including the empty set)."""
    for mask in _iter_up_masks(n, order):
        yield PermSet.from_mask(n, mask)


def enumerate_up_sets(n: int, order: Order, limit: int | None = None) -> tuple[list[PermSet], bool]:
    """Up to ``limit`` up-sets and a flag saying whether the stream was cut short."""
    out = []
    for s in iter_up_sets(n, order):
        if limit is not None and len(out) >= limit:
            return out, True
        out.append(s)
    return out, False


def _densities(count: int, density, size: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(density, (tuple, list)):
        lo, hi = (float(x) for x in density)
        lo = max(lo, 1.0 / size)
        if hi <= lo:
            return np.full(count, hi)
        return np.exp(rng.uniform(log(lo), log(hi), size=count))
    d = float(density)
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"seed density {d} not in [0, 1]")
    return np.full(count, d)


def random_up_sets(n: int, order: Order, count: int, density, rng: np.random.Generator) -> np.ndarray:
    """``count`` random up-sets as a ``(count, n!)`` boolean matrix.

    Each row is the up-closure of a Bernoulli seed set.  ``density`` is either
    a single seed probability or a ``(lo, hi)`` range from which a per-row
    probability is drawn log-uniformly, which mixes principal up-sets with
    nearly full ones.
    """
    size = factorial(n)
    p = _densities(count, density, size, rng)
    seeds = rng.random((count, size)) < p[:, None]
    return up_closure_many(seeds, n, order)


def random_up_set(n: int, order: Order, seed_density: float, rng: np.random.Generator) -> PermSet:
    if not 0.0 <= seed_density <= 1.0:
        raise ValueError(f"seed density {seed_density} not in [0, 1]")
    return PermSet(n, random_up_sets(n, order, 1, seed_density, rng)[0])
