"""
Set families on ``P([n])``, left compression, and maximal chains.

A maximal chain ``{} = C_0 < C_1 < ... < C_n = [n]`` is identified with the
permutation ``a`` whose prefix sets are ``C_i = {a_1, ..., a_i}``.  Chain
counts ``c(A)`` and ``c(A, B)`` are plain integers; ``c(.)/n!`` is not a
probability measure on ``P([n])`` (it is not additive), so it is never
wrapped in :class:`~permcorr.measures.Measure`.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .perm import TABLE_MAX_N, all_perms, check_perm
from .permset import PermSet

__all__ = [
    "SetFamily", "is_left_compressed", "left_compress", "random_left_compressed",
    "chain_of_perm", "prefix_masks", "c", "c2", "chain_up_set", "chain_stat",
    "chain_stats", "TailReport", "joint_tail_check",
]

# c(.) iterates all n! chains
CHAIN_MAX_N = 10


def _mask(s: Iterable[int], n: int) -> int:
    m = 0
    for x in s:
        x = int(x)
        if not 1 <= x <= n:
            raise ValueError(f"element {x} out of range 1..{n}")
        m |= 1 << (x - 1)
    return m


class SetFamily:
    """An immutable family of subsets of ``[n]``; bit ``mask`` marks the subset
    ``{i : bit i-1 of mask is set}``."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits):
        if not 0 <= n <= 20:
            raise ValueError(f"n={n} out of range")
        arr = np.array(bits, dtype=bool).reshape(-1)
        if arr.size != 1 << n:
            raise ValueError(f"expected {1 << n} bits for n={n}, got {arr.size}")
        arr.flags.writeable = False
        self.n = n
        self.bits = arr

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        bits = np.zeros(1 << n, dtype=bool)
        for s in sets:
            bits[_mask(s, n)] = True
        return cls(n, bits)

    @classmethod
    def empty(cls, n: int) -> "SetFamily":
        return cls(n, np.zeros(1 << n, dtype=bool))

    @classmethod
    def power_set(cls, n: int) -> "SetFamily":
        return cls(n, np.ones(1 << n, dtype=bool))

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __contains__(self, s) -> bool:
        return bool(self.bits[_mask(s, self.n)])

    def sets(self) -> list[frozenset[int]]:
        return [frozenset(i + 1 for i in range(self.n) if m >> i & 1)
                for m in np.flatnonzero(self.bits).tolist()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self) -> str:
        if len(self) <= 8:
            body = ", ".join("{" + ",".join(map(str, sorted(s))) + "}" for s in self.sets())
            return f"SetFamily(n={self.n}, [{body}])"
        return f"SetFamily(n={self.n}, size={len(self)})"

    def to_json(self) -> dict:
        return {"n": self.n, "sets": [sorted(s) for s in self.sets()]}

    def to_hex(self) -> str:
        return np.packbits(self.bits, bitorder="little").tobytes().hex()

    @classmethod
    def from_json(cls, obj) -> "SetFamily":
        if isinstance(obj, str):
            obj = json.loads(obj)
        n = int(obj["n"])
        if "hex" in obj:
            raw = np.frombuffer(bytes.fromhex(obj["hex"]), dtype=np.uint8)
            bits = np.unpackbits(raw, bitorder="little")
            if bits.size < 1 << n or np.any(bits[1 << n:]):
                raise ValueError("hex bitmask does not match 2^n")
            return cls(n, bits[: 1 << n])
        return cls.from_sets(n, obj["sets"])


def is_left_compressed(fam: SetFamily) -> bool:
    """For every member ``A`` and ``i < j`` with ``i`` absent, ``j`` present,
    ``A - {j} + {i}`` is also a member."""
    n = fam.n
    masks = np.flatnonzero(fam.bits)
    for i in range(n):
        for j in range(i + 1, n):
            sel = masks[((masks >> j) & 1 == 1) & ((masks >> i) & 1 == 0)]
            if sel.size and not fam.bits[sel ^ ((1 << i) | (1 << j))].all():
                return False
    return True


def left_compress(fam: SetFamily) -> SetFamily:
    """Apply the ``C_ij`` shifts (``i < j``, lexicographic) until nothing moves.

    Each shift replaces ``A`` by ``A - {j} + {i}`` when that set is absent.
    Sizes of the family and of every member are preserved.
    """
    n = fam.n
    bits = fam.bits.copy()
    idx = np.arange(1 << n)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                movable = bits & ((idx >> j) & 1 == 1) & ((idx >> i) & 1 == 0)
                src = np.flatnonzero(movable)
                dst = src ^ ((1 << i) | (1 << j))
                go = ~bits[dst]
                if go.any():
                    bits[src[go]] = False
                    bits[dst[go]] = True
                    changed = True
    return SetFamily(n, bits)


def random_left_compressed(n: int, density: float, rng: np.random.Generator) -> SetFamily:
    """Bernoulli(``density``) family pushed to its left-compressed fixpoint."""
    return left_compress(SetFamily(n, rng.random(1 << n) < density))


def chain_of_perm(a: Sequence[int]) -> list[frozenset[int]]:
    a = check_perm(a)
    return [frozenset(a[:i]) for i in range(len(a) + 1)]


@lru_cache(maxsize=None)
def prefix_masks(n: int) -> np.ndarray:
    """``M[r, i]`` is the bitmask of the first ``i`` entries of ``unrank(r)``."""
    if not 1 <= n <= min(CHAIN_MAX_N, TABLE_MAX_N):
        raise ValueError(f"chain enumeration limited to n <= {CHAIN_MAX_N}")
    perms = all_perms(n).astype(np.int64)
    out = np.zeros((perms.shape[0], n + 1), dtype=np.int64)
    out[:, 1:] = np.cumsum(np.left_shift(1, perms - 1), axis=1)
    out.flags.writeable = False
    return out


def _meets(fam: SetFamily) -> np.ndarray:
    return fam.bits[prefix_masks(fam.n)].any(axis=1)


def chain_up_set(fam: SetFamily) -> PermSet:
    """Permutations whose chain meets ``fam``."""
    return PermSet(fam.n, _meets(fam))


def c(fam: SetFamily) -> int:
    """Number of maximal chains meeting ``fam``."""
    return int(_meets(fam).sum())


def c2(fa: SetFamily, fb: SetFamily) -> int:
    """Number of maximal chains meeting both families."""
    if fa.n != fb.n:
        raise ValueError(f"mismatched n: {fa.n} vs {fb.n}")
    return int((_meets(fa) & _meets(fb)).sum())


def chain_stat(fam: SetFamily, a: Sequence[int]) -> int:
    """``|chain(a) & fam|``, counting both ``{}`` and ``[n]``."""
    a = check_perm(a)
    if len(a) != fam.n:
        raise ValueError(f"mismatched n: {len(a)} vs {fam.n}")
    m = 0
    count = int(fam.bits[0])
    for x in a:
        m |= 1 << (x - 1)
        count += int(fam.bits[m])
    return count


def chain_stats(fam: SetFamily) -> np.ndarray:
    """:func:`chain_stat` for every rank."""
    return fam.bits[prefix_masks(fam.n)].sum(axis=1)


@dataclass
class TailReport:
    k: int
    l: int
    p_joint: Fraction
    p_a: Fraction
    p_b: Fraction

    @property
    def slack(self) -> Fraction:
        return self.p_joint - self.p_a * self.p_b

    @property
    def holds(self) -> bool:
        return self.slack >= 0


def joint_tail_check(fa: SetFamily, fb: SetFamily, k: int, l: int) -> TailReport:
    """``P(N_A >= k, N_B >= l)`` against ``P(N_A >= k) P(N_B >= l)`` for a
    uniform random maximal chain, exactly."""
    if fa.n != fb.n:
        raise ValueError(f"mismatched n: {fa.n} vs {fb.n}")
    if not (is_left_compressed(fa) and is_left_compressed(fb)):
        warnings.warn("joint_tail_check inputs are not both left-compressed", stacklevel=2)
    total = factorial(fa.n)
    ea = chain_stats(fa) >= k
    eb = chain_stats(fb) >= l
    return TailReport(
        k, l,
        Fraction(int((ea & eb).sum()), total),
        Fraction(int(ea.sum()), total),
        Fraction(int(eb.sum()), total),
    )
