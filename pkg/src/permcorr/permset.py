"""Families of permutations as bitsets over factoradic ranks."""

from __future__ import annotations

import json
from math import factorial
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .perm import TABLE_MAX_N, all_perms, check_perm, format_perm, parse_perm, rank

__all__ = ["PermSet"]


class PermSet:
    """An immutable subset of ``S_n``; bit ``r`` is the permutation of rank ``r``.

    >>> s = PermSet.from_perms(3, [(1, 2, 3), (3, 1, 2)])
    >>> len(s), (3, 1, 2) in s
    (2, True)
    """

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits):
        if not 1 <= n <= TABLE_MAX_N:
            raise ValueError(f"PermSet supports 1 <= n <= {TABLE_MAX_N}, got {n}")
        arr = np.array(bits, dtype=bool).reshape(-1)
        if arr.size != factorial(n):
            raise ValueError(f"expected {factorial(n)} bits for n={n}, got {arr.size}")
        arr.flags.writeable = False
        self.n = n
        self.bits = arr

    @classmethod
    def empty(cls, n: int) -> "PermSet":
        return cls(n, np.zeros(factorial(n), dtype=bool))

    @classmethod
    def full(cls, n: int) -> "PermSet":
        return cls(n, np.ones(factorial(n), dtype=bool))

    @classmethod
    def from_perms(cls, n: int, perms: Iterable[Sequence[int]]) -> "PermSet":
        bits = np.zeros(factorial(n), dtype=bool)
        for a in perms:
            a = check_perm(a)
            if len(a) != n:
                raise ValueError(f"{a} is not in S_{n}")
            bits[rank(a)] = True
        return cls(n, bits)

    @classmethod
    def from_ranks(cls, n: int, ranks: Iterable[int]) -> "PermSet":
        bits = np.zeros(factorial(n), dtype=bool)
        bits[np.fromiter(ranks, dtype=np.int64)] = True
        return cls(n, bits)

    @classmethod
    def from_predicate(cls, n: int, pred: Callable[[tuple], bool]) -> "PermSet":
        return cls(n, [bool(pred(tuple(int(x) for x in row))) for row in all_perms(n)])

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "PermSet":
        """From a Python int whose bit ``r`` marks rank ``r``."""
        size = factorial(n)
        raw = np.frombuffer(mask.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
        return cls(n, np.unpackbits(raw, bitorder="little")[:size])

    def to_mask(self) -> int:
        return int.from_bytes(np.packbits(self.bits, bitorder="little").tobytes(), "little")

    # -- container protocol --------------------------------------------------

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def size(self) -> int:
        return len(self)

    def __contains__(self, a) -> bool:
        if len(a) != self.n:
            return False
        return bool(self.bits[rank(a)])

    def ranks(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def __iter__(self) -> Iterator[tuple]:
        table = all_perms(self.n)
        for r in self.ranks():
            yield tuple(int(x) for x in table[r])

    def _other(self, other: "PermSet") -> np.ndarray:
        if not isinstance(other, PermSet):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"mismatched n: {self.n} vs {other.n}")
        return other.bits

    def __and__(self, other):
        return PermSet(self.n, self.bits & self._other(other))

    def __or__(self, other):
        return PermSet(self.n, self.bits | self._other(other))

    def __sub__(self, other):
        return PermSet(self.n, self.bits & ~self._other(other))

    def __invert__(self):
        return PermSet(self.n, ~self.bits)

    def __le__(self, other) -> bool:
        return not np.any(self.bits & ~self._other(other))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self) -> str:
        if len(self) <= 8:
            body = ", ".join(format_perm(a) for a in self)
            return f"PermSet(n={self.n}, {{{body}}})"
        return f"PermSet(n={self.n}, size={len(self)})"

    # -- serialisation -------------------------------------------------------

    def to_hex(self) -> str:
        return np.packbits(self.bits, bitorder="little").tobytes().hex()

    @classmethod
    def from_hex(cls, n: int, text: str) -> "PermSet":
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        size = factorial(n)
        if bits.size < size or np.any(bits[size:]):
            raise ValueError("hex bitset does not match n!")
        return cls(n, bits[:size])

    def to_json(self, explicit_limit: int = 32) -> dict:
        """Explicit permutation list for small sets, hex bitset otherwise."""
        if len(self) <= explicit_limit:
            return {"n": self.n, "perms": [format_perm(a) for a in self]}
        return {"n": self.n, "hex": self.to_hex()}

    @classmethod
    def from_json(cls, obj) -> "PermSet":
        if isinstance(obj, str):
            obj = json.loads(obj)
        n = int(obj["n"])
        if "hex" in obj:
            return cls.from_hex(n, obj["hex"])
        perms = [parse_perm(p) if isinstance(p, str) else p for p in obj["perms"]]
        return cls.from_perms(n, perms)
