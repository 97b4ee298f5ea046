"""
Named families of permutations, built as :class:`PermSet` bitsets over the
whole of ``S_n``.

Orientation note for layers: the identity is the top of the strong order, so
the strong up-set made of layers is ``{a : |inv(a)| <= k}``, the
permutations that are a product of at most ``k`` adjacent transpositions.
In the ``"at least j inversions"`` phrasing used with the opposite
orientation this is ``k = binom(n, 2) - j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import ceil, comb, floor
from typing import Iterable, Sequence

import numpy as np

from .measures import to_number
from .orders import inversion_counts
from .perm import all_codes, all_perms, all_positions, check_perm, positions
from .permset import PermSet

__all__ = [
    "u_ij", "layer", "layers_le", "t_band", "displacement_table",
    "band_like", "band_like_preset", "validate_band_like",
    "seq_dominating", "seq_dominating_prime", "prefix_count_family",
    "g_stat", "h_stat", "thm2_m", "thm2_pair", "thm2_A", "thm2_B",
    "thm2_prime_weights", "e_families", "Thm2Params",
]


def u_ij(n: int, i: int, j: int) -> PermSet:
    """Permutations in which ``i`` occurs before ``j``."""
    if i == j:
        raise ValueError("u_ij needs i != j")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"i, j must lie in 1..{n}")
    p = all_positions(n)
    return PermSet(n, p[:, i - 1] < p[:, j - 1])


def layer(n: int, k: int) -> PermSet:
    """``L_k``: permutations with exactly ``k`` inversions."""
    return PermSet(n, inversion_counts(n) == k)


def layers_le(n: int, k: int) -> PermSet:
    """Permutations with at most ``k`` inversions (a strong up-set)."""
    if not 0 <= k <= comb(n, 2):
        raise ValueError(f"k={k} out of range 0..{comb(n, 2)}")
    return PermSet(n, inversion_counts(n) <= k)


def displacement_table(n: int) -> np.ndarray:
    """``d[r, i-1] = |i - pos(a_r, i)|``."""
    return np.abs(all_positions(n).astype(np.int64) - np.arange(n)[None, :])


def t_band(n: int, t: int) -> PermSet:
    if not 0 <= t <= n - 1:
        raise ValueError(f"t={t} out of range 0..{n - 1}")
    return PermSet(n, displacement_table(n).max(axis=1) <= t)


_PRESETS = {
    "max": lambda d: d.max(axis=1),
    "sum": lambda d: d.sum(axis=1),
    "sumsq": lambda d: (d * d).sum(axis=1),
}


def band_like_preset(n: int, preset: str, t) -> PermSet:
    """Displacement-list families evaluated without materialising ``D``.

    ``preset`` is ``"max"`` (the t-band family), ``"sum"`` or ``"sumsq"``.
    """
    if preset not in _PRESETS:
        raise ValueError(f"unknown preset {preset!r}; pick from {sorted(_PRESETS)}")
    stat = _PRESETS[preset](displacement_table(n))
    return PermSet(n, stat <= t)


def _check_vectors(n: int, vectors: Iterable[Sequence[int]]) -> set[tuple[int, ...]]:
    out = set()
    for v in vectors:
        v = tuple(int(x) for x in v)
        if len(v) != n or any(not 0 <= x <= n - 1 for x in v):
            raise ValueError(f"malformed displacement vector {v} for n={n}")
        out.add(v)
    return out


def band_like(n: int, vectors: Iterable[Sequence[int]]) -> PermSet:
    """``A(D)``: permutations whose displacement list lies in ``D``."""
    allowed = _check_vectors(n, vectors)
    d = displacement_table(n)
    return PermSet(n, [tuple(row) in allowed for row in d.tolist()])


def validate_band_like(n: int, vectors: Iterable[Sequence[int]]) -> bool:
    """Whether ``D`` is closed under reordering, decreasing an entry, and
    replacing two entries by values with no larger sum and no larger gap."""
    allowed = _check_vectors(n, vectors)
    for v in allowed:
        if any(p not in allowed for p in set(permutations(v))):
            return False
        for idx, x in enumerate(v):
            if x > 0 and v[:idx] + (x - 1,) + v[idx + 1:] not in allowed:
                return False
        for i in range(n):
            for j in range(i + 1, n):
                s, gap = v[i] + v[j], abs(v[i] - v[j])
                for x, y in product(range(n), repeat=2):
                    if x + y <= s and abs(x - y) <= gap:
                        w = list(v)
                        w[i], w[j] = x, y
                        if tuple(w) not in allowed:
                            return False
    return True


def _exact_vector(values: Sequence, n: int, name: str) -> list:
    if len(values) != n:
        raise ValueError(f"{name} must have length {n}")
    out = []
    for x in values:
        if isinstance(x, str) and x.strip().lower() in ("-inf", "inf", "+inf"):
            out.append(float(x))
        else:
            out.append(to_number(x))
    return out


def _prefix_sums(n: int, w: list) -> np.ndarray:
    perms = all_perms(n).astype(np.int64)
    wa = np.array(w, dtype=object)[perms - 1]
    return np.cumsum(wa, axis=1)


def seq_dominating(n: int, w: Sequence, t: Sequence) -> PermSet:
    """``D(w, t)``: every prefix sum ``sum_{i<=m} w[a_i]`` reaches ``t_m``.

    ``w`` must be nonincreasing; that is what makes the family a strong up-set.
    """
    w = _exact_vector(w, n, "w")
    t = _exact_vector(t, n, "t")
    if any(w[i] < w[i + 1] for i in range(n - 1)):
        raise ValueError("weights must be nonincreasing")
    ps = _prefix_sums(n, w)
    ok = ps >= np.array(t, dtype=object)[None, :]
    return PermSet(n, ok.all(axis=1).astype(bool))


def seq_dominating_prime(n: int, w: Sequence, t: Sequence) -> PermSet:
    """``D'(w, t)``: the prefix sum through slot ``m`` reaches ``t[a_m]``.

    Not an up-set in general; no monotonicity is required of ``w``.
    """
    w = _exact_vector(w, n, "w")
    t = _exact_vector(t, n, "t")
    ps = _prefix_sums(n, w)
    thresholds = np.array(t, dtype=object)[all_perms(n).astype(np.int64) - 1]
    return PermSet(n, (ps >= thresholds).all(axis=1).astype(bool))


def prefix_count_family(n: int, u: int, v: int, w: int) -> PermSet:
    """At least ``u`` of ``{1..v}`` among the first ``w`` positions, as ``D(w, t)``."""
    weights = [1] * v + [0] * (n - v)
    thresholds = [0] * n
    thresholds[w - 1] = u
    return seq_dominating(n, weights, thresholds)


# -- the anti-correlated weak up-sets ------------------------------------------

def g_stat(a: Sequence[int], m: int) -> int:
    """Number of ``i in [m]`` placed no later than ``m``; equals Lehmer ``f_m``."""
    a = check_perm(a)
    if not 1 <= m <= len(a):
        raise ValueError(f"m={m} out of range 1..{len(a)}")
    p = positions(a)
    return sum(1 for i in range(1, m + 1) if p[i] <= p[m])


def h_stat(a: Sequence[int], m: int) -> int:
    """Number of ``i in [m, n]`` placed no earlier than ``m``."""
    a = check_perm(a)
    n = len(a)
    if not 1 <= m <= n:
        raise ValueError(f"m={m} out of range 1..{n}")
    p = positions(a)
    return sum(1 for i in range(m, n + 1) if p[i] >= p[m])


def _unit_interval(x, name: str) -> Fraction:
    x = to_number(x)
    x = Fraction(x) if isinstance(x, float) else x
    if not 0 < x < 1:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {x}")
    return x


@dataclass(frozen=True)
class Thm2Params:
    n: int
    alpha: Fraction
    beta: Fraction
    m: int

    @property
    def threshold_a(self) -> Fraction:
        return (1 - self.alpha) * self.m

    @property
    def threshold_b(self) -> Fraction:
        return (1 - self.beta) * (self.n - self.m + 1)


def thm2_m(n: int, alpha, beta) -> Thm2Params:
    """``m = ceil(alpha / (alpha + beta) * n)``, computed exactly."""
    alpha = _unit_interval(alpha, "alpha")
    beta = _unit_interval(beta, "beta")
    return Thm2Params(n, alpha, beta, ceil(alpha / (alpha + beta) * n))


def _g_all(n: int, m: int) -> np.ndarray:
    return all_codes(n)[:, m - 1].astype(np.int64)


def _h_all(n: int, m: int) -> np.ndarray:
    p = all_positions(n)
    return (p[:, m - 1:] >= p[:, m - 1:m]).sum(axis=1)


def thm2_pair(n: int, alpha, beta) -> tuple[PermSet, PermSet]:
    """The weak up-sets ``A = {g >= (1-alpha) m}`` and ``B = {h >= (1-beta)(n-m+1)}``.

    Thresholds are compared exactly; ``g, h`` are integers so ``x >= c``
    is ``x >= ceil(c)``.
    """
    prm = thm2_m(n, alpha, beta)
    a = _g_all(n, prm.m) >= ceil(prm.threshold_a)
    b = _h_all(n, prm.m) >= ceil(prm.threshold_b)
    return PermSet(n, a), PermSet(n, b)


def thm2_A(n: int, alpha, beta) -> PermSet:
    return thm2_pair(n, alpha, beta)[0]


def thm2_B(n: int, alpha, beta) -> PermSet:
    return thm2_pair(n, alpha, beta)[1]


def thm2_prime_weights(n: int, alpha=Fraction(1, 2), beta=Fraction(1, 2), *, literal: bool = False):
    """Weight/threshold vectors for which ``D'`` reproduces ``(A, B)``.

    Returns ``((u, s), (v, t))``.  ``u`` is the indicator of ``[m]`` with
    ``s_m = (1-alpha) m``; ``v`` is ``-1`` on ``[m+1, n]`` with
    ``t_m = -beta (n-m+1)``.  All other thresholds are set below any
    attainable prefix sum.  With ``literal=True`` the second threshold is
    ``-m/2`` instead, which agrees with ``B`` at ``alpha = beta = 1/2`` only
    for odd ``n``.
    """
    prm = thm2_m(n, alpha, beta)
    m = prm.m
    u = [1] * m + [0] * (n - m)
    s = [Fraction(0)] * n
    s[m - 1] = prm.threshold_a
    v = [0] * m + [-1] * (n - m)
    t = [Fraction(-n)] * n
    t[m - 1] = Fraction(-m, 2) if literal else -prm.beta * (n - m + 1)
    return (u, s), (v, t)


def e_families(n: int, alpha, beta, eps) -> tuple[PermSet, PermSet]:
    """The exceptional families ``E_1, E_2`` from the weak-order construction.

    ``E_1``: at least ``(1-alpha) m`` of ``[m]`` in positions ``1..floor((1-alpha-eps) n)``.
    ``E_2``: at least ``(1-beta)(n-m+1)`` of ``[m, n]`` in positions
    ``ceil((beta+eps) n)..n``.  Empty position windows give empty families.
    """
    prm = thm2_m(n, alpha, beta)
    eps = to_number(eps)
    eps = Fraction(eps) if isinstance(eps, float) else eps
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    m = prm.m
    perms = all_perms(n)
    hi1 = max(floor((1 - prm.alpha - eps) * n), 0)
    lo2 = max(ceil((prm.beta + eps) * n), 1)
    n1 = (perms[:, :hi1] <= m).sum(axis=1)
    n2 = (perms[:, lo2 - 1:] >= m).sum(axis=1) if lo2 <= n else np.zeros(len(perms), dtype=np.int64)
    e1 = n1 >= ceil((1 - prm.alpha) * m)
    e2 = n2 >= ceil((1 - prm.beta) * (n - m + 1))
    return PermSet(n, e1), PermSet(n, e2)
