"""
Probability measures on ``S_n``.

A :class:`Measure` is either *product form* (independent coordinate laws for
the Lehmer code, ``mu(a) = prod_k P(X_k = f(a)_k)``) or *dense* (one weight
per rank).  Exact measures keep integer weights over a common integer
denominator so that sums, products and comparisons are exact; float measures
keep float weights.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial, lcm
from numbers import Rational
from typing import Callable, Sequence

import numpy as np

from .perm import (
    MAX_N, TABLE_MAX_N, all_codes, all_perms, all_positions, check_perm,
    decode_many, encode_lehmer, rank,
)
from .permset import PermSet

__all__ = [
    "Measure", "to_number", "validate_coordinate",
    "uniform_measure", "ig_measure", "mallows_measure", "boltzmann_measure",
    "fixed_point_measure", "middle_gap_measure", "spatial_energies", "POTENTIALS",
    "LatticeReport", "check_lattice_condition", "measure_of_set", "sample",
]

FLOAT_TOL = 1e-12
# int64 is safe for sums of weights below this; products need its square root
_INT64_SAFE = 2 ** 62


def to_number(x):
    """``"p/q"`` strings, ints and Fractions become Fractions; floats stay floats."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"cannot interpret {x!r} as a number")


def _is_exact(x) -> bool:
    return isinstance(x, Fraction)


def validate_coordinate(k: int, probs: Sequence) -> tuple:
    """Check a law for ``X_k`` on ``[k]``; returns it as a tuple of numbers."""
    probs = tuple(to_number(p) for p in probs)
    if len(probs) != k:
        raise ValueError(f"X_{k} needs {k} probabilities, got {len(probs)}")
    if any(p < 0 for p in probs):
        raise ValueError(f"X_{k} has a negative probability")
    total = sum(probs)
    if all(_is_exact(p) for p in probs):
        if total != 1:
            raise ValueError(f"X_{k} probabilities sum to {total}, not 1")
    elif abs(float(total) - 1.0) > FLOAT_TOL:
        raise ValueError(f"X_{k} probabilities sum to {float(total)!r}, not 1")
    return probs


def _int_array(values: list[int], bound: int) -> np.ndarray:
    dtype = np.int64 if bound < _INT64_SAFE else object
    return np.array(values, dtype=dtype)


class Measure:
    """A probability measure on ``S_n``.

    Use the module-level constructors rather than instantiating directly.
    ``weights[r] / total`` is the mass of the permutation of rank ``r``.
    """

    def __init__(self, n: int, *, exact: bool, coords=None, weights=None, total=None,
                 label: str = "", spec: dict | None = None):
        if not 1 <= n <= MAX_N:
            raise ValueError(f"n={n} out of range 1..{MAX_N}")
        if (coords is None) == (weights is None):
            raise ValueError("give exactly one of coords / weights")
        if weights is not None and n > TABLE_MAX_N:
            raise ValueError(f"dense measures are capped at n={TABLE_MAX_N}")
        self.n = n
        self.exact = exact
        self.coords = coords
        self.label = label
        self.spec = spec if spec is not None else {"measure": label or "custom"}
        if weights is not None:
            self._weights = weights
            self._total = total

    @property
    def is_product(self) -> bool:
        return self.coords is not None

    # -- weights -------------------------------------------------------------

    @cached_property
    def _integer_coords(self) -> tuple[list[list[int]], list[int]]:
        nums, dens = [], []
        for probs in self.coords:
            d = lcm(*(p.denominator for p in probs))
            nums.append([int(p * d) for p in probs])
            dens.append(d)
        return nums, dens

    def _build_product_weights(self):
        if self.n > TABLE_MAX_N:
            raise ValueError(f"cannot tabulate weights beyond n={TABLE_MAX_N}")
        if self.exact:
            nums, dens = self._integer_coords
            total = 1
            for d in dens:
                total *= d
            w = np.array([1], dtype=np.int64 if total < _INT64_SAFE else object)
            for k in range(2, self.n + 1):
                # rank digit d_k = k - f_k, weight of d_k = nums[k-1][f_k - 1]
                col = _int_array(nums[k - 1][::-1], total)
                w = np.outer(col, w).reshape(-1)
            return w * nums[0][0], total
        w = np.array([1.0])
        for k in range(2, self.n + 1):
            col = np.array([float(p) for p in self.coords[k - 1]][::-1])
            w = np.outer(col, w).reshape(-1)
        w = w * float(self.coords[0][0])
        return w, float(w.sum())

    @property
    def weights(self) -> np.ndarray:
        if not hasattr(self, "_weights"):
            self._weights, self._total = self._build_product_weights()
        return self._weights

    @property
    def total(self):
        if not hasattr(self, "_total"):
            self.weights
        return self._total

    def density(self, a: Sequence[int]):
        """Mass of a single permutation (Fraction when exact)."""
        a = check_perm(a)
        if len(a) != self.n:
            raise ValueError(f"mismatched n: {len(a)} vs {self.n}")
        if self.is_product:
            out = Fraction(1) if self.exact else 1.0
            for k, fk in enumerate(encode_lehmer(a), start=1):
                out *= self.coords[k - 1][fk - 1]
            return out
        return self._mass(self.weights[rank(a)])

    def _mass(self, w):
        if self.exact:
            return Fraction(int(w), int(self.total))
        return float(w) / float(self.total)

    def masses(self) -> list:
        return [self._mass(w) for w in self.weights]

    def set_weights(self, bits: np.ndarray) -> np.ndarray:
        """Total weight of each row of a ``(K, n!)`` boolean matrix (not normalised)."""
        w = self.weights
        bits = np.asarray(bits, dtype=bool)
        if bits.ndim == 1:
            bits = bits[None, :]
        if w.dtype == object:
            return np.array([sum(w[row].tolist(), 0) for row in bits], dtype=object)
        return bits.astype(w.dtype) @ w

    def __repr__(self) -> str:
        kind = "product" if self.is_product else "dense"
        arith = "exact" if self.exact else "float"
        return f"Measure({self.label or 'custom'}, n={self.n}, {kind}, {arith})"


# -- constructors --------------------------------------------------------------

def ig_measure(dists: Sequence[Sequence], *, exact: bool | None = None,
               label: str = "ig", spec: dict | None = None) -> Measure:
    """Independently generated measure from one law per Lehmer coordinate."""
    n = len(dists)
    if n < 1:
        raise ValueError("need at least one coordinate distribution")
    coords = tuple(validate_coordinate(k, probs) for k, probs in enumerate(dists, start=1))
    all_exact = all(_is_exact(p) for c in coords for p in c)
    if exact is None:
        exact = all_exact
    if exact and not all_exact:
        raise ValueError("exact arithmetic requested for float probabilities")
    if not exact:
        coords = tuple(tuple(float(p) for p in c) for c in coords)
    if spec is None:
        spec = {"measure": "ig", "dists": [[str(p) for p in c] for c in coords]}
    return Measure(n, exact=exact, coords=coords, label=label, spec=spec)


def uniform_measure(n: int, *, exact: bool = True) -> Measure:
    one = Fraction(1) if exact else 1.0
    dists = [[one / k] * k for k in range(1, n + 1)]
    return ig_measure(dists, exact=exact, label="uniform", spec={"measure": "uniform"})


def mallows_measure(n: int, q, *, exact: bool | None = None) -> Measure:
    """Mallows measure ``mu(a) ~ q^|inv(a)|`` in product form.

    Since ``|inv(a)| = sum_k (k - f_k)``, setting
    ``P(X_k = v) = q^(k-v) / (1 + q + ... + q^(k-1))`` reproduces it.
    """
    q = to_number(q)
    if q <= 0:
        raise ValueError(f"Mallows parameter must be positive, got {q}")
    if q > 1:
        warnings.warn("Mallows parameter q > 1 favours permutations with many inversions",
                      stacklevel=2)
    dists = []
    for k in range(1, n + 1):
        raw = [q ** (k - v) for v in range(1, k + 1)]
        z = sum(raw)
        dists.append([x / z for x in raw])
    return ig_measure(dists, exact=exact, label="mallows",
                      spec={"measure": "mallows", "q": str(q)})


def _dense_from_energies(n: int, energies: np.ndarray, q, *, label: str, spec: dict,
                         exact: bool | None = None) -> Measure:
    """Dense measure with ``mu(a) ~ q^E(a)``."""
    q = to_number(q)
    if not 0 < q <= 1:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    integral = all(_is_exact(e) and e.denominator == 1 for e in energies.tolist()) \
        if energies.dtype == object else np.issubdtype(energies.dtype, np.integer)
    can_exact = _is_exact(q) and integral
    if exact is None:
        exact = can_exact
    if exact and not can_exact:
        raise ValueError("exact arithmetic needs rational q and integer energies")
    if exact:
        e = [int(x) for x in energies.tolist()]
        top = max(e)
        p, s = q.numerator, q.denominator
        w = [p ** x * s ** (top - x) for x in e]
        total = sum(w)
        return Measure(n, exact=True, weights=_int_array(w, total), total=total,
                       label=label, spec=spec)
    e = np.array([float(x) for x in energies.tolist()])
    w = float(q) ** (e - e.min())
    return Measure(n, exact=False, weights=w, total=float(w.sum()), label=label, spec=spec)


def _v_table(values: dict) -> Callable:
    table = {to_number(k): to_number(v) for k, v in values.items()}

    def v(u):
        try:
            return table[u]
        except KeyError:
            raise ValueError(f"potential table has no entry for {u}") from None

    return v


POTENTIALS: dict[str, Callable] = {
    "abs": lambda u: abs(u),
    "square": lambda u: u * u,
    "left_indicator": lambda u: 1 if u < 0 else 0,
    "zero_indicator": lambda u: 0 if u == 0 else 1,
}


def spatial_energies(points: Sequence, potential) -> np.ndarray:
    """``E(a) = sum_i V(x(i) - x(pos(a, i)))`` for every rank."""
    x = [to_number(p) for p in points]
    n = len(x)
    if any(x[i] > x[i + 1] for i in range(n - 1)):
        raise ValueError("points must be nondecreasing")
    if isinstance(potential, dict):
        v = _v_table(potential)
    elif potential in POTENTIALS:
        v = POTENTIALS[potential]
    else:
        raise ValueError(f"unknown potential {potential!r}")
    # V only ever sees the n*n differences x(i) - x(j)
    cost = [[v(x[i] - x[j]) for j in range(n)] for i in range(n)]
    flat = [c for row in cost for c in row]
    if all(_is_exact(c) or isinstance(c, int) for c in flat):
        cost_arr = np.array([[Fraction(c) for c in row] for row in cost], dtype=object)
    else:
        cost_arr = np.array([[float(c) for c in row] for row in cost])
    p = all_positions(n).astype(np.int64)
    rows = np.arange(n)[None, :]
    e = cost_arr[rows, p].sum(axis=1)
    if e.dtype == object and all(x.denominator == 1 for x in e.tolist()):
        e = np.array([int(x) for x in e.tolist()], dtype=np.int64)
    return e


def boltzmann_measure(points: Sequence, potential, q, *, exact: bool | None = None) -> Measure:
    """Spatial measure ``mu(a) ~ q^(sum_i V(x(i) - x(pos(a, i))))``.

    ``potential`` is one of ``abs``, ``square``, ``left_indicator``,
    ``zero_indicator`` or a dict lookup table from differences to values.
    """
    n = len(points)
    if not 1 <= n <= TABLE_MAX_N:
        raise ValueError(f"dense measures are capped at n={TABLE_MAX_N}")
    e = spatial_energies(points, potential)
    spec = {"measure": "boltzmann", "x": [str(to_number(p)) for p in points],
            "V": potential, "q": str(to_number(q))}
    return _dense_from_energies(n, e, q, label="boltzmann", spec=spec, exact=exact)


def fixed_point_measure(n: int, q, *, exact: bool | None = None) -> Measure:
    """``mu(a) ~ q^(n - #fixed points)``."""
    if not 1 <= n <= TABLE_MAX_N:
        raise ValueError(f"dense measures are capped at n={TABLE_MAX_N}")
    fixed = (all_perms(n) == np.arange(1, n + 1, dtype=np.int8)[None, :]).sum(axis=1)
    e = (n - fixed).astype(np.int64)
    return _dense_from_energies(n, e, q, label="fixed_points",
                                spec={"measure": "fixed_points", "q": str(to_number(q))},
                                exact=exact)


def middle_gap_measure(n: int, q, *, exact: bool | None = None) -> Measure:
    """``mu(a) ~ q^m(a)``, ``m(a)`` = elements above ``n/2`` in the first ``n/2`` slots."""
    if n % 2:
        raise ValueError("the middle-gap statistic needs even n")
    half = n // 2
    points = [0] * half + [1] * half
    m = boltzmann_measure(points, "left_indicator", q, exact=exact)
    m.label = "middle_gap"
    m.spec = {"measure": "middle_gap", "q": str(to_number(q))}
    return m


# -- evaluation ----------------------------------------------------------------

def measure_of_set(mu: Measure, s: PermSet):
    if s.n != mu.n:
        raise ValueError(f"mismatched n: measure {mu.n} vs set {s.n}")
    w = mu.weights[s.bits]
    return mu._mass(sum(w.tolist(), 0) if w.dtype == object else w.sum())


@dataclass
class LatticeReport:
    holds: bool
    worst_slack: object
    worst_pair: tuple | None
    pairs_checked: int
    method: str
    max_slack: object = None

    @property
    def equality(self) -> bool:
        """Every pair satisfies the condition with equality."""
        return self.worst_slack == 0 and self.max_slack == 0


def _rank_weights(n: int) -> tuple[int, np.ndarray]:
    # rank(f) = const - sum_k f_k (k-1)!
    fac = np.array([factorial(k - 1) for k in range(1, n + 1)], dtype=np.int64)
    const = int(sum(k * factorial(k - 1) for k in range(1, n + 1)))
    return const, fac


def check_lattice_condition(mu: Measure, max_dense_n: int = 7) -> LatticeReport:
    """Minimal ``mu(a v b) mu(a ^ b) - mu(a) mu(b)`` over all unordered pairs.

    Product-form measures beyond ``max_dense_n`` are reported symbolically:
    join/meet permute the coordinate values, so equality is an identity.
    """
    n = mu.n
    if n > max_dense_n:
        if mu.is_product:
            zero = Fraction(0) if mu.exact else 0.0
            return LatticeReport(True, zero, None, 0, "symbolic", zero)
        raise ValueError(f"all-pairs scan limited to n <= {max_dense_n}")
    codes = all_codes(n).astype(np.int64)
    const, fac = _rank_weights(n)
    w = mu.weights
    size = w.size
    exact = mu.exact
    use_object = exact and (w.dtype == object or int(mu.total) >= 2 ** 31)
    wv = w.astype(object) if use_object else w
    worst = most = None
    worst_pair = None
    for r in range(size):
        others = codes[r:]
        join = const - np.maximum(codes[r], others) @ fac
        meet = const - np.minimum(codes[r], others) @ fac
        slack = wv[join] * wv[meet] - wv[r] * wv[r:]
        i = int(np.argmin(slack))
        if worst is None or slack[i] < worst:
            worst = slack[i]
            worst_pair = (r, r + i)
        top = slack.max()
        if most is None or top > most:
            most = top
    pairs = size * (size + 1) // 2
    if exact:
        z2 = int(mu.total) ** 2
        worst_val, most_val = Fraction(int(worst), z2), Fraction(int(most), z2)
        holds = worst_val >= 0
    else:
        z2 = float(mu.total) ** 2
        worst_val, most_val = float(worst) / z2, float(most) / z2
        holds = worst_val >= -1e-9
    table = all_perms(n)
    pair = tuple(tuple(int(x) for x in table[r]) for r in worst_pair)
    return LatticeReport(bool(holds), worst_val, pair, pairs, "all-pairs", most_val)


def sample(mu: Measure, rng: np.random.Generator, size: int | None = None):
    """Draw permutations from ``mu``; one tuple, or an ``(size, n)`` array."""
    count = 1 if size is None else int(size)
    n = mu.n
    if mu.is_product:
        codes = np.empty((count, n), dtype=np.int8)
        for k in range(1, n + 1):
            p = np.array([float(x) for x in mu.coords[k - 1]])
            codes[:, k - 1] = rng.choice(k, size=count, p=p / p.sum()) + 1
        posn = decode_many(codes).astype(np.int64)
        perms = np.empty((count, n), dtype=np.int64)
        perms[np.arange(count)[:, None], posn] = np.arange(1, n + 1)[None, :]
    else:
        w = np.array([float(x) for x in mu.weights.tolist()]) if mu.weights.dtype == object \
            else mu.weights.astype(float)
        cdf = np.cumsum(w)
        idx = np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right")
        idx = np.minimum(idx, w.size - 1)
        perms = all_perms(n)[idx].astype(np.int64)
    if size is None:
        return tuple(int(x) for x in perms[0])
    return perms
