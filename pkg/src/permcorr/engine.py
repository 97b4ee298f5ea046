"""
Correlation computations and experiment drivers.

Everything that decides an inequality runs in the measure's arithmetic: with
an exact measure the comparison ``mu(A & B) >= mu(A) mu(B)`` is done on
integers (``W(A&B) * Z >= W(A) * W(B)`` for integer weights over the common
denominator ``Z``), so there is no tolerance anywhere.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np

from .families import layers_le, prefix_count_family, t_band, thm2_m
from .measures import (
    Measure, boltzmann_measure, fixed_point_measure, measure_of_set,
    middle_gap_measure, to_number, uniform_measure,
)
from .orders import STRONG, Order, T, enumerate_up_sets, random_up_sets
from .perm import TABLE_MAX_N, all_codes, all_positions, decode_many
from .permset import PermSet

__all__ = [
    "CorrelationReport", "ScanReport", "correlate", "slack_numerators",
    "scan_up_set_pairs", "scan_pairs", "monte_carlo_correlate", "wilson_interval",
    "thm2_sweep", "SequenceCheck", "check_sequence_inequality",
    "structured_strong_families", "open_question_measure", "open_question_experiment",
    "t_up_set_experiment",
]

EXHAUSTIVE_MAX_N = 4


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x)
    return x


@dataclass
class CorrelationReport:
    n: int
    measure: dict
    families: list
    p_ab: object
    p_a: object
    p_b: object
    mode: str = "exact"
    samples: int | None = None
    intervals: dict | None = None

    def __post_init__(self):
        if self.mode == "exact":
            # Frechet bounds; a violation means an arithmetic bug, not a theorem failure
            if not (0 <= self.p_ab <= min(self.p_a, self.p_b)):
                raise AssertionError(f"p_ab={self.p_ab} outside [0, min(p_a, p_b)]")
            if self.p_ab < self.p_a + self.p_b - 1:
                raise AssertionError(f"p_ab={self.p_ab} below p_a + p_b - 1")

    @property
    def product(self):
        return self.p_a * self.p_b

    @property
    def slack(self):
        return self.p_ab - self.p_a * self.p_b

    @property
    def ratio(self):
        """``p_ab / (p_a p_b)``, or None when the denominator vanishes."""
        den = self.p_a * self.p_b
        if den == 0:
            return None
        return self.p_ab / den

    def to_dict(self) -> dict:
        out = {
            "n": self.n, "measure": self.measure, "families": self.families,
            "p_ab": _fmt(self.p_ab), "p_a": _fmt(self.p_a), "p_b": _fmt(self.p_b),
            "product": _fmt(self.product), "slack": _fmt(self.slack),
            "ratio": _fmt(self.ratio), "ratio_undefined": self.ratio is None,
            "mode": self.mode,
        }
        if self.mode == "monte_carlo":
            out["samples"] = self.samples
            out["intervals"] = self.intervals
        return out


def correlate(mu: Measure, fa: PermSet, fb: PermSet, *, specs: Sequence | None = None) -> CorrelationReport:
    if not (fa.n == fb.n == mu.n):
        raise ValueError(f"mismatched n: measure {mu.n}, families {fa.n}, {fb.n}")
    fams = list(specs) if specs is not None else [fa.to_json(), fb.to_json()]
    return CorrelationReport(
        mu.n, mu.spec, fams,
        p_ab=measure_of_set(mu, fa & fb),
        p_a=measure_of_set(mu, fa),
        p_b=measure_of_set(mu, fb),
    )


def slack_numerators(mu: Measure, a_bits: np.ndarray, b_bits: np.ndarray) -> np.ndarray:
    """Row-wise ``W(A&B) Z - W(A) W(B)``; divide by ``Z^2`` for the slack."""
    wa = mu.set_weights(a_bits)
    wb = mu.set_weights(b_bits)
    wab = mu.set_weights(np.asarray(a_bits) & np.asarray(b_bits))
    z = mu.total
    if mu.exact and (wa.dtype == object or int(z) >= 2 ** 31):
        wa, wb, wab = (np.asarray(x, dtype=object) for x in (wa, wb, wab))
        z = int(z)
    return wab * z - wa * wb


def _slack_value(mu: Measure, numerator):
    if mu.exact:
        return Fraction(int(numerator), int(mu.total) ** 2)
    return float(numerator) / float(mu.total) ** 2


@dataclass
class ScanReport:
    order: str
    measure: dict
    n: int
    pairs_tested: int
    min_slack: object
    argmin: tuple[PermSet, PermSet] | None
    truncated: bool = False
    negative_pairs: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "order": self.order, "measure": self.measure, "n": self.n,
            "pairs_tested": self.pairs_tested, "min_slack": _fmt(self.min_slack),
            "negative_pairs": self.negative_pairs, "truncated": self.truncated,
            "argmin": None if self.argmin is None else [s.to_json() for s in self.argmin],
        }
        out.update(self.extra)
        return out


def _scan_rows(args):
    mu, u_bits, start, stop = args
    best = None
    best_pair = None
    negative = 0
    for i in range(start, stop):
        num = slack_numerators(mu, np.broadcast_to(u_bits[i], u_bits[i:].shape), u_bits[i:])
        negative += int((num < 0).sum())
        j = int(np.argmin(num))
        if best is None or num[j] < best:
            best, best_pair = num[j], (i, i + j)
    return best, best_pair, negative


def scan_pairs(mu: Measure, sets: np.ndarray, *, workers: int = 1) -> tuple[object, tuple | None, int, int]:
    """All unordered pairs (with repetition) of the rows of ``sets``.

    Returns ``(min_slack_numerator, (i, j), negative_count, pairs)``.  With
    ``workers > 1`` the outer index is partitioned across processes and the
    partial minima are merged.
    """
    m = sets.shape[0]
    if m == 0:
        return None, None, 0, 0
    if workers <= 1:
        parts = [_scan_rows((mu, sets, 0, m))]
    else:
        bounds = np.linspace(0, m, workers + 1).astype(int)
        jobs = [(mu, sets, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_rows, jobs))
    best, pair, negative = None, None, 0
    for b, p, neg in parts:
        negative += neg
        if b is not None and (best is None or b < best):
            best, pair = b, p
    return best, pair, negative, m * (m + 1) // 2


def scan_up_set_pairs(n: int, order: Order, mu: Measure, mode: str = "exhaustive", *,
                      limit: int | None = None, pairs: int = 1000, density=0.3,
                      rng: np.random.Generator | None = None, workers: int = 1,
                      chunk: int = 2000) -> ScanReport:
    """Minimum slack over pairs of up-sets of ``order``.

    ``mode="exhaustive"`` takes every unordered pair of up-sets (``n <= 4``,
    optionally capped at ``limit`` up-sets).  ``mode="random"`` draws
    ``pairs`` independent pairs with :func:`random_up_sets`; ``density`` is a
    seed probability or a ``(lo, hi)`` log-uniform range.
    """
    if mu.n != n:
        raise ValueError(f"measure is on S_{mu.n}, scan asked for S_{n}")
    if mode == "exhaustive":
        if n > EXHAUSTIVE_MAX_N:
            raise ValueError(f"exhaustive scans are limited to n <= {EXHAUSTIVE_MAX_N}")
        ups, truncated = enumerate_up_sets(n, order, limit)
        sets = np.array([s.bits for s in ups], dtype=bool).reshape(len(ups), factorial(n))
        best, pair, negative, count = scan_pairs(mu, sets, workers=workers)
        argmin = None if pair is None else (ups[pair[0]], ups[pair[1]])
        return ScanReport(str(order), mu.spec, n, count,
                          None if best is None else _slack_value(mu, best),
                          argmin, truncated, negative, {"up_sets": len(ups)})
    if mode != "random":
        raise ValueError(f"unknown scan mode {mode!r}")
    if rng is None:
        raise ValueError("random scans need an explicit rng")
    best, best_pair, negative, done = None, None, 0, 0
    while done < pairs:
        k = min(chunk, pairs - done)
        a = random_up_sets(n, order, k, density, rng)
        b = random_up_sets(n, order, k, density, rng)
        num = slack_numerators(mu, a, b)
        negative += int((num < 0).sum())
        i = int(np.argmin(num))
        if best is None or num[i] < best:
            best = num[i]
            best_pair = (PermSet(n, a[i]), PermSet(n, b[i]))
        done += k
    return ScanReport(str(order), mu.spec, n, done,
                      None if best is None else _slack_value(mu, best),
                      best_pair, False, negative)


# -- Monte Carlo ---------------------------------------------------------------

def wilson_interval(hits: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    from statsmodels.stats.proportion import proportion_confint
    lo, hi = proportion_confint(hits, trials, alpha=alpha, method="wilson")
    return float(lo), float(hi)


def _as_predicate(p) -> Callable:
    if isinstance(p, PermSet):
        return p.__contains__
    return p


def monte_carlo_correlate(mu: Measure, pred_a, pred_b, samples: int,
                          rng: np.random.Generator) -> CorrelationReport:
    """Estimate ``p_a, p_b, p_ab`` from ``samples`` draws, with Wilson 95% intervals."""
    from .measures import sample

    if samples <= 0:
        raise ValueError("samples must be positive")
    pa, pb = _as_predicate(pred_a), _as_predicate(pred_b)
    draws = sample(mu, rng, samples)
    ha = hb = hab = 0
    for row in draws.tolist():
        a = tuple(row)
        xa, xb = bool(pa(a)), bool(pb(a))
        ha += xa
        hb += xb
        hab += xa and xb
    intervals = {
        "p_a": wilson_interval(ha, samples),
        "p_b": wilson_interval(hb, samples),
        "p_ab": wilson_interval(hab, samples),
    }
    return CorrelationReport(mu.n, mu.spec, ["predicate", "predicate"],
                             p_ab=hab / samples, p_a=ha / samples, p_b=hb / samples,
                             mode="monte_carlo", samples=samples, intervals=intervals)


# -- Theorem-2 construction sweep ----------------------------------------------

def _thm2_counts_exact(n: int, m: int, ta: int, tb: int) -> tuple[int, int, int]:
    g = all_codes(n)[:, m - 1]
    p = all_positions(n)
    h = (p[:, m - 1:] >= p[:, m - 1:m]).sum(axis=1)
    a = g >= ta
    b = h >= tb
    return int(a.sum()), int(b.sum()), int((a & b).sum())


def thm2_sweep(alpha, beta, n_list: Sequence[int], *, rng: np.random.Generator | None = None,
               samples: int = 200_000) -> list[dict]:
    """Densities of ``A``, ``B``, ``A & B`` and the trivial lower bound per ``n``.

    Exhaustive (exact Fractions) for ``n <= 10``; beyond that a Monte Carlo
    estimate under the uniform measure, which requires ``rng``.
    """
    rows = []
    for n in n_list:
        prm = thm2_m(n, alpha, beta)
        ta, tb = math.ceil(prm.threshold_a), math.ceil(prm.threshold_b)
        if n <= TABLE_MAX_N:
            ca, cb, cab = _thm2_counts_exact(n, prm.m, ta, tb)
            total = factorial(n)
            da, db, dab = Fraction(ca, total), Fraction(cb, total), Fraction(cab, total)
            mode = "exact"
        else:
            if rng is None:
                raise ValueError(f"n={n} needs Monte Carlo; pass an rng")
            codes = np.stack([rng.integers(1, k + 1, size=samples) for k in range(1, n + 1)], axis=1)
            p = decode_many(codes.astype(np.int8))
            g = codes[:, prm.m - 1]
            h = (p[:, prm.m - 1:] >= p[:, prm.m - 1:prm.m]).sum(axis=1)
            a, b = g >= ta, h >= tb
            da, db, dab = a.mean(), b.mean(), (a & b).mean()
            mode = f"monte_carlo({samples})"
        lower = max(da + db - 1, 0)
        rows.append({"n": n, "m": prm.m, "density_a": da, "density_b": db,
                     "density_ab": dab, "lower_bound": lower, "mode": mode})
    return rows


# -- inequality on sequences ---------------------------------------------------

@dataclass
class SequenceCheck:
    lhs: object
    rhs: object

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


def check_sequence_inequality(t: Sequence, u: Sequence, v: Sequence, *,
                              enforce: bool = True) -> SequenceCheck:
    """``sum t_k u_k v_k`` against ``(sum t_k u_k)(sum t_k v_k)``.

    Preconditions: equal lengths, all entries nonnegative, ``u`` and ``v``
    nondecreasing, ``sum t <= 1``.  With ``enforce=False`` violations are
    allowed, to look for counterexamples.
    """
    t, u, v = ([to_number(x) for x in seq] for seq in (t, u, v))
    if not (len(t) == len(u) == len(v)) or not t:
        raise ValueError("t, u, v must be nonempty and of equal length")
    if enforce:
        if any(x < 0 for x in (*t, *u, *v)):
            raise ValueError("entries must be nonnegative")
        if any(u[i] > u[i + 1] or v[i] > v[i + 1] for i in range(len(u) - 1)):
            raise ValueError("u and v must be nondecreasing")
        if sum(t) > 1:
            raise ValueError("sum of t must not exceed 1")
    lhs = sum(a * b * c for a, b, c in zip(t, u, v))
    rhs = sum(a * b for a, b in zip(t, u)) * sum(a * c for a, c in zip(t, v))
    return SequenceCheck(lhs, rhs)


# -- open questions ------------------------------------------------------------

def structured_strong_families(n: int) -> list[tuple[dict, PermSet]]:
    """Every t-band, inversion-layer and prefix-count family on ``S_n``."""
    out = []
    for t in range(n):
        out.append(({"family": "t_band", "t": t}, t_band(n, t)))
    for k in range(comb(n, 2) + 1):
        out.append(({"family": "layers_le", "k": k}, layers_le(n, k)))
    for v in range(1, n + 1):
        for w in range(1, n + 1):
            for u in range(1, min(v, w) + 1):
                out.append(({"family": "prefix_count", "u": u, "v": v, "w": w},
                            prefix_count_family(n, u, v, w)))
    return out


def open_question_measure(question: int, n: int, q_param, *, exact: bool | None = None) -> Measure:
    if question == 1:
        return boltzmann_measure(list(range(1, n + 1)), "abs", q_param, exact=exact)
    if question == 2:
        return middle_gap_measure(n, q_param, exact=exact)
    if question == 3:
        return fixed_point_measure(n, q_param, exact=exact)
    raise ValueError(f"unknown question {question}; expected 1, 2 or 3")


def open_question_experiment(question: int, n: int, q_param, pair_source: str = "structured", *,
                             rng: np.random.Generator | None = None, pairs: int = 1000,
                             density=(0.0, 0.3)) -> ScanReport:
    """Minimum slack over strong up-set pairs for the spatial measures.

    The sign of the result is evidence only; nothing here asserts positive
    association.
    """
    mu = open_question_measure(question, n, q_param)
    if pair_source == "structured":
        fams = structured_strong_families(n)
        sets = np.array([f.bits for _, f in fams], dtype=bool)
        best, pair, negative, count = scan_pairs(mu, sets)
        return ScanReport("strong", mu.spec, n, count, _slack_value(mu, best),
                          (fams[pair[0]][1], fams[pair[1]][1]), False, negative,
                          {"question": question, "source": "structured",
                           "argmin_specs": [fams[pair[0]][0], fams[pair[1]][0]]})
    if pair_source == "exhaustive":
        rep = scan_up_set_pairs(n, STRONG, mu, "exhaustive")
    elif pair_source == "random":
        rep = scan_up_set_pairs(n, STRONG, mu, "random", pairs=pairs, density=density, rng=rng)
    else:
        raise ValueError(f"unknown pair source {pair_source!r}")
    rep.extra.update({"question": question, "source": pair_source})
    return rep


def t_up_set_experiment(n: int, t_list: Sequence[int], density, trials: int,
                        rng: np.random.Generator) -> list[dict]:
    """Uniform-measure slack statistics over random ``T(t)`` up-set pairs."""
    mu = uniform_measure(n)
    rows = []
    for t in t_list:
        if trials <= 0:
            rows.append({"t": t, "trials": 0, "min_slack": None, "mean_slack": None,
                         "negative_fraction": None})
            continue
        order = T(t)
        a = random_up_sets(n, order, trials, density, rng)
        b = random_up_sets(n, order, trials, density, rng)
        num = slack_numerators(mu, a, b)
        z2 = int(mu.total) ** 2
        rows.append({
            "t": t, "trials": trials,
            "min_slack": Fraction(int(num.min()), z2),
            "mean_slack": float(Fraction(int(num.sum()), z2 * trials)),
            "negative_fraction": float((num < 0).mean()),
        })
    return rows
