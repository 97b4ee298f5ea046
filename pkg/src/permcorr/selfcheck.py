"""
Seeded invariant suite behind ``permcorr selfcheck``.

Each check returns ``(ok, detail)``; :func:`run_selfcheck` times them and
collects :class:`CheckResult` rows.  Nothing here depends on pytest.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, factorial, sqrt
from typing import Callable

import numpy as np

from . import chains, families, orders
from .engine import check_sequence_inequality, correlate, scan_up_set_pairs
from .measures import (
    check_lattice_condition, ig_measure, mallows_measure, sample, uniform_measure,
)
from .orders import GRID, STRONG, WEAK, T
from .perm import (
    all_perms, decode_lehmer, decode_lehmer_naive, encode_lehmer, encode_lehmer_naive,
    grid_join, grid_meet, inversion_count, rank, unrank,
)
from .permset import PermSet


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def _perms(n):
    return [tuple(int(x) for x in row) for row in all_perms(n)]


def random_rational_ig(n: int, rng: np.random.Generator, max_weight: int = 6):
    """IG measure with coordinate laws proportional to random small integers."""
    dists = []
    for k in range(1, n + 1):
        w = rng.integers(0, max_weight + 1, size=k)
        if w.sum() == 0:
            w[rng.integers(k)] = 1
        dists.append([Fraction(int(x), int(w.sum())) for x in w])
    return ig_measure(dists)


def check_lehmer_roundtrip(rng):
    for n in range(1, 7):
        for a in _perms(n):
            f = encode_lehmer(a)
            if decode_lehmer(f) != a or f != encode_lehmer_naive(a):
                return False, f"round trip failed at {a}"
    for n in range(7, 13):
        for _ in range(200):
            a = tuple(int(x) for x in rng.permutation(n) + 1)
            if decode_lehmer(encode_lehmer(a)) != a:
                return False, f"round trip failed at {a}"
            f = tuple(int(rng.integers(1, k + 1)) for k in range(1, n + 1))
            if encode_lehmer(decode_lehmer(f)) != f or decode_lehmer(f) != decode_lehmer_naive(f):
                return False, f"code round trip failed at {f}"
    return True, "exhaustive n<=6, 1200 random at n=7..12"


def check_inversion_identity(rng):
    for n in range(1, 7):
        for a in _perms(n):
            f = encode_lehmer(a)
            if inversion_count(a) != sum(k - fk for k, fk in enumerate(f, start=1)):
                return False, f"identity fails at {a}"
    return True, "exhaustive n<=6"


def check_rank_bijection(rng):
    for n in range(1, 8):
        seen = set()
        for r in range(factorial(n)):
            a = unrank(r, n)
            if rank(a) != r:
                return False, f"rank(unrank({r})) != {r} at n={n}"
            seen.add(a)
        if len(seen) != factorial(n):
            return False, f"unrank not injective at n={n}"
    return True, "exhaustive n<=7"


def check_grid_lattice(rng):
    for n in range(1, 5):
        ps = _perms(n)
        for a, b in product(ps, repeat=2):
            if grid_join(a, b) != grid_join(b, a) or grid_meet(a, b) != grid_meet(b, a):
                return False, f"commutativity at {a},{b}"
            if grid_join(a, grid_meet(a, b)) != a or grid_meet(a, grid_join(a, b)) != a:
                return False, f"absorption at {a},{b}"
        if n == 4:
            sub = ps[::3]
        else:
            sub = ps
        for a, b, c in product(sub, repeat=3):
            if grid_join(grid_join(a, b), c) != grid_join(a, grid_join(b, c)):
                return False, f"join associativity at {a},{b},{c}"
            if grid_meet(grid_meet(a, b), c) != grid_meet(a, grid_meet(b, c)):
                return False, f"meet associativity at {a},{b},{c}"
    for _ in range(300):
        n = int(rng.integers(5, 9))
        a, b, c = (tuple(int(x) for x in rng.permutation(n) + 1) for _ in range(3))
        if grid_join(a, a) != a or grid_join(grid_join(a, b), c) != grid_join(a, grid_join(b, c)):
            return False, f"random lattice law at {a},{b},{c}"
    return True, "exhaustive n<=4 (triples on a third of S_4), 300 random n=5..8"


def check_closure_operator(rng):
    for n in range(3, 7):
        for order in (STRONG, WEAK, GRID):
            for _ in range(20):
                s = PermSet(n, rng.random(factorial(n)) < 0.05)
                t = s | PermSet(n, rng.random(factorial(n)) < 0.05)
                cs, ct = orders.up_closure(s, order), orders.up_closure(t, order)
                if not (s <= cs and cs <= ct and orders.up_closure(cs, order) == cs):
                    return False, f"closure law fails at n={n}, {order}"
                if not orders.is_up_set(cs, order):
                    return False, f"closure not an up-set at n={n}, {order}"
    return True, "extensive, monotone, idempotent; n=3..6, 3 orders x 20 draws"


def check_sampler_frequencies(rng):
    n, draws = 4, 100_000
    mu = uniform_measure(n)
    counts = Counter(map(tuple, sample(mu, rng, draws).tolist()))
    p = 1 / 24
    sigma = sqrt(draws * p * (1 - p))
    worst = max(abs(counts.get(a, 0) - draws * p) / sigma for a in _perms(n))
    if worst > 3:
        return False, f"uniform cell off by {worst:.2f} sigma"
    q = Fraction(1, 2)
    mal = mallows_measure(n, q)
    exact = Counter()
    for a in _perms(n):
        exact[inversion_count(a)] += mal.density(a)
    hist = Counter(inversion_count(tuple(a)) for a in sample(mal, rng, draws).tolist())
    worst_m = 0.0
    for k, pk in exact.items():
        pk = float(pk)
        sig = sqrt(draws * pk * (1 - pk))
        worst_m = max(worst_m, abs(hist.get(k, 0) - draws * pk) / sig)
    if worst_m > 3:
        return False, f"Mallows inversion histogram off by {worst_m:.2f} sigma"
    return True, f"max deviation {worst:.2f} sigma (uniform), {worst_m:.2f} sigma (Mallows)"


def check_sequence_lemma(rng):
    for _ in range(10_000):
        n = int(rng.integers(1, 7))
        raw = rng.integers(0, 10, size=n)
        tot = int(raw.sum()) + int(rng.integers(0, 5))
        t = [Fraction(int(x), max(tot, 1)) for x in raw]
        u = sorted(Fraction(int(x), 7) for x in rng.integers(0, 20, size=n))
        v = sorted(Fraction(int(x), 5) for x in rng.integers(0, 20, size=n))
        res = check_sequence_inequality(t, u, v)
        if not res.holds:
            return False, f"fails at t={t}, u={u}, v={v}"
    # the mass condition matters: search for a violation with sum t > 1
    witness = None
    for _ in range(2000):
        n = int(rng.integers(1, 4))
        t = [Fraction(int(x), 2) for x in rng.integers(0, 5, size=n)]
        u = sorted(Fraction(int(x)) for x in rng.integers(0, 4, size=n))
        v = sorted(Fraction(int(x)) for x in rng.integers(0, 4, size=n))
        res = check_sequence_inequality(t, u, v, enforce=False)
        if not res.holds:
            witness = (t, u, v, res.lhs, res.rhs)
            break
    note = "no violation found" if witness is None else \
        f"sum t>1 violation: t={[str(x) for x in witness[0]]}, u={[str(x) for x in witness[1]]}, " \
        f"v={[str(x) for x in witness[2]]}, lhs={witness[3]} < rhs={witness[4]}"
    return True, f"10^4 instances hold; {note}"


def check_theorem1_small(rng):
    rep = scan_up_set_pairs(3, STRONG, uniform_measure(3), "exhaustive")
    if rep.min_slack < 0:
        return False, f"negative slack {rep.min_slack} at n=3"
    rep4 = scan_up_set_pairs(4, STRONG, uniform_measure(4), "exhaustive")
    if rep4.min_slack < 0:
        return False, f"negative slack {rep4.min_slack} at n=4"
    r = correlate(uniform_measure(3), families.u_ij(3, 1, 2), families.u_ij(3, 2, 3))
    if (r.p_ab, r.product) != (Fraction(1, 6), Fraction(1, 4)):
        return False, f"weak counterexample gives {r.p_ab}, {r.product}"
    return True, f"all strong pairs at n=3 ({rep.pairs_tested}) and n=4 ({rep4.pairs_tested})"


def check_ig_lattice_equality(rng):
    for _ in range(20):
        mu = random_rational_ig(4, rng)
        rep = check_lattice_condition(mu)
        if rep.worst_slack != 0 or rep.max_slack != 0:
            return False, f"lattice slack range [{rep.worst_slack}, {rep.max_slack}]"
    return True, "20 random rational IG measures at n=4"


def check_mallows_ig(rng):
    for n in range(1, 6):
        for q in (Fraction(1, 3), Fraction(1, 2), Fraction(7, 10), Fraction(1)):
            mu = mallows_measure(n, q)
            z = sum(q ** inversion_count(a) for a in _perms(n))
            for a in _perms(n):
                if mu.density(a) != q ** inversion_count(a) / z:
                    return False, f"mismatch at n={n}, q={q}, a={a}"
    return True, "n<=5, q in {1/3, 1/2, 7/10, 1}"


def check_order_suite(rng):
    for n in range(1, 6):
        ps = _perms(n)
        up_s = orders.upper_sets(n, STRONG)
        up_w = orders.upper_sets(n, WEAK)
        up_g = orders.upper_sets(n, GRID)
        for r in range(len(ps)):
            if up_w[r] & ~up_s[r] or up_g[r] & ~up_s[r]:
                return False, f"containment fails at n={n}, {ps[r]}"
        if orders.upper_sets(n, T(1)) != up_w:
            return False, f"T(1) != weak at n={n}"
        if orders.upper_sets(n, T(n)) != up_s:
            return False, f"T(n) != strong at n={n}"
        for a, b in product(ps, repeat=2):
            rb = rank(b)
            if orders.leq(a, b, WEAK) != bool(up_w[rank(a)] >> rb & 1):
                return False, f"weak criterion fails at {a},{b}"
            if orders.leq(a, b, GRID) != bool(up_g[rank(a)] >> rb & 1):
                return False, f"grid reachability fails at {a},{b}"
            if orders.leq(a, b, STRONG) != bool(up_s[rank(a)] >> rb & 1):
                return False, f"strong criterion fails at {a},{b}"
    return True, "criteria vs search, containments, T(1)=weak, T(n)=strong; n<=5"


def check_slice_lemma(rng):
    n = 4
    count = 0
    for s in orders.iter_up_sets(n, STRONG):
        count += 1
        slices = [orders.slice_family(s, k) for k in range(1, n + 1)]
        if not all(orders.is_up_set(x, STRONG) for x in slices):
            return False, f"slice not an up-set for {s}"
        if not all(slices[i] <= slices[i + 1] for i in range(n - 1)):
            return False, f"slices not nested for {s}"
    return True, f"all {count} strong up-sets at n=4"


def check_family_up_sets(rng):
    for n in range(1, 6):
        fams = [families.layers_le(n, k) for k in range(comb(n, 2) + 1)]
        fams += [families.t_band(n, t) for t in range(n)]
        fams += [families.band_like_preset(n, p, t) for p in ("sum", "sumsq") for t in range(n * n + 1)]
        for _ in range(20):
            w = sorted((int(x) for x in rng.integers(-3, 4, size=n)), reverse=True)
            t = [int(x) for x in rng.integers(-4, 4, size=n)]
            fams.append(families.seq_dominating(n, w, t))
        for f in fams:
            if not orders.is_up_set(f, STRONG):
                return False, f"family {f} at n={n} is not a strong up-set"
    for n in range(2, 8):
        a, b = families.thm2_pair(n, Fraction(1, 2), Fraction(1, 2))
        if not (orders.is_up_set(a, WEAK) and orders.is_up_set(b, WEAK)):
            return False, f"thm2 families not weak up-sets at n={n}"
    return True, "layers, bands, presets, random D(w,t) n<=5; thm2 pair weak n<=7"


def check_chains(rng):
    for n in (4, 5):
        for _ in range(30):
            fa = chains.random_left_compressed(n, float(rng.uniform(0.02, 0.4)), rng)
            fb = chains.random_left_compressed(n, float(rng.uniform(0.02, 0.4)), rng)
            if not orders.is_up_set(chains.chain_up_set(fa), STRONG):
                return False, f"C(A) not a strong up-set at n={n}"
            if chains.c2(fa, fb) * factorial(n) < chains.c(fa) * chains.c(fb):
                return False, f"chain correlation fails at n={n}"
    return True, "30 random compressed pairs at n=4,5"


def check_ig_positive_association(rng):
    n = 4
    for _ in range(5):
        mu = random_rational_ig(n, rng)
        rep = scan_up_set_pairs(n, STRONG, mu, "random", pairs=500, density=(0.0, 0.3), rng=rng)
        if rep.min_slack < 0:
            return False, f"negative slack {rep.min_slack}"
    return True, "5 random IG measures x 500 strong pairs at n=4"


CHECKS: list[tuple[str, Callable]] = [
    ("lehmer_roundtrip", check_lehmer_roundtrip),
    ("inversion_identity", check_inversion_identity),
    ("rank_bijection", check_rank_bijection),
    ("grid_lattice_laws", check_grid_lattice),
    ("closure_operator", check_closure_operator),
    ("sampler_frequencies", check_sampler_frequencies),
    ("sequence_lemma", check_sequence_lemma),
    ("strong_uniform_correlation", check_theorem1_small),
    ("ig_lattice_equality", check_ig_lattice_equality),
    ("mallows_is_ig", check_mallows_ig),
    ("order_suite", check_order_suite),
    ("slice_lemma", check_slice_lemma),
    ("family_up_sets", check_family_up_sets),
    ("chains", check_chains),
    ("ig_positive_association", check_ig_positive_association),
]


def run_selfcheck(seed: int = 20240101, only: list[str] | None = None) -> list[CheckResult]:
    root = np.random.SeedSequence(seed)
    streams = root.spawn(len(CHECKS))
    results = []
    for (name, fn), ss in zip(CHECKS, streams):
        if only and name not in only:
            continue
        start = time.perf_counter()
        try:
            ok, detail = fn(np.random.default_rng(ss))
        except Exception as exc:  # a crash is a failed check, reported not raised
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, ok, detail, time.perf_counter() - start))
    return results
