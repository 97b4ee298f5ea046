from fractions import Fraction
from itertools import product
from math import ceil, comb, factorial, floor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from permcorr.engine import correlate
from permcorr.families import (
    band_like, band_like_preset, e_families, g_stat, h_stat, layer, layers_le,
    prefix_count_family, seq_dominating, seq_dominating_prime, t_band, thm2_A, thm2_B, thm2_m,
    thm2_pair, thm2_prime_weights, u_ij, validate_band_like,
)
from permcorr.measures import mallows_measure, uniform_measure
from permcorr.orders import STRONG, WEAK, is_up_set
from permcorr.perm import identity, reversal
from permcorr.permset import PermSet

HALF = Fraction(1, 2)


def as_set(fam):
    return set(fam)


def test_u_ij_examples():
    assert as_set(u_ij(3, 1, 2)) == {(1, 2, 3), (1, 3, 2), (3, 1, 2)}
    assert len(u_ij(3, 1, 2) & u_ij(3, 2, 3)) == 1
    for n in (3, 4, 5):
        for i, j in product(range(1, n + 1), repeat=2):
            if i != j:
                a, b = u_ij(n, i, j), u_ij(n, j, i)
                assert len(a) == factorial(n) // 2
                assert len(a & b) == 0 and (a | b) == PermSet.full(n)
    with pytest.raises(ValueError):
        u_ij(3, 2, 2)


def test_layer_examples():
    assert layers_le(4, comb(4, 2)) == PermSet.full(4)
    assert as_set(layers_le(4, 0)) == {identity(4)}
    assert as_set(layers_le(3, 1)) == {(1, 2, 3), (1, 3, 2), (2, 1, 3)}
    for n in range(1, 7):
        sizes = [len(layer(n, k)) for k in range(comb(n, 2) + 1)]
        assert sum(sizes) == factorial(n)
        assert sizes == [sum(1 for a in oracles.perms(n) if len(oracles.inv_set(a)) == k)
                         for k in range(comb(n, 2) + 1)]
    with pytest.raises(ValueError):
        layers_le(3, 4)


def test_t_band_examples():
    assert t_band(4, 3) == PermSet.full(4)
    assert as_set(t_band(4, 0)) == {identity(4)}
    assert as_set(t_band(3, 1)) == {(1, 2, 3), (2, 1, 3), (1, 3, 2)}


def test_band_like_examples():
    n = 4
    every = list(product(range(n), repeat=n))
    assert band_like(n, every) == PermSet.full(n)
    assert validate_band_like(n, every)
    for t in range(0, 8):
        d_sum = [v for v in every if sum(v) <= t]
        assert validate_band_like(n, d_sum)
        assert band_like(n, d_sum) == band_like_preset(n, "sum", t)
        d_sq = [v for v in every if sum(x * x for x in v) <= t]
        assert validate_band_like(n, d_sq)
        assert band_like(n, d_sq) == band_like_preset(n, "sumsq", t)
    for t in range(n):
        assert band_like_preset(n, "max", t) == t_band(n, t)
    assert not validate_band_like(3, [(1, 0, 0)])


def test_seq_dominating_examples():
    assert seq_dominating(4, [1, 1, 0, 0], ["-inf"] * 4) == PermSet.full(4)
    assert as_set(seq_dominating(3, [1, 0, 0], [1, 0, 0])) == {(1, 2, 3), (1, 3, 2)}
    n, a_, b_, c_ = 5, 2, 3, 3
    fam = prefix_count_family(n, a_, b_, c_)
    assert as_set(fam) == {p for p in oracles.perms(n) if sum(1 for x in p[:c_] if x <= b_) >= a_}
    with pytest.raises(ValueError):
        seq_dominating(3, [0, 1, 0], [0, 0, 0])


def direct_prime(a, w, t):
    return all(sum(w[x - 1] for x in a[:m]) >= t[a[m - 1] - 1] for m in range(1, len(a) + 1))


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3),
       st.lists(st.integers(-4, 4), min_size=3, max_size=3))
@settings(max_examples=100)
def test_seq_dominating_prime_matches_direct(w, t):
    got = as_set(seq_dominating_prime(3, w, t))
    assert got == {a for a in oracles.perms(3) if direct_prime(a, w, t)}


def test_seq_dominating_prime_trivial_thresholds():
    assert seq_dominating_prime(4, [2, -1, 0, 5], [-100] * 4) == PermSet.full(4)


@st.composite
def monotone_weights(draw, n):
    w = sorted(draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n)), reverse=True)
    t = draw(st.lists(st.integers(-6, 6), min_size=n, max_size=n))
    return w, t


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), monotone_weights(n))))
@settings(max_examples=80, deadline=None)
def test_seq_dominating_is_strong_up_set(args):
    n, (w, t) = args
    assert is_up_set(seq_dominating(n, w, t), STRONG)


@pytest.mark.parametrize("n", range(2, 6))
def test_named_families_are_strong_up_sets(n):
    for k in range(comb(n, 2) + 1):
        assert is_up_set(layers_le(n, k), STRONG)
    for t in range(n):
        assert is_up_set(t_band(n, t), STRONG)
    for preset in ("max", "sum", "sumsq"):
        for t in range(0, 2 * n * n):
            assert is_up_set(band_like_preset(n, preset, t), STRONG)
    for u, v, w in product(range(1, n + 1), repeat=3):
        if u <= min(v, w):
            assert is_up_set(prefix_count_family(n, u, v, w), STRONG)


def test_u12_is_weak_not_strong():
    assert is_up_set(u_ij(3, 1, 2), WEAK)
    assert not is_up_set(u_ij(3, 1, 2), STRONG)


def test_g_h_examples():
    for n in range(1, 7):
        for m in range(1, n + 1):
            assert g_stat(identity(n), m) == m
            assert h_stat(identity(n), m) == n - m + 1
            assert g_stat(reversal(n), m) == 1
            assert h_stat(reversal(n), m) == 1
    with pytest.raises(ValueError):
        g_stat((1, 2, 3), 4)


@pytest.mark.parametrize("n", range(1, 7))
def test_g_and_h_split_evenly(n):
    ps = oracles.perms(n)
    for m in range(1, n + 1):
        g_counts = np.bincount([g_stat(a, m) for a in ps], minlength=m + 1)[1:]
        h_counts = np.bincount([h_stat(a, m) for a in ps], minlength=n - m + 2)[1:]
        assert set(g_counts.tolist()) == {factorial(n) // m}
        assert set(h_counts.tolist()) == {factorial(n) // (n - m + 1)}
        assert all(g_stat(a, m) == oracles.code(a)[m - 1] for a in ps)


def thm2_oracle(n, alpha, beta):
    m = ceil(alpha / (alpha + beta) * n)
    a_set, b_set = set(), set()
    for a in oracles.perms(n):
        p = {v: i for i, v in enumerate(a)}
        g = sum(1 for i in range(1, m + 1) if p[i] <= p[m])
        h = sum(1 for i in range(m, n + 1) if p[i] >= p[m])
        if g >= (1 - alpha) * m:
            a_set.add(a)
        if h >= (1 - beta) * (n - m + 1):
            b_set.add(a)
    return m, a_set, b_set


@pytest.mark.parametrize("alpha,beta", [(HALF, HALF), (Fraction(1, 3), Fraction(3, 5)),
                                        (Fraction(4, 5), Fraction(1, 4))])
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_thm2_pair_matches_oracle(n, alpha, beta):
    m, a_set, b_set = thm2_oracle(n, alpha, beta)
    assert thm2_m(n, alpha, beta).m == m
    a, b = thm2_pair(n, alpha, beta)
    assert as_set(a) == a_set and as_set(b) == b_set


def test_thm2_n6_half_counts():
    a, b = thm2_pair(6, HALF, HALF)
    assert thm2_m(6, HALF, HALF).m == 3
    assert (len(a), len(b), len(a & b)) == (480, 540, 312)


@pytest.mark.parametrize("n", range(2, 9))
def test_thm2_sets_are_weak_up_sets_with_size_bounds(n):
    for alpha, beta in [(HALF, HALF), (Fraction(1, 3), Fraction(1, 2)), (Fraction(3, 4), Fraction(2, 3))]:
        a, b = thm2_pair(n, alpha, beta)
        assert is_up_set(a, WEAK) and is_up_set(b, WEAK)
        assert len(a) >= alpha * factorial(n)
        assert len(b) >= beta * factorial(n)


def test_thm2_near_one_is_everything():
    assert thm2_A(7, Fraction(99, 100), HALF) == PermSet.full(7)
    assert thm2_B(7, HALF, Fraction(99, 100)) == PermSet.full(7)


def test_thm2_not_strong_generically():
    assert not is_up_set(thm2_A(5, HALF, HALF), STRONG)
    assert not is_up_set(thm2_B(6, HALF, HALF), STRONG)


def test_thm2_rejects_bad_parameters():
    for bad in (0, 1, Fraction(3, 2)):
        with pytest.raises(ValueError):
            thm2_pair(5, bad, HALF)


@pytest.mark.parametrize("n", range(2, 8))
def test_prime_weights_reproduce_thm2_pair(n):
    for alpha, beta in [(HALF, HALF), (Fraction(1, 3), Fraction(3, 5))]:
        (u, s), (v, t) = thm2_prime_weights(n, alpha, beta)
        assert seq_dominating_prime(n, u, s) == thm2_A(n, alpha, beta)
        assert seq_dominating_prime(n, v, t) == thm2_B(n, alpha, beta)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_literal_half_threshold_agrees_for_odd_n(n):
    (u, s), (v, t) = thm2_prime_weights(n, literal=True)
    assert s[(n + 1) // 2 - 1] == Fraction((n + 1) // 2, 2)
    assert seq_dominating_prime(n, u, s) == thm2_A(n, HALF, HALF)
    assert seq_dominating_prime(n, v, t) == thm2_B(n, HALF, HALF)


def e_oracle(n, alpha, beta, eps):
    m = ceil(alpha / (alpha + beta) * n)
    u1 = range(1, floor((1 - alpha - eps) * n) + 1)
    u2 = range(max(ceil((beta + eps) * n), 1), n + 1)
    e1 = {a for a in oracles.perms(n) if sum(1 for k in u1 if a[k - 1] <= m) >= (1 - alpha) * m}
    e2 = {a for a in oracles.perms(n)
          if sum(1 for k in u2 if a[k - 1] >= m) >= (1 - beta) * (n - m + 1)}
    return e1, e2


@pytest.mark.parametrize("n,eps", [(5, Fraction(1, 10)), (6, Fraction(1, 10)), (6, Fraction(1, 5)),
                                   (7, Fraction(1, 20))])
def test_e_families_match_oracle(n, eps):
    e1, e2 = e_families(n, HALF, HALF, eps)
    o1, o2 = e_oracle(n, HALF, HALF, eps)
    assert as_set(e1) == o1 and as_set(e2) == o2


def test_e_families_n6_sizes_and_wide_eps():
    e1, e2 = e_families(6, HALF, HALF, Fraction(1, 10))
    assert (Fraction(len(e1), 720), Fraction(len(e2), 720)) == (Fraction(1, 5), Fraction(4, 5))
    e1, e2 = e_families(6, HALF, HALF, Fraction(9, 10))
    assert len(e1) == 0 and len(e2) == 0


def test_pairwise_positive_correlation_n5():
    n = 5
    fams = [t_band(n, t) for t in range(n)]
    fams += [layers_le(n, k) for k in range(0, comb(n, 2) + 1, 2)]
    fams += [band_like_preset(n, "sum", t) for t in (2, 4, 6)]
    fams += [prefix_count_family(n, 1, 2, 2), prefix_count_family(n, 2, 3, 3),
             seq_dominating(n, [3, 2, 2, 0, -1], [1, 2, 3, 3, 0])]
    for mu in (uniform_measure(n), mallows_measure(n, Fraction(2, 5))):
        for i, a in enumerate(fams):
            for b in fams[i:]:
                assert correlate(mu, a, b).slack >= 0
