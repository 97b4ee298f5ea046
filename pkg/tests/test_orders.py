from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from permcorr.orders import (
    GRID, STRONG, WEAK, T, dominated_inversions, enumerate_up_sets, is_up_set, leq, leq_bfs,
    parse_order, random_up_set, random_up_sets, slice_family, slice_family_direct, up_closure,
    up_closure_many, up_moves,
)
from permcorr.perm import identity, reversal
from permcorr.permset import PermSet

ORDERS = [STRONG, WEAK, GRID, T(2)]


def step_for(order, n):
    if order.kind == "grid":
        return oracles.dominated_swaps_up
    gap = {"strong": n - 1, "weak": 1, "t": order.t}[order.kind]
    return lambda a: oracles.swaps_up(a, gap)


def test_parse_order():
    assert parse_order("strong") == STRONG
    assert parse_order("t:3") == T(3)
    assert str(T(2)) == "t:2"
    with pytest.raises(ValueError):
        parse_order("bruhat")
    with pytest.raises(ValueError):
        T(0)


def test_up_moves_examples():
    for order in ORDERS:
        assert up_moves(identity(4), order) == []
    assert set(up_moves((3, 1, 2), WEAK)) == {(1, 3, 2)}
    assert set(up_moves((3, 1, 2), STRONG)) == {(1, 3, 2), (2, 1, 3)}


def test_leq_examples():
    a = (3, 1, 2)
    for order in ORDERS:
        assert leq(a, a, order)
    assert leq((3, 1, 2), (1, 3, 2), WEAK)
    assert not leq((3, 1, 2), (2, 1, 3), GRID)


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("order", ORDERS, ids=str)
def test_leq_matches_reachability(n, order):
    up = oracles.reach(n, step_for(order, n))
    ps = oracles.perms(n)
    for a, b in product(ps, repeat=2):
        assert leq(a, b, order) == (b in up[a])


def test_leq_bfs_agrees_on_samples():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a, b = tuple(rng.permutation(5) + 1), tuple(rng.permutation(5) + 1)
        for order in (STRONG, WEAK, T(2)):
            assert leq_bfs(a, b, order) == leq(a, b, order)


def test_dominated_inversion_examples():
    assert (1, 2) in dominated_inversions((2, 3, 1))
    assert (2, 3) not in dominated_inversions((3, 1, 2))
    for a in oracles.perms(4):
        adjacent = {tuple(sorted((a[k], a[k + 1]))) for k in range(3) if a[k] > a[k + 1]}
        assert adjacent <= dominated_inversions(a)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_dominated_swap_is_single_grid_cover(n):
    for a in oracles.perms(n):
        fa = oracles.code(a)
        for i, j in dominated_inversions(a):
            b = list(a)
            x, y = b.index(i), b.index(j)
            b[x], b[y] = b[y], b[x]
            fb = oracles.code(tuple(b))
            diff = [k for k in range(n) if fa[k] != fb[k]]
            assert diff == [j - 1] and fb[j - 1] == fa[j - 1] + 1


def test_relation_containments_and_t_extremes():
    for n in range(2, 6):
        ps = oracles.perms(n)
        for a, b in product(ps, repeat=2):
            s = leq(a, b, STRONG)
            if leq(a, b, WEAK):
                assert s
            if leq(a, b, GRID):
                assert s
            assert leq(a, b, T(1)) == leq(a, b, WEAK)
            assert leq(a, b, T(n)) == s


def test_is_up_set_examples():
    u12 = PermSet.from_perms(3, [(1, 2, 3), (1, 3, 2), (3, 1, 2)])
    assert is_up_set(u12, WEAK)
    assert not is_up_set(u12, STRONG)
    for order in ORDERS:
        assert is_up_set(PermSet.full(3), order)
        assert is_up_set(PermSet.empty(3), order)


def test_closure_examples():
    assert up_closure(PermSet.from_perms(3, [identity(3)]), STRONG) == PermSet.from_perms(3, [identity(3)])
    assert up_closure(PermSet.from_perms(4, [reversal(4)]), STRONG) == PermSet.full(4)
    assert up_closure(PermSet.from_perms(3, [(3, 1, 2)]), WEAK) == \
        PermSet.from_perms(3, [(3, 1, 2), (1, 3, 2), (1, 2, 3)])


@given(st.integers(2, 5), st.sampled_from(ORDERS), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_closure_is_closure_operator(n, order, seed):
    rng = np.random.default_rng(seed)
    size = len(PermSet.full(n).bits)
    s = PermSet(n, rng.random(size) < 0.1)
    t = s | PermSet(n, rng.random(size) < 0.1)
    cs, ct = up_closure(s, order), up_closure(t, order)
    assert s <= cs
    assert up_closure(cs, order) == cs
    assert cs <= ct
    assert is_up_set(cs, order)
    expected = {b for a in s for b in oracles.reach(n, step_for(order, n))[a]} if n <= 4 else None
    if expected is not None:
        assert set(cs) == expected


def test_batch_closure_matches_single():
    rng = np.random.default_rng(5)
    seeds = rng.random((20, 120)) < 0.05
    batch = up_closure_many(seeds, 5, STRONG)
    for row, seed in zip(batch, seeds):
        assert np.array_equal(row, up_closure(PermSet(5, seed), STRONG).bits)


def test_enumeration_small_counts():
    assert len(enumerate_up_sets(1, STRONG)[0]) == 2
    for order in ORDERS[:3]:
        ups, truncated = enumerate_up_sets(2, order)
        assert len(ups) == 3 and not truncated


@pytest.mark.parametrize("order", ORDERS, ids=str)
def test_enumeration_matches_subset_filter_n3(order):
    ps = oracles.perms(3)
    step = step_for(order, 3)
    expected = {frozenset(c) for r in range(7) for c in combinations(ps, r) if oracles.is_up(c, 3, step)}
    got = {frozenset(s) for s in enumerate_up_sets(3, order)[0]}
    assert got == expected


def test_enumeration_counts_n4():
    # counts from the enumerator, each member verified against the swap oracle
    counts = {STRONG: 250, WEAK: 856, GRID: 490}
    for order, count in counts.items():
        ups, _ = enumerate_up_sets(4, order)
        assert len(ups) == count == len(set(ups))
        step = step_for(order, 4)
        assert all(oracles.is_up(s, 4, step) for s in ups[::17])


def test_enumeration_limit_flags_truncation():
    ups, truncated = enumerate_up_sets(4, STRONG, limit=10)
    assert len(ups) == 10 and truncated


def test_random_up_set_extremes():
    rng = np.random.default_rng(1)
    assert random_up_set(4, STRONG, 0.0, rng) == PermSet.empty(4)
    assert random_up_set(4, STRONG, 1.0, rng) == PermSet.full(4)
    rows = random_up_sets(5, GRID, 30, (0.0, 0.3), rng)
    assert all(is_up_set(PermSet(5, r), GRID) for r in rows)
    with pytest.raises(ValueError):
        random_up_set(4, STRONG, 1.5, rng)


def test_random_up_sets_deterministic():
    a = random_up_sets(5, STRONG, 10, 0.2, np.random.default_rng(9))
    b = random_up_sets(5, STRONG, 10, 0.2, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_slice_examples():
    full = PermSet.full(4)
    for k in range(1, 5):
        assert slice_family(full, k) == PermSet.full(3)
        assert slice_family(PermSet.empty(4), k) == PermSet.empty(3)
    a = up_closure(PermSet.from_perms(3, [(2, 3, 1)]), STRONG)
    assert set(a) == {(2, 3, 1), (2, 1, 3), (1, 3, 2), (1, 2, 3)}
    s1, s2, s3 = (slice_family(a, k) for k in (1, 2, 3))
    assert s1 <= s2 <= s3


def test_slices_are_nested_up_sets_n4():
    for a in enumerate_up_sets(4, STRONG)[0]:
        slices = [slice_family(a, k) for k in range(1, 5)]
        for k, s in enumerate(slices, start=1):
            assert s == slice_family_direct(a, k)
            assert is_up_set(s, STRONG)
        assert all(x <= y for x, y in zip(slices, slices[1:]))
