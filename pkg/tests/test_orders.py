import random

from itertools import product

import pytest

from orders import (
    GRID,
    STRONG,
    WEAK,
    OrderKind,
    dominated_inversions,
    dominated_moves,
    enumerate_up_sets,
    is_down_set,
    is_up_set,
    leq,
    leq_search,
    random_up_set,
    reachable,
    slice_family,
    t_order,
    up_closure,
    up_masks,
    up_moves,
)
from permset import PermSet
from perms import FACTORIALS, Permutation, all_perms, inversion_count, lehmer_naive, rank
from utils import InputError

from conftest import family

KINDS = [STRONG, WEAK, GRID]


def test_order_kind_parse():
    assert OrderKind.parse("Strong") == STRONG
    assert OrderKind.parse("t:2") == t_order(2)
    assert str(t_order(3)) == "t:3"
    with pytest.raises(InputError):
        OrderKind.parse("bruhat")
    with pytest.raises(InputError):
        OrderKind.parse("t:x")
    with pytest.raises(InputError):
        t_order(4).gap(3)


def test_up_moves_examples():
    for kind in KINDS + [t_order(2)]:
        assert up_moves((1, 2, 3), kind) == []
    assert up_moves((3, 1, 2), WEAK) == [(1, 3, 2)]
    assert set(up_moves((3, 1, 2), STRONG)) == {(1, 3, 2), (2, 1, 3)}


@pytest.mark.parametrize("kind", KINDS + [t_order(2)])
def test_moves_reduce_inversions(kind):
    for a in all_perms(4):
        for b in up_moves(a, kind):
            assert inversion_count(b) < inversion_count(a)


def test_leq_examples():
    a = (3, 1, 2)
    for kind in KINDS:
        assert leq(a, a, kind)
    assert leq((3, 1, 2), (1, 3, 2), WEAK)
    assert not leq((3, 1, 2), (2, 1, 3), GRID)
    with pytest.raises(InputError):
        leq((1, 2), (1, 2, 3), STRONG)


@pytest.mark.parametrize("n", [*range(1, 6), pytest.param(6, marks=pytest.mark.slow)])
def test_fast_criteria_match_search(n):
    table = all_perms(n)
    for kind in (STRONG, WEAK, GRID):
        for a, b in product(table, repeat=2):
            assert leq(a, b, kind) == leq_search(a, b, kind)


@pytest.mark.slow
def test_search_beyond_tables():
    a = Permutation.reversal(8)
    assert leq_search(a, Permutation.identity(8), STRONG)
    assert len(reachable((2, 1, 3), STRONG)) == 2


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("kind", KINDS + [t_order(2)])
def test_partial_order_axioms(n, kind):
    if kind.name == "t" and kind.t > n:
        pytest.skip("t exceeds n")
    size = FACTORIALS[n]
    masks = up_masks(n, kind)
    for r in range(size):
        assert masks[r] >> r & 1
        for s in range(size):
            if r != s and masks[r] >> s & 1:
                assert not masks[s] >> r & 1
                assert masks[s] & ~masks[r] == 0
    # identity on top, reversal at the bottom
    assert all(m & 1 for m in masks)
    assert masks[size - 1] == (1 << size) - 1


@pytest.mark.parametrize("n", range(2, 6))
def test_relation_containments(n):
    strong, weak, grid = (up_masks(n, k) for k in KINDS)
    by_t = [up_masks(n, t_order(t)) for t in range(1, n + 1)]
    for r in range(FACTORIALS[n]):
        assert weak[r] & ~strong[r] == 0
        assert grid[r] & ~strong[r] == 0
        assert weak[r] & ~grid[r] == 0
        assert by_t[0][r] == weak[r]
        assert by_t[-1][r] == strong[r]
        for t in range(n - 1):
            assert by_t[t][r] & ~by_t[t + 1][r] == 0


def test_is_up_set_examples():
    u12 = family(3, "123", "132", "312")
    assert is_up_set(u12, WEAK)
    assert not is_up_set(u12, STRONG)
    for kind in KINDS:
        assert is_up_set(PermSet.full(3), kind)
        assert is_up_set(PermSet.empty(3), kind)


def test_strong_up_sets_are_weak_and_grid():
    for mask in range(1 << 6):
        s = PermSet(3, mask)
        if is_up_set(s, STRONG):
            assert is_up_set(s, WEAK)
            assert is_up_set(s, GRID)


@pytest.mark.parametrize("n", [4, 5])
def test_strong_up_sets_are_weak_and_grid_random(n, rng):
    for _ in range(50):
        s = random_up_set(n, STRONG, rng.random(), rng)
        assert is_up_set(s, WEAK)
        assert is_up_set(s, GRID)


def test_up_closure_examples():
    identity = family(3, "123")
    assert up_closure(identity, STRONG) == identity
    assert up_closure(family(3, "321"), STRONG) == PermSet.full(3)
    assert up_closure(family(3, "312"), WEAK) == family(3, "312", "132", "123")


def test_up_closure_is_a_closure_operator(rng):
    for _ in range(40):
        n = rng.randint(2, 6)
        kind = rng.choice(KINDS)
        size = FACTORIALS[n]
        small = PermSet(n, rng.getrandbits(size) & rng.getrandbits(size))
        big = small | PermSet(n, rng.getrandbits(size))
        closed = up_closure(small, kind)
        assert small <= closed
        assert up_closure(closed, kind) == closed
        assert closed <= up_closure(big, kind)
        assert is_up_set(closed, kind)


@pytest.mark.slow
def test_closure_at_eight_uses_cover_tables():
    bottom = PermSet.from_perms(8, [Permutation.reversal(8)])
    assert up_closure(bottom, WEAK) == PermSet.full(8)


def test_complement_of_up_set_is_down_set(rng):
    for _ in range(30):
        s = random_up_set(4, STRONG, rng.random(), rng)
        assert is_down_set(s.complement(), STRONG)


def test_slice_examples():
    assert slice_family(PermSet.full(4), 2) == PermSet.full(3)
    assert slice_family(PermSet.empty(4), 1) == PermSet.empty(3)
    a = up_closure(family(3, "231"), STRONG)
    assert a == family(3, "231", "213", "132", "123")
    slices = [slice_family(a, k) for k in (1, 2, 3)]
    assert slices[0] <= slices[1] <= slices[2]
    assert sum(s.size for s in slices) == a.size
    with pytest.raises(InputError):
        slice_family(a, 4)


def test_slices_are_nested_up_sets():
    for a in enumerate_up_sets(4, STRONG):
        slices = [slice_family(a, k) for k in range(1, 5)]
        assert all(is_up_set(s, STRONG) for s in slices)
        assert all(slices[k] <= slices[k + 1] for k in range(3))


@pytest.mark.parametrize("n", [5, 6])
def test_slices_are_nested_up_sets_random(n, rng):
    for _ in range(10):
        a = random_up_set(n, STRONG, rng.random() / 4, rng)
        slices = [slice_family(a, k) for k in range(1, n + 1)]
        assert all(is_up_set(s, STRONG) for s in slices)
        assert all(slices[k] <= slices[k + 1] for k in range(n - 1))


def test_dominated_inversions_examples():
    assert dominated_inversions((2, 3, 1)) == {(1, 2), (1, 3)}
    assert dominated_inversions((3, 1, 2)) == {(1, 3)}
    assert (2, 3) not in dominated_inversions((3, 1, 2))


@pytest.mark.parametrize("n", range(1, 6))
def test_dominated_swaps_climb_the_grid(n):
    for a in all_perms(n):
        assert adjacent_pairs(a) <= dominated_inversions(a)
        for b in dominated_moves(a):
            assert all(x <= y for x, y in zip(lehmer_naive(a), lehmer_naive(b)))


def adjacent_pairs(a):
    return frozenset((a[p + 1], a[p]) for p in range(len(a) - 1) if a[p] > a[p + 1])


@pytest.mark.parametrize("n", range(1, 6))
def test_grid_order_is_dominated_reachability(n):
    grid = up_masks(n, GRID)
    for a in all_perms(n):
        reach = {rank(b) for b in _dominated_reach(a)}
        assert PermSet.from_ranks(n, reach).mask == grid[rank(a)]


def _dominated_reach(a):
    seen = {a}
    stack = [a]
    while stack:
        for b in dominated_moves(stack.pop()):
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


def test_enumerate_up_sets_counts():
    assert len(list(enumerate_up_sets(1, STRONG))) == 2
    for kind in KINDS:
        assert {s.mask for s in enumerate_up_sets(2, kind)} == {0, 1, 3}


@pytest.mark.parametrize("kind", KINDS)
def test_enumerate_up_sets_matches_brute_force(kind):
    brute = {m for m in range(1 << 6) if is_up_set(PermSet(3, m), kind)}
    streamed = [s.mask for s in enumerate_up_sets(3, kind)]
    assert len(streamed) == len(set(streamed))
    assert set(streamed) == brute


def test_enumeration_limit():
    stream = enumerate_up_sets(3, WEAK, limit=5)
    assert len(list(stream)) == 5
    assert stream.truncated
    full = enumerate_up_sets(3, WEAK)
    list(full)
    assert not full.truncated


def test_random_up_set_extremes(rng):
    assert random_up_set(4, STRONG, 0, rng) == PermSet.empty(4)
    assert random_up_set(4, STRONG, 1, rng) == PermSet.full(4)
    with pytest.raises(InputError):
        random_up_set(4, STRONG, 1.5, rng)
    for kind in KINDS:
        assert is_up_set(random_up_set(5, kind, 0.05, rng), kind)


def test_random_up_set_is_seeded():
    a = random_up_set(5, WEAK, 0.1, random.Random(7))
    b = random_up_set(5, WEAK, 0.1, random.Random(7))
    assert a == b
