import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncsbm.group import cyclic_group
from syncsbm.metrics import RecoveryDistances, dist_c, dist_g, misclassified_fraction, trial_success

TRUTH = np.array([1, 1, 1, 2, 2, 2])


def test_dist_c_examples():
    assert dist_c(TRUTH, TRUTH) == 0
    assert dist_c(3 - TRUTH, TRUTH) == 0
    assert dist_c([1, 1, 2, 1, 2, 2], TRUTH) == 1


def test_dist_c_length_mismatch():
    with pytest.raises(ValueError):
        dist_c([1, 2], TRUTH)


def test_dist_g_examples():
    G = cyclic_group(4)
    g_star = np.array([0, 1, 2, 3, 1, 2])
    assert dist_g(g_star, g_star, TRUTH, G) == 0
    h = 3
    shifted = G.compose_table[g_star, h]
    # recovering g* needs offset h^{-1} applied on the right
    assert dist_g(shifted, g_star, TRUTH, G) == 0
    assert np.array_equal(G.compose_table[shifted, G.inverse(h)], g_star)


def test_dist_g_one_flip_z2():
    G = cyclic_group(2)
    g_star = np.array([0, 1, 0, 1, 1, 0])
    g = g_star.copy()
    g[4] ^= 1
    # brute force both offsets per cluster
    expect = 0
    for members in (TRUTH == 1, TRUTH == 2):
        ok = any(all(g_star[i] == (g[i] + o) % 2 for i in np.nonzero(members)[0]) for o in range(2))
        expect += 0 if ok else 1
    assert expect == 1
    assert dist_g(g, g_star, TRUTH, G) == 1


def test_dist_g_right_offset_nonabelian(s3):
    g_star = np.array([0, 1, 2, 3, 4, 5])
    h = 3
    right = np.array([s3.compose(x, h) for x in g_star])
    assert dist_g(right, g_star, TRUTH, s3) == 0
    left = np.array([s3.compose(h, x) for x in g_star])
    # a left offset is not absorbed by the right-offset gauge
    assert dist_g(left, g_star, TRUTH, s3) > 0


def test_dist_g_trivial_group():
    G = cyclic_group(1)
    assert dist_g(np.zeros(6, int), np.zeros(6, int), TRUTH, G) == 0


@pytest.mark.parametrize("d, expect", [((0, 0), (True, True)), ((1, 2), (False, False)), ((0, 1), (True, False))])
def test_trial_success(d, expect):
    assert trial_success(RecoveryDistances(*d)) == expect


def test_misclassified_fraction():
    assert misclassified_fraction(3 - TRUTH, TRUTH) == 0.0
    assert misclassified_fraction([1, 1, 2, 1, 2, 2], TRUTH) == pytest.approx(1 / 3)


balanced = st.integers(2, 8).flatmap(
    lambda h: st.permutations([1] * h + [2] * h).map(np.array)
)


@settings(max_examples=200, deadline=None)
@given(balanced, st.data())
def test_dist_c_swap_invariance(kappa, data):
    other = np.array(data.draw(st.permutations(kappa.tolist())))
    d = dist_c(kappa, other)
    assert dist_c(3 - kappa, other) == d
    assert dist_c(kappa, 3 - other) == d
    assert d in (0, 1)


@settings(max_examples=200, deadline=None)
@given(balanced, st.integers(1, 6), st.data())
def test_dist_g_offset_invariance(kappa, M, data):
    G = cyclic_group(M)
    n = kappa.size
    g = np.array(data.draw(st.lists(st.integers(0, M - 1), min_size=n, max_size=n)))
    g_star = np.array(data.draw(st.lists(st.integers(0, M - 1), min_size=n, max_size=n)))
    o1, o2 = data.draw(st.integers(0, M - 1)), data.draw(st.integers(0, M - 1))
    shifted = np.where(kappa == 1, G.compose_table[g, o1], G.compose_table[g, o2])
    d = dist_g(g, g_star, kappa, G)
    assert dist_g(shifted, g_star, kappa, G) == d
    assert d in (0, 1, 2)
    if M == 1:
        assert d == 0
