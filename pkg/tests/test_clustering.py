import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cfthp.clustering import (build_user_clusters, reduce_channel, select_aps,
                              selection_matrix, serving_sets, sparse_channel)
from cfthp.errors import InvalidArgumentError
from cfthp.geometry import LargeScaleMap


def test_serving_set_strongest_aps():
    assert serving_sets(np.array([[3.0], [1.0], [2.0]]), 2) == ((0, 2),)


def test_serving_set_ties_prefer_lower_index():
    z = np.array([[1.0], [2.0], [2.0], [2.0]])
    assert serving_sets(z, 2) == ((1, 2),)


def test_select_aps_zeroes_unserved_entries():
    zeta = np.array([[3.0, 1.0], [1.0, 3.0], [2.0, 2.0]])
    g = (np.arange(6).reshape(3, 2) + 1) * (1 + 1j)
    sel = select_aps(LargeScaleMap(zeta), g, 2)
    assert sel.serving_sets == ((0, 2), (1, 2))
    expected = g.copy()
    expected[1, 0] = 0
    expected[0, 1] = 0
    np.testing.assert_array_equal(sel.g_bar, expected)
    np.testing.assert_array_equal(sel.mask(), expected != 0)


@pytest.mark.parametrize("l", [0, 4])
def test_serving_sets_rejects_bad_l(l):
    with pytest.raises(InvalidArgumentError):
        serving_sets(np.ones((3, 2)), l)


@settings(max_examples=40)
@given(st.integers(2, 20), st.integers(1, 8), st.data())
def test_sparse_channel_keeps_l_entries_per_user(n, k, data):
    l = data.draw(st.integers(1, n))
    rng = np.random.default_rng(data.draw(st.integers(0, 1000)))
    zeta = rng.uniform(0.1, 1.0, (n, k))
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    sel = select_aps(zeta, g, l)
    assert np.all(np.count_nonzero(sel.g_bar, axis=0) == l)
    for user, aps in enumerate(sel.serving_sets):
        chosen = zeta[list(aps), user]
        others = np.delete(zeta[:, user], list(aps))
        assert others.size == 0 or chosen.min() >= others.max()


def test_identical_serving_sets_cap_cluster_at_lowest_indices():
    sets = tuple((0, 1, 2) for _ in range(12))
    uc = build_user_clusters(sets, n_a=1, max_size=10)
    assert uc.clusters[0] == tuple(range(10))
    assert uc.clusters[11] == tuple(range(9)) + (11,)
    assert all(len(c) == 10 for c in uc.clusters)


def test_n_a_above_l_gives_singletons():
    sets = ((0, 1), (0, 1), (1, 2))
    uc = build_user_clusters(sets, n_a=3, max_size=10)
    assert uc.clusters == ((0,), (1,), (2,))


def test_cluster_admission_requires_sharing_with_every_member():
    # user 0 shares with 1 and 2, but 1 and 2 share nothing
    sets = ((0, 1), (0, 5), (1, 6))
    uc = build_user_clusters(sets, n_a=1, max_size=10)
    assert uc.clusters[0] == (0, 1)
    assert uc.clusters[1] == (0, 1)
    assert uc.clusters[2] == (0, 2)


def test_cluster_q_index():
    uc = build_user_clusters(((0, 1), (3, 4), (0, 1)), n_a=1)
    assert uc.clusters[2] == (0, 2)
    assert uc.q_index(2) == 1
    assert uc.q_index(0) == 0
    np.testing.assert_array_equal(uc.selection_matrices[2], [[1, 0, 0], [0, 0, 1]])


def test_selection_matrix_example():
    u = selection_matrix((0, 2), 3)
    np.testing.assert_array_equal(u, [[1, 0, 0], [0, 0, 1]])
    np.testing.assert_array_equal(u @ u.T, np.eye(2))


@pytest.mark.parametrize("cluster", [(), (0, 3), (2, 0), (1, 1), (-1,)])
def test_selection_matrix_rejects_invalid(cluster):
    with pytest.raises(InvalidArgumentError):
        selection_matrix(cluster, 3)


@settings(max_examples=40)
@given(st.lists(st.integers(0, 15), min_size=1, max_size=16, unique=True))
def test_selection_matrix_is_row_orthonormal(idx):
    u = selection_matrix(sorted(idx), 16)
    np.testing.assert_array_equal(u @ u.T, np.eye(len(idx)))
    assert np.all(u.sum(axis=1) == 1)


def test_reduce_channel_matches_matrix_product():
    rng = np.random.default_rng(1)
    g_bar = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
    u = selection_matrix((1, 3), 4)
    np.testing.assert_array_equal(reduce_channel(u, g_bar), u @ g_bar.T)
    with pytest.raises(InvalidArgumentError):
        reduce_channel(selection_matrix((0,), 3), g_bar)


def test_sparse_channel_full_sets_is_identity():
    g = np.ones((3, 2), dtype=complex)
    np.testing.assert_array_equal(sparse_channel(g, ((0, 1, 2), (0, 1, 2))), g)
