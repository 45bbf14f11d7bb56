"""AP selection and user clustering driven by large-scale fading."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .geometry import LargeScaleMap


@dataclass(frozen=True)
class ApSelection:
    serving_sets: tuple       # serving_sets[k]: sorted AP indices serving user k
    g_bar: np.ndarray         # (N, K) sparse effective channel
    l_per_user: int

    def mask(self):
        """Boolean ``(N, K)`` map of AP-user serving relations."""
        n, k = self.g_bar.shape
        m = np.zeros((n, k), dtype=bool)
        for user, aps in enumerate(self.serving_sets):
            m[list(aps), user] = True
        return m


@dataclass(frozen=True)
class UserClusters:
    clusters: tuple                # clusters[k]: ascending user indices, k included
    selection_matrices: tuple      # U_k, shape (|P_k|, K)
    n_a: int
    max_cluster_size: int

    def q_index(self, k):
        """Row of ``U_k`` whose single one sits in column ``k``."""
        return self.clusters[k].index(k)


def serving_sets(zeta, l):
    """The ``l`` strongest APs per user; ties go to the lower AP index."""
    z = zeta.zeta if isinstance(zeta, LargeScaleMap) else np.asarray(zeta)
    n_aps = z.shape[0]
    if not 1 <= l <= n_aps:
        raise InvalidArgumentError(f"l must lie in [1, {n_aps}], got {l}")
    order = np.argsort(-z, axis=0, kind="stable")[:l]
    return tuple(tuple(sorted(int(i) for i in order[:, k])) for k in range(z.shape[1]))


def sparse_channel(g_hat, sets):
    """Zero every estimate entry whose AP does not serve the user."""
    g_bar = np.zeros_like(g_hat)
    for k, aps in enumerate(sets):
        idx = list(aps)
        g_bar[idx, k] = g_hat[idx, k]
    return g_bar


def select_aps(zeta, g_hat, l):
    sets = serving_sets(zeta, l)
    return ApSelection(sets, sparse_channel(g_hat, sets), int(l))


def selection_matrix(cluster, k_total):
    """Binary row selector; row ``j`` picks the ``j``-th lowest index."""
    idx = list(cluster)
    if not idx:
        raise InvalidArgumentError("cluster is empty")
    if any(i < 0 or i >= k_total for i in idx):
        raise InvalidArgumentError(f"cluster {idx} has indices outside [0, {k_total})")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise InvalidArgumentError(f"cluster {idx} must be strictly ascending")
    u = np.zeros((len(idx), k_total))
    u[np.arange(len(idx)), idx] = 1.0
    return u


def build_user_clusters(selection, n_a=1, max_size=10):
    """Greedy user clusters built around each user.

    Candidates are scanned by decreasing number of APs shared with user
    ``k`` (ties by index) and admitted only when they share at least ``n_a``
    APs with every member already in the cluster.
    """
    if n_a < 1 or max_size < 1:
        raise InvalidArgumentError("n_a and max_size must be at least 1")
    sets = selection.serving_sets if isinstance(selection, ApSelection) else selection
    n_users = len(sets)
    as_sets = [frozenset(s) for s in sets]
    shared = np.array([[len(a & b) for b in as_sets] for a in as_sets], dtype=int)

    clusters = []
    for k in range(n_users):
        members = [k]
        candidates = sorted((i for i in range(n_users) if i != k),
                            key=lambda i: (-shared[k, i], i))
        for i in candidates:
            if len(members) >= max_size:
                break
            if all(shared[i, j] >= n_a for j in members):
                members.append(i)
        clusters.append(tuple(sorted(members)))

    mats = tuple(selection_matrix(c, n_users) for c in clusters)
    return UserClusters(tuple(clusters), mats, int(n_a), int(max_size))


def reduce_channel(u_k, g_bar):
    """``U_k @ g_bar.T``: the cluster's rows of the transposed channel."""
    u_k = np.asarray(u_k)
    if u_k.ndim != 2 or u_k.shape[1] != g_bar.shape[1]:
        raise InvalidArgumentError(
            f"selection matrix {u_k.shape} does not match channel {g_bar.shape}")
    # rows of U_k are standard basis vectors
    rows = np.argmax(u_k, axis=1)
    return g_bar.T[rows]
