"""Tomlinson-Harashima and linear precoders.

Conventions: ``g_bar_t`` is the ``K x N`` transposed (sparse) channel
estimate, received signals are ``y = G^T x + n`` with a plain transpose,
and every precoder is returned as an ``N x K`` matrix ``P`` together with a
power scaling ``beta`` so that the transmit vector is ``beta * P @ v``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import ndtr

from .clustering import reduce_channel
from .errors import InvalidArgumentError, SingularFactorizationError
from .lq import lq_decompose


class Structure(str, Enum):
    CENTRALIZED = "centralized"
    DECENTRALIZED = "decentralized"
    LINEAR = "linear"


class Variant(str, Enum):
    NW = "NW"
    SP = "SP"
    RD = "RD"


class Modulation(str, Enum):
    QPSK = "QPSK"
    QAM16 = "QAM16"


BETA_MODES = ("power", "unit", "paper")


@dataclass(frozen=True)
class ThpFilterSet:
    f_mat: np.ndarray        # (N, K) feedforward, orthonormal columns
    c_mat: np.ndarray        # (K, K) real diagonal, 1 / l_kk
    b_mat: np.ndarray        # (K, K) unit lower triangular feedback
    beta: float
    structure: Structure
    l_mat: np.ndarray
    symbol_power: np.ndarray  # predicted E|s_brev_k|^2 used for beta

    @property
    def c_diag(self):
        return np.diagonal(self.c_mat).copy()

    def transmit(self, s_brev):
        """Map encoded symbols ``(K, ...)`` to AP signals ``(N, ...)``."""
        if self.structure is Structure.CENTRALIZED:
            s_brev = self.c_diag.reshape((-1,) + (1,) * (s_brev.ndim - 1)) * s_brev
        return self.beta * (self.f_mat @ s_brev)


@dataclass(frozen=True)
class EffectivePrecoder:
    p_mat: np.ndarray        # (N, K), column k serves user k
    structure: Structure
    variant: Variant
    per_user_c: np.ndarray   # c_kk seen by user k (ones for linear precoders)
    beta: float

    @property
    def label(self):
        family = {Structure.CENTRALIZED: "cTHP", Structure.DECENTRALIZED: "dTHP"}
        return f"{family.get(self.structure, 'LIN')}-{self.variant.value}"


def _structure(structure):
    try:
        return Structure(structure)
    except ValueError:
        raise InvalidArgumentError(f"unknown structure {structure!r}") from None


def _folded_second_moment(mean, var, lam):
    """``E[w^2]`` for ``w`` the fold of ``N(mean, var)`` into ``[-lam/2, lam/2)``."""
    if var <= 0:
        w = mean - np.floor(mean / lam + 0.5) * lam
        return float(w * w)
    sd = np.sqrt(var)
    reach = int(np.ceil((abs(mean) + 10.0 * sd) / lam)) + 1
    images = mean - lam * np.arange(-reach, reach + 1)
    zl = (-lam / 2 - images) / sd
    zh = (lam / 2 - images) / sd
    mass = ndtr(zh) - ndtr(zl)
    pdf_l = np.exp(-0.5 * zl * zl) / np.sqrt(2 * np.pi)
    pdf_h = np.exp(-0.5 * zh * zh) / np.sqrt(2 * np.pi)
    moment = (images ** 2 * mass + 2 * images * sd * (pdf_l - pdf_h)
              + var * (mass + zl * pdf_l - zh * pdf_h))
    return float(np.sum(moment))


def encoded_power(b_mat, modulation=Modulation.QPSK):
    """Predicted ``E|s_brev_k|^2`` for each stream after modulo folding.

    The feedback interference on stream ``k`` is modelled as circular
    Gaussian with power ``sum_i |b_ki|^2 E|s_brev_i|^2``; each real
    dimension of the symbol minus that interference is then folded.
    Weak feedback gives the constellation power (one), strong feedback the
    uniform-over-the-fold value ``lam^2 / 6``.
    """
    lam = lambda_for(modulation)
    levels = np.unique(constellation(modulation).real)
    b2 = np.abs(np.asarray(b_mat)) ** 2
    k = b2.shape[0]
    power = np.empty(k)
    for i in range(k):
        var = float(b2[i, :i] @ power[:i]) / 2.0 if i else 0.0
        per_dim = np.mean([_folded_second_moment(a, var, lam) for a in levels])
        power[i] = 2.0 * per_dim
    return power


def thp_beta(c_diag, p_t, structure, mode="power", symbol_power=None):
    """Transmit power scaling for a THP with stream weights ``c_diag``.

    ``"power"`` meets ``E||x||^2 = P_t`` using the per-stream encoded
    symbol powers ``symbol_power``; ``"unit"`` does the same treating those
    powers as one.  Centralized transmission radiates ``sum c_kk^2 p_k``,
    decentralized ``sum p_k``.  ``"paper"`` takes ``sqrt(P_t / K)`` for
    centralized and ``sqrt(P_t / sum c_kk^2)`` for decentralized as given;
    with physical channel gains it overshoots the budget by many decades.
    """
    structure = _structure(structure)
    c2 = np.asarray(c_diag, dtype=float) ** 2
    k = len(c2)
    if mode == "paper":
        denom = k if structure is Structure.CENTRALIZED else float(np.sum(c2))
        return float(np.sqrt(p_t / denom))
    if mode == "unit" or symbol_power is None:
        if mode not in ("unit", "power"):
            raise InvalidArgumentError(f"unknown beta mode {mode!r}")
        symbol_power = np.ones(k)
    weights = c2 if structure is Structure.CENTRALIZED else np.ones(k)
    return float(np.sqrt(p_t / float(np.sum(weights * symbol_power))))


def thp_filters(g_bar_t, structure, p_t, beta_mode="power", modulation=Modulation.QPSK):
    """Feedforward, scaling and feedback filters from the LQ of ``g_bar_t``."""
    structure = _structure(structure)
    if structure is Structure.LINEAR:
        raise InvalidArgumentError("THP filters need a centralized or decentralized structure")
    if beta_mode not in BETA_MODES:
        raise InvalidArgumentError(f"unknown beta mode {beta_mode!r}")
    lq = lq_decompose(g_bar_t)
    c_diag = 1.0 / np.real(np.diagonal(lq.l_mat))
    c_mat = np.diag(c_diag)
    if structure is Structure.CENTRALIZED:
        b_mat = lq.l_mat * c_diag[None, :]
    else:
        b_mat = c_diag[:, None] * lq.l_mat
    b_mat[np.diag_indices_from(b_mat)] = 1.0
    sym_power = encoded_power(b_mat, modulation) if beta_mode == "power" else None
    beta = thp_beta(c_diag, p_t, structure, beta_mode, sym_power)
    return ThpFilterSet(lq.q_mat.conj().T, c_mat, b_mat, beta, structure, lq.l_mat,
                        sym_power if sym_power is not None else np.ones(len(c_diag)))


def modulo(v, lam):
    """Fold real and imaginary parts into ``[-lam/2, lam/2)``."""
    if not lam > 0:
        raise InvalidArgumentError(f"modulo constant must be positive, got {lam}")
    v = np.asarray(v, dtype=complex)
    re = v.real - np.floor(v.real / lam + 0.5) * lam
    im = v.imag - np.floor(v.imag / lam + 0.5) * lam
    out = re + 1j * im
    return out if out.ndim else complex(out)


def lambda_for(modulation):
    """Modulo constant for unit-variance QPSK / 16-QAM."""
    try:
        modulation = Modulation(modulation)
    except ValueError:
        raise InvalidArgumentError(f"unsupported modulation {modulation!r}") from None
    if modulation is Modulation.QPSK:
        return 2.0 * np.sqrt(2.0)
    return 4.0 * np.sqrt(10.0) / 5.0


def constellation(modulation):
    """Unit average energy constellation points."""
    modulation = Modulation(modulation)
    if modulation is Modulation.QPSK:
        levels = np.array([-1.0, 1.0])
    else:
        levels = np.array([-3.0, -1.0, 1.0, 3.0])
    pts = (levels[:, None] + 1j * levels[None, :]).ravel()
    return pts / np.sqrt(np.mean(np.abs(pts) ** 2))


def feedback_encode(s, b_mat, lam):
    """Successive interference pre-subtraction with modulo folding.

    Parameters
    ----------
    s : array, shape (K,) or (K, M)
        Data symbols, one column per symbol vector.
    b_mat : array, shape (K, K)
        Unit-diagonal lower-triangular feedback filter.
    lam : float
        Modulo constant.

    Returns
    -------
    s_brev : array like ``s``
        Encoded symbols.
    d : array like ``s``
        Lattice perturbation with ``b_mat @ s_brev == s + d``.
    """
    s = np.asarray(s, dtype=complex)
    b_mat = np.asarray(b_mat)
    k = s.shape[0]
    if b_mat.shape != (k, k):
        raise InvalidArgumentError(f"feedback filter {b_mat.shape} does not match {k} streams")
    s_brev = np.empty_like(s)
    d = np.empty_like(s)
    for i in range(k):
        u = s[i] - np.tensordot(b_mat[i, :i], s_brev[:i], axes=1) if i else s[i]
        s_brev[i] = modulo(u, lam)
        d[i] = s_brev[i] - u
    return s_brev, d


def effective_precoder(filters, variant=Variant.NW):
    """``F C B^{-1}`` (centralized) or ``F B^{-1}`` (decentralized)."""
    f = filters.f_mat
    if filters.structure is Structure.CENTRALIZED:
        f = f * filters.c_diag[None, :]
    # P B = F'  <=>  B^T P^T = F'^T
    p_mat = solve_triangular(filters.b_mat.T, f.T, lower=False, unit_diagonal=True).T
    return EffectivePrecoder(p_mat, filters.structure, Variant.NW,
                             filters.c_diag, filters.beta)


def thp_precoder(g_bar_t, structure, p_t, variant=Variant.SP, beta_mode="power",
                 modulation=Modulation.QPSK):
    """Network-wide or sparse THP precoder built on ``g_bar_t``."""
    filters = thp_filters(g_bar_t, structure, p_t, beta_mode, modulation)
    eff = effective_precoder(filters)
    return EffectivePrecoder(eff.p_mat, eff.structure, Variant(variant),
                             eff.per_user_c, eff.beta)


def _per_cluster(g_bar, clusters, column_for):
    n, k = g_bar.shape
    p_mat = np.zeros((n, k), dtype=complex)
    extra = [None] * k
    for user in range(k):
        g_k = reduce_channel(clusters.selection_matrices[user], g_bar)
        q = clusters.q_index(user)
        try:
            p_mat[:, user], extra[user] = column_for(g_k, q)
        except SingularFactorizationError as exc:
            raise SingularFactorizationError(
                f"cluster of user {user} {list(clusters.clusters[user])}: {exc}",
                row=exc.row, cluster=user) from exc
    return p_mat, extra


def rd_precoder(g_bar, clusters, structure, p_t, beta_mode="power",
                modulation=Modulation.QPSK):
    """Reduced-dimension THP: one small THP per user cluster.

    Column ``k`` is the column of cluster ``k``'s effective precoder that
    belongs to user ``k``.  The power scaling reuses the SP rule with each
    user's own-cluster ``c_qq`` and encoded symbol power.
    """
    structure = _structure(structure)

    def column(g_k, q):
        filters = thp_filters(g_k, structure, 1.0, beta_mode, modulation)
        eff = effective_precoder(filters)
        return eff.p_mat[:, q], (eff.per_user_c[q], filters.symbol_power[q])

    p_mat, extra = _per_cluster(g_bar, clusters, column)
    c = np.array([e[0] for e in extra])
    sym_power = np.array([e[1] for e in extra]) if beta_mode == "power" else None
    beta = thp_beta(c, p_t, structure, beta_mode, sym_power)
    return EffectivePrecoder(p_mat, structure, Variant.RD, c, beta)


def _zf_matrix(g_bar_t):
    g_bar_t = np.asarray(g_bar_t)
    gram = g_bar_t @ g_bar_t.conj().T
    scale = np.sqrt(np.real(np.diagonal(gram)))
    if np.any(scale == 0):
        raise SingularFactorizationError("channel has an all-zero row")
    # equilibrate before the solve, user gains span many decades
    norm = gram / np.outer(scale, scale)
    if np.linalg.cond(norm) > 1e12:
        raise SingularFactorizationError("Gram matrix is singular")
    inv = np.linalg.solve(norm, np.eye(len(scale))) / np.outer(scale, scale)
    return g_bar_t.conj().T @ inv


def _linear(p_mat, p_t, variant):
    energy = float(np.sum(np.abs(p_mat) ** 2))
    if energy == 0:
        raise InvalidArgumentError("precoder has zero energy")
    return EffectivePrecoder(p_mat, Structure.LINEAR, Variant(variant),
                             np.ones(p_mat.shape[1]), float(np.sqrt(p_t / energy)))


def zf_precoder(g_bar_t, p_t, variant=Variant.NW):
    """Zero-forcing, ``P = G^* (G^T G^*)^{-1}``, scaled to total power ``p_t``."""
    return _linear(_zf_matrix(g_bar_t), p_t, variant)


def mf_precoder(g_bar_t, p_t, variant=Variant.NW):
    """Matched filter (maximum ratio) transmission, ``P = G^*``."""
    g_bar_t = np.asarray(g_bar_t)
    if not np.any(g_bar_t):
        raise InvalidArgumentError("matched filter needs a nonzero channel")
    return _linear(g_bar_t.conj().T.astype(complex), p_t, variant)


def zf_rd_precoder(g_bar, clusters, p_t):
    """Per-cluster zero-forcing, user ``k`` keeps its own column."""
    def column(g_k, q):
        return _zf_matrix(g_k)[:, q], 1.0

    p_mat, _ = _per_cluster(g_bar, clusters, column)
    return _linear(p_mat, p_t, Variant.RD)
