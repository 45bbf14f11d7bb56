"""SINR, rates, ergodic sum-rate and a symbol-level check of the THP chain."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSinrError, InvalidArgumentError, SingularFactorizationError
from .precoders import (Modulation, Structure, constellation, feedback_encode,
                        lambda_for, modulo, thp_filters)
from .clustering import sparse_channel
from .rng import Stream, complex_normal, stream
from .scenario import parse_label


@dataclass(frozen=True)
class SinrBreakdown:
    signal: float
    self_distortion: float
    interference: float
    noise: float
    gamma: float


@dataclass(frozen=True)
class RateReport:
    per_user_avg_rate: np.ndarray
    esr: float
    esr_stderr: float
    n_outer: int
    n_inner: int
    excluded_fraction: float = 0.0
    label: str = ""


def _structure(structure):
    return Structure(structure)


def dg_term(g_err_k, p_k, c_kk, structure):
    """Self-distortion of user ``k``'s own stream caused by the CSI error."""
    a = complex(np.dot(g_err_k, p_k))
    if _structure(structure) is Structure.CENTRALIZED:
        return abs(a) ** 2 - 2.0 * a.real
    return c_kk ** 2 * abs(a) ** 2 - 2.0 * (c_kk * a).real


SINR_FORMS = ("exact", "paper")


def sinr(structure, g_err_k, p_cols, k, c_kk, beta, tau, sigma_n2,
         square_beta_d=True, form="exact"):
    """SINR of user ``k`` under a THP, conditioned on the error ``g_err_k``.

    With ``form="paper"`` the useful power is fixed at one and the
    self-distortion ``d_g`` (which may be negative) joins the denominator.
    ``form="exact"`` keeps ``1 + d_g``, the actual power of the own-stream
    gain, in the numerator.  Both agree when the error is zero.
    ``square_beta_d=False`` divides the decentralized noise term by
    ``beta`` instead of ``beta**2``.

    Raises
    ------
    DegenerateSinrError
        When the denominator is not positive.
    """
    structure = _structure(structure)
    if beta <= 0 or tau <= 0:
        raise InvalidArgumentError("beta and tau must be positive")
    if form not in SINR_FORMS:
        raise InvalidArgumentError(f"unknown SINR form {form!r}")
    leak = np.asarray(g_err_k) @ np.asarray(p_cols)
    others = float(np.sum(np.abs(leak) ** 2) - abs(leak[k]) ** 2)
    dg = dg_term(g_err_k, p_cols[:, k], c_kk, structure)
    if structure is Structure.CENTRALIZED:
        interference = others
        noise = tau ** 2 * sigma_n2 / beta ** 2
    else:
        interference = c_kk ** 2 * others
        noise = c_kk ** 2 * tau ** 2 * sigma_n2 / (beta ** 2 if square_beta_d else beta)
    if form == "paper":
        signal, denom = 1.0, dg + interference + noise
    else:
        signal, denom = 1.0 + dg, interference + noise
    if not denom > 0:
        raise DegenerateSinrError(f"SINR denominator {denom:.3e} for user {k}", denom)
    return SinrBreakdown(signal, dg, interference, noise, signal / denom)


def linear_sinr(g_true_k, p_cols, k, beta, sigma_n2):
    """SINR of user ``k`` for a linear precoder on the true channel."""
    m = np.asarray(g_true_k) @ np.asarray(p_cols)
    sig = beta ** 2 * abs(m[k]) ** 2
    interf = beta ** 2 * (float(np.sum(np.abs(m) ** 2)) - abs(m[k]) ** 2)
    return SinrBreakdown(sig, 0.0, interf, sigma_n2, sig / (interf + sigma_n2))


def instantaneous_rate(gamma):
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise InvalidArgumentError("SINR must be nonnegative")
    out = np.log2(1.0 + gamma)
    return out if out.ndim else float(out)


def thp_sinr_batch(g_err, precoder, tau, sigma_n2, square_beta_d=True, form="exact"):
    """Vectorized THP SINR over error draws ``g_err`` of shape ``(M, N, K)``.

    Returns ``(gamma, valid)``, both ``(M, K)``; ``gamma`` is NaN where the
    denominator is not positive.
    """
    a = np.einsum("mnk,nj->mkj", g_err, precoder.p_mat)
    own = np.einsum("mkk->mk", a)
    others = np.sum(np.abs(a) ** 2, axis=2) - np.abs(own) ** 2
    beta = precoder.beta
    if precoder.structure is Structure.CENTRALIZED:
        c = np.ones((1, own.shape[1]))
        noise = tau ** 2 * sigma_n2 / beta ** 2
    else:
        c = precoder.per_user_c[None, :]
        noise = c ** 2 * tau ** 2 * sigma_n2 / (beta ** 2 if square_beta_d else beta)
    dg = c ** 2 * np.abs(own) ** 2 - 2.0 * (c * own).real
    rest = c ** 2 * others + noise
    if form == "paper":
        num, denom = 1.0, dg + rest
    else:
        num, denom = 1.0 + dg, rest
    valid = denom > 0
    gamma = np.where(valid, num / np.where(valid, denom, 1.0), np.nan)
    return gamma, valid


def linear_sinr_batch(g_true, precoder, sigma_n2):
    """Vectorized linear-precoder SINR over true channels ``(M, N, K)``."""
    m = np.einsum("mnk,nj->mkj", g_true, precoder.p_mat)
    own = np.abs(np.einsum("mkk->mk", m)) ** 2
    others = np.sum(np.abs(m) ** 2, axis=2) - own
    b2 = precoder.beta ** 2
    return b2 * own / (b2 * others + sigma_n2)


def outer_rates(scenario, precoder, g_hat, g_err, sigma_e2):
    """Per-user conditional average rates for one channel estimate.

    Returns ``(rates, n_excluded)`` where ``rates`` has shape ``(K,)``.
    """
    tau = scenario.tau(float(np.sqrt(sigma_e2)))
    if precoder.structure is Structure.LINEAR:
        g_true = (g_hat[None] - g_err) / tau
        gamma = linear_sinr_batch(g_true, precoder, scenario.sigma_n2)
        return np.mean(np.log2(1.0 + gamma), axis=0), 0
    gamma, valid = thp_sinr_batch(g_err, precoder, tau, scenario.sigma_n2,
                                  scenario.square_beta_d, scenario.sinr_form)
    rates = np.where(valid, np.log2(1.0 + np.where(valid, gamma, 0.0)), 0.0)
    counts = valid.sum(axis=0)
    avg = np.where(counts > 0, rates.sum(axis=0) / np.maximum(counts, 1), 0.0)
    return avg, int(valid.size - counts.sum())


def ergodic_sum_rate(scenario, label, *, snr_db, sigma_e2, n_outer, n_inner, seed):
    """Nested Monte Carlo ergodic sum-rate for one precoder.

    The outer loop draws channel estimates and builds the precoder once
    per estimate; the inner loop redraws only the estimation error.  SINR
    draws with a nonpositive denominator are excluded and counted.
    """
    if n_outer < 1 or n_inner < 1:
        raise InvalidArgumentError("Monte Carlo counts must be at least 1")
    parse_label(label)
    k = scenario.shape[1]
    per_outer = np.empty((n_outer, k))
    excluded = 0
    for o in range(n_outer):
        g_hat, p_t = scenario.outer_draw(o, seed, sigma_e2, snr_db)
        try:
            precoder = scenario.build_precoder(label, g_hat, p_t)
        except SingularFactorizationError as exc:
            raise SingularFactorizationError(f"outer draw {o}: {exc}", row=exc.row,
                                             cluster=exc.cluster) from exc
        g_err = scenario.error_draws(o, seed, sigma_e2, n_inner)
        per_outer[o], bad = outer_rates(scenario, precoder, g_hat, g_err, sigma_e2)
        excluded += bad

    sums = per_outer.sum(axis=1)
    per_user = per_outer.mean(axis=0)
    stderr = float(np.std(sums, ddof=1) / np.sqrt(n_outer)) if n_outer > 1 else 0.0
    return RateReport(per_user, float(np.sum(per_user)), stderr, int(n_outer),
                      int(n_inner), excluded / (n_outer * n_inner * k), str(label))


def detect(r, modulation):
    """Nearest constellation point, elementwise."""
    pts = constellation(modulation)
    idx = np.argmin(np.abs(np.asarray(r)[..., None] - pts), axis=-1)
    return pts[idx]


def simulate_symbol_chain(scenario, structure, modulation, n_symbols, seed, *,
                          snr_db=15.0, sigma_e2=0.0, variant="NW", noiseless=False,
                          outer_index=0):
    """Symbol error rate of a THP link, end to end.

    Symbols are feedback-encoded with modulo folding, sent through the
    true channel plus AWGN, scaled at the receiver (``1/beta``, and ``C``
    for the decentralized structure), folded again and sliced.
    """
    if n_symbols < 1:
        raise InvalidArgumentError("need at least one symbol")
    structure = Structure(structure)
    modulation = Modulation(modulation)
    lam = lambda_for(modulation)

    g_hat, p_t = scenario.outer_draw(outer_index, seed, sigma_e2, snr_db)
    g_bar = g_hat if variant == "NW" else sparse_channel(g_hat, scenario.serving_sets)
    filters = thp_filters(g_bar.T, structure, p_t, scenario.beta_mode, modulation)
    if sigma_e2 > 0:
        g_err = scenario.error_draws(outer_index, seed, sigma_e2, 1)[0]
        g_true = (g_hat - g_err) / scenario.tau(float(np.sqrt(sigma_e2)))
    else:
        g_true = g_hat

    k = g_hat.shape[1]
    pts = constellation(modulation)
    sym_rng = stream(seed, Stream.SYMBOLS, outer_index)
    s = pts[sym_rng.integers(0, pts.size, size=(k, n_symbols))]
    s_brev, _ = feedback_encode(s, filters.b_mat, lam)
    x = filters.transmit(s_brev)
    y = g_true.T @ x
    if not noiseless:
        noise_rng = stream(seed, Stream.NOISE, outer_index)
        y = y + np.sqrt(scenario.sigma_n2) * complex_normal(noise_rng, y.shape)

    r = y / filters.beta
    if structure is Structure.DECENTRALIZED:
        r = filters.c_diag[:, None] * r
    s_hat = detect(modulo(r, lam), modulation)
    return float(np.mean(s_hat != s))
