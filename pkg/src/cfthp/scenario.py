"""A fixed network drop plus everything needed to draw channels on it."""

from dataclasses import dataclass

import numpy as np

from .clustering import build_user_clusters, serving_sets, sparse_channel
from .errors import InvalidArgumentError
from .geometry import (LargeScaleMap, NetworkLayout, large_scale_coefficients,
                       noise_variance, place_network, power_for_snr, tau_for)
from .precoders import (BETA_MODES, Modulation, Structure, Variant, mf_precoder, rd_precoder,
                        thp_precoder, zf_precoder, zf_rd_precoder)
from .rng import Stream, complex_normal, stream

FAMILIES = ("MF", "ZF", "cTHP", "dTHP")
DEFAULT_LABELS = ("MF-NW", "ZF-NW", "ZF-SP", "ZF-RD",
                "cTHP-SP", "dTHP-SP", "cTHP-RD", "dTHP-RD")


def parse_label(label):
    """Split ``"dTHP-SP"`` into ``("dTHP", Variant.SP)``."""
    family, sep, variant = str(label).partition("-")
    if not sep or family not in FAMILIES or variant not in Variant.__members__:
        raise InvalidArgumentError(f"unknown precoder label {label!r}")
    if family == "MF" and variant == "RD":
        raise InvalidArgumentError("MF has no reduced-dimension variant")
    return family, Variant(variant)


@dataclass(frozen=True)
class Scenario:
    layout: NetworkLayout
    large_scale: LargeScaleMap
    serving_sets: tuple
    clusters: object
    sigma_n2: float
    l_aps: int
    beta_mode: str = "power"
    square_beta_d: bool = True
    tau_mode: str = "paper"
    sinr_form: str = "exact"
    modulation: str = "QPSK"

    @property
    def zeta(self):
        return self.large_scale.zeta

    @property
    def shape(self):
        return self.zeta.shape

    def tau(self, sigma_e):
        return tau_for(sigma_e, self.tau_mode)

    def outer_draw(self, index, seed, sigma_e2, snr_db):
        """Channel estimate and transmit power for one outer Monte Carlo draw.

        Returns ``(g_hat, p_t)``.  The small-scale draw and the estimation
        noise come from streams keyed by ``index`` only, so the same draw is
        reused across SNR points, CSIT levels and precoders.
        """
        sigma_e = float(np.sqrt(sigma_e2))
        if not 0 <= sigma_e < 1:
            raise InvalidArgumentError(f"sigma_e^2 must lie in [0, 1), got {sigma_e2}")
        amp = np.sqrt(self.zeta)
        h = complex_normal(stream(seed, Stream.SMALL_SCALE, index), self.shape)
        h0 = complex_normal(stream(seed, Stream.ESTIMATE, index), self.shape)
        g_hat = amp * (np.sqrt(1.0 - sigma_e2) * h + sigma_e * h0)
        return g_hat, power_for_snr(snr_db, g_hat, self.sigma_n2)

    def error_draws(self, index, seed, sigma_e2, n_inner):
        """``n_inner`` independent error matrices, shape ``(n_inner, N, K)``."""
        h_err = complex_normal(stream(seed, Stream.ERROR, index), (n_inner,) + self.shape)
        return np.sqrt(sigma_e2) * np.sqrt(self.zeta)[None] * h_err

    def build_precoder(self, label, g_hat, p_t):
        family, variant = parse_label(label)
        g_bar = g_hat if variant is Variant.NW else sparse_channel(g_hat, self.serving_sets)
        if family == "MF":
            return mf_precoder(g_bar.T, p_t, variant)
        if family == "ZF":
            if variant is Variant.RD:
                return zf_rd_precoder(g_bar, self.clusters, p_t)
            return zf_precoder(g_bar.T, p_t, variant)
        structure = Structure.CENTRALIZED if family == "cTHP" else Structure.DECENTRALIZED
        if variant is Variant.RD:
            return rd_precoder(g_bar, self.clusters, structure, p_t, self.beta_mode,
                               self.modulation)
        return thp_precoder(g_bar.T, structure, p_t, variant, self.beta_mode, self.modulation)


def build_scenario(config):
    """Materialize the network drop described by a ``ScenarioConfig``."""
    if config.beta_mode not in BETA_MODES:
        raise InvalidArgumentError(f"unknown beta mode {config.beta_mode!r}")
    tau_for(0.0, config.tau_mode)
    if config.sinr_form not in ("exact", "paper"):
        raise InvalidArgumentError(f"unknown SINR form {config.sinr_form!r}")
    layout = place_network(config.n_aps, config.n_users, config.side_m, config.seed,
                           config.f_mhz, config.h_ap, config.h_u)
    lsf = large_scale_coefficients(layout, config.shadow_sigma_db, config.d0_m,
                                   config.d1_m, config.seed)
    sets = serving_sets(lsf, config.l_aps)
    clusters = build_user_clusters(sets, config.n_a, config.cluster_max)
    sigma_n2 = noise_variance(config.t0_k, config.kb, config.bandwidth_hz,
                              config.noise_figure_db)
    return Scenario(layout, lsf, sets, clusters, sigma_n2, config.l_aps,
                    config.beta_mode, config.square_beta_d, config.tau_mode,
                    config.sinr_form, Modulation(config.modulation).value)
