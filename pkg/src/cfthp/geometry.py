"""Network geometry, fading and noise models.

Channels are stored AP-major: ``g[n, k]`` is the coefficient between AP
``n`` and user ``k`` (shape ``(N, K)``).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .rng import Stream, as_generator, complex_normal

BOLTZMANN = 1.381e-23


@dataclass(frozen=True)
class NetworkLayout:
    ap_positions: np.ndarray
    user_positions: np.ndarray
    side_length: float
    f_mhz: float = 1900.0
    h_ap: float = 15.0
    h_u: float = 1.65

    @property
    def n_aps(self):
        return self.ap_positions.shape[0]

    @property
    def n_users(self):
        return self.user_positions.shape[0]

    def distances(self):
        """Planar AP-to-user distances in meters, shape ``(N, K)``."""
        diff = self.ap_positions[:, None, :] - self.user_positions[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])


@dataclass(frozen=True)
class LargeScaleMap:
    zeta: np.ndarray
    shadow_sigma_db: float = 8.0
    d0: float = 10.0
    d1: float = 50.0


@dataclass(frozen=True)
class ChannelSet:
    g_true: np.ndarray
    g_hat: np.ndarray
    g_err: np.ndarray
    sigma_e: float
    tau: float


@dataclass(frozen=True)
class NoiseModel:
    t0: float = 290.0
    kb: float = BOLTZMANN
    bandwidth: float = 50e6
    noise_figure_db: float = 10.0
    sigma_n2: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "sigma_n2",
            noise_variance(self.t0, self.kb, self.bandwidth, self.noise_figure_db))


def place_network(n_aps, n_users, side, seed, f_mhz=1900.0, h_ap=15.0, h_u=1.65):
    """Drop APs and users i.i.d. uniformly over ``[0, side]^2``."""
    if n_aps < 1 or n_users < 1:
        raise InvalidArgumentError("need at least one AP and one user")
    if not side > 0:
        raise InvalidArgumentError(f"side must be positive, got {side}")
    rng = as_generator(seed, Stream.LAYOUT)
    aps = rng.uniform(0.0, side, size=(n_aps, 2))
    users = rng.uniform(0.0, side, size=(n_users, 2))
    return NetworkLayout(aps, users, float(side), f_mhz, h_ap, h_u)


def attenuation_constant(f_mhz, h_ap, h_u):
    """Frequency/height dependent attenuation constant in dB (f in MHz)."""
    if f_mhz <= 0 or h_ap <= 0 or h_u <= 0:
        raise InvalidArgumentError("frequency and heights must be positive")
    lf = np.log10(f_mhz)
    return (46.3 + 33.9 * lf - 13.82 * np.log10(h_ap)
            - (1.1 * lf - 0.7) * h_u + (1.56 * lf - 0.8))


def path_loss_db(d, L, d0=10.0, d1=50.0):
    """Three-slope path loss in dB (negative numbers).

    Works elementwise on arrays.  Distances at or below ``d0`` are clamped
    to the ``d0`` value, so ``d = 0`` is finite.
    """
    if not 0 < d0 < d1:
        raise InvalidArgumentError(f"need 0 < d0 < d1, got d0={d0}, d1={d1}")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise InvalidArgumentError("distances must be nonnegative")
    with np.errstate(divide="ignore"):
        far = -L - 35.0 * np.log10(d)
        mid = -L - 15.0 * np.log10(d1) - 20.0 * np.log10(d)
    near = -L - 15.0 * np.log10(d1) - 20.0 * np.log10(d0)
    out = np.where(d > d1, far, np.where(d > d0, mid, near))
    return out if out.ndim else float(out)


def large_scale_coefficients(layout, shadow_sigma_db=8.0, d0=10.0, d1=50.0, seed=None):
    """Path loss plus log-normal shadowing, as a linear power gain map.

    Both terms are combined in dB before conversion:
    ``zeta = 10 ** ((PL_dB + sigma * z) / 10)`` with ``z ~ N(0, 1)``.
    """
    L = attenuation_constant(layout.f_mhz, layout.h_ap, layout.h_u)
    pl = path_loss_db(layout.distances(), L, d0, d1)
    if shadow_sigma_db:
        z = as_generator(seed, Stream.SHADOWING).standard_normal(pl.shape)
    else:
        z = np.zeros_like(pl)
    zeta = 10.0 ** ((pl + shadow_sigma_db * z) / 10.0)
    return LargeScaleMap(zeta, float(shadow_sigma_db), float(d0), float(d1))


def _zeta(zeta):
    return zeta.zeta if isinstance(zeta, LargeScaleMap) else np.asarray(zeta, dtype=float)


def draw_channel(zeta, seed):
    """Rayleigh small-scale fading on top of ``zeta``; returns ``(h, g)``."""
    z = _zeta(zeta)
    h = complex_normal(as_generator(seed, Stream.SMALL_SCALE), z.shape)
    return h, np.sqrt(z) * h


def tau_for(sigma_e, mode="paper"):
    """Scale factor linking the estimate, the error and the true channel.

    ``"paper"`` gives ``sqrt(1 + sigma_e^2)``; ``"consistent"`` gives
    ``sqrt(1 - sigma_e^2)``, the factor implied by the forward estimate model.
    """
    if mode == "paper":
        return float(np.sqrt(1.0 + sigma_e ** 2))
    if mode == "consistent":
        return float(np.sqrt(1.0 - sigma_e ** 2))
    raise InvalidArgumentError(f"unknown tau mode {mode!r}")


def draw_estimate(zeta, h, sigma_e, seed, tau_mode="paper"):
    """Imperfect CSI: ``g_hat = sqrt(zeta) (sqrt(1 - se^2) h + se h_err)``."""
    if not 0 <= sigma_e < 1:
        raise InvalidArgumentError(f"sigma_e must lie in [0, 1), got {sigma_e}")
    z = _zeta(zeta)
    amp = np.sqrt(z)
    if sigma_e == 0:
        g = amp * h
        return ChannelSet(g, g.copy(), np.zeros_like(g), 0.0, tau_for(0.0, tau_mode))
    h_err = complex_normal(as_generator(seed, Stream.ESTIMATE), z.shape)
    g_err = sigma_e * amp * h_err
    g_hat = amp * (np.sqrt(1.0 - sigma_e ** 2) * h) + g_err
    return ChannelSet(amp * h, g_hat, g_err, float(sigma_e), tau_for(sigma_e, tau_mode))


def noise_variance(t0=290.0, kb=BOLTZMANN, bandwidth=50e6, nf_db=10.0):
    """Thermal noise power in watts, noise figure given in dB."""
    if t0 <= 0 or kb <= 0 or bandwidth <= 0:
        raise InvalidArgumentError("noise parameters must be positive")
    return t0 * kb * bandwidth * 10.0 ** (nf_db / 10.0)


def snr(p_t, g, sigma_n2):
    """Average per-link SNR, ``P_t ||G||_F^2 / (N K sigma_n^2)``."""
    if sigma_n2 == 0:
        raise ZeroDivisionError("noise variance is zero")
    n, k = g.shape
    return p_t * float(np.sum(np.abs(g) ** 2)) / (n * k * sigma_n2)


def power_for_snr(snr_db, g, sigma_n2):
    """Transmit power placing channel ``g`` exactly at ``snr_db``."""
    n, k = g.shape
    energy = float(np.sum(np.abs(g) ** 2))
    if energy == 0:
        raise InvalidArgumentError("channel has zero energy")
    return 10.0 ** (snr_db / 10.0) * n * k * sigma_n2 / energy
