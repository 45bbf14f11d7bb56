"""Scenario configuration files.

Grammar: INI-style sections of ``key = value`` lines, ``#`` or ``;``
comments, lists as comma-separated values, booleans ``true``/``false``.
Unknown sections or keys are rejected so typos fail loudly.

    [network]      n_aps, n_users, side_m, f_mhz, h_ap, h_u
    [channel]      shadow_sigma_db, d0_m, d1_m, sigma_e2, tau_mode
    [noise]        t0_k, kb, bandwidth_hz, noise_figure_db
    [clustering]   l_aps, cluster_max, n_a
    [precoding]    precoders, modulation, beta_mode, square_beta_d, sinr_form
    [sweep]        snr_grid_db, csit_grid, csit_snr_db
    [monte_carlo]  n_outer, n_inner, seed
    [output]       output_dir
"""

import configparser
import dataclasses
import hashlib
import io
from dataclasses import dataclass, fields

from .errors import InvalidArgumentError
from .scenario import DEFAULT_LABELS, parse_label

SECTIONS = {
    "network": ("n_aps", "n_users", "side_m", "f_mhz", "h_ap", "h_u"),
    "channel": ("shadow_sigma_db", "d0_m", "d1_m", "sigma_e2", "tau_mode"),
    "noise": ("t0_k", "kb", "bandwidth_hz", "noise_figure_db"),
    "clustering": ("l_aps", "cluster_max", "n_a"),
    "precoding": ("precoders", "modulation", "beta_mode", "square_beta_d", "sinr_form"),
    "sweep": ("snr_grid_db", "csit_grid", "csit_snr_db"),
    "monte_carlo": ("n_outer", "n_inner", "seed"),
    "output": ("output_dir",),
}


@dataclass(frozen=True)
class ScenarioConfig:
    n_aps: int = 128
    n_users: int = 24
    side_m: float = 20000.0
    f_mhz: float = 1900.0
    h_ap: float = 15.0
    h_u: float = 1.65
    shadow_sigma_db: float = 8.0
    d0_m: float = 10.0
    d1_m: float = 50.0
    sigma_e2: float = 0.01
    tau_mode: str = "paper"
    t0_k: float = 290.0
    kb: float = 1.381e-23
    bandwidth_hz: float = 50e6
    noise_figure_db: float = 10.0
    l_aps: int = 24
    cluster_max: int = 10
    n_a: int = 1
    precoders: tuple = DEFAULT_LABELS
    modulation: str = "QPSK"
    beta_mode: str = "power"
    square_beta_d: bool = True
    sinr_form: str = "exact"
    snr_grid_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    csit_grid: tuple = (0.0, 0.01, 0.05, 0.1, 0.2)
    csit_snr_db: float = 15.0
    n_outer: int = 100
    n_inner: int = 100
    seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "precoders", tuple(str(p) for p in self.precoders))
        for name in ("snr_grid_db", "csit_grid"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        self.validate()

    def validate(self):
        for name in ("n_aps", "n_users", "l_aps", "cluster_max", "n_a", "n_outer", "n_inner"):
            if getattr(self, name) < 1:
                raise InvalidArgumentError(f"{name} must be positive")
        if self.l_aps > self.n_aps:
            raise InvalidArgumentError("l_aps cannot exceed n_aps")
        if self.cluster_max > self.n_users:
            raise InvalidArgumentError("cluster_max cannot exceed n_users")
        if not self.side_m > 0:
            raise InvalidArgumentError("side_m must be positive")
        if not 0 <= self.sigma_e2 < 1 or any(not 0 <= v < 1 for v in self.csit_grid):
            raise InvalidArgumentError("sigma_e^2 values must lie in [0, 1)")
        if not self.precoders:
            raise InvalidArgumentError("at least one precoder label is required")
        for label in self.precoders:
            parse_label(label)
        if self.seed < 0:
            raise InvalidArgumentError("seed must be nonnegative")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_text(self):
        """Canonical text form; parsing it gives back an equal config."""
        parser = configparser.ConfigParser(interpolation=None)
        for section, keys in SECTIONS.items():
            parser[section] = {key: _format(getattr(self, key)) for key in keys}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def digest(self):
        """SHA-256 over the canonical text minus the output location."""
        text = self.replace(output_dir="").to_text()
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    @classmethod
    def from_text(cls, text):
        parser = configparser.ConfigParser(interpolation=None)
        parser.read_string(text)
        types = {f.name: f for f in fields(cls)}
        values = {}
        for section in parser.sections():
            if section not in SECTIONS:
                raise InvalidArgumentError(f"unknown config section [{section}]")
            for key, raw in parser[section].items():
                if key not in SECTIONS[section]:
                    raise InvalidArgumentError(f"unknown key {key!r} in [{section}]")
                values[key] = _parse(raw, types[key].default)
        return cls(**values)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(raw, default):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            return parse_bool(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            items = [item.strip() for item in raw.split(",") if item.strip()]
            if default and isinstance(default[0], float):
                return tuple(float(item) for item in items)
            return tuple(items)
    except ValueError as exc:
        raise InvalidArgumentError(f"cannot parse {raw!r}: {exc}") from None
    return raw


def parse_bool(raw):
    value = str(raw).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise InvalidArgumentError(f"not a boolean: {raw!r}")
