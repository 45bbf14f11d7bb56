"""SNR and CSIT-quality sweeps over a set of precoders."""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .metrics import ergodic_sum_rate
from .output import RunWriter
from .scenario import build_scenario

log = logging.getLogger(__name__)

SNR = "snr"
CSIT = "csit"


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    label: str
    esr: float
    esr_stderr: float
    excluded_fraction: float


@dataclass(frozen=True)
class SweepResult:
    kind: str
    rows: tuple
    seed: int
    config_hash: str
    n_outer: int
    n_inner: int

    @property
    def labels(self):
        return tuple(dict.fromkeys(r.label for r in self.rows))

    def series(self, label):
        return [r for r in self.rows if r.label == label]

    def esr(self, label, value):
        for r in self.rows:
            if r.label == label and r.sweep_value == value:
                return r.esr
        raise KeyError((label, value))


def sweep_points(config, kind):
    """``(snr_db, sigma_e2)`` for every point of the sweep axis."""
    if kind == SNR:
        return [(v, v, config.sigma_e2) for v in config.snr_grid_db]
    if kind == CSIT:
        return [(v, config.csit_snr_db, v) for v in config.csit_grid]
    raise ValueError(f"unknown sweep kind {kind!r}")


def _evaluate(scenario, config, label, snr_db, sigma_e2):
    return ergodic_sum_rate(scenario, label, snr_db=snr_db, sigma_e2=sigma_e2,
                            n_outer=config.n_outer, n_inner=config.n_inner,
                            seed=config.seed)


def _worker(args):
    config, label, snr_db, sigma_e2 = args
    return _evaluate(build_scenario(config), config, label, snr_db, sigma_e2)


def run_sweep(config, kind, workers=1):
    """Evaluate every (sweep point, precoder) pair.

    Tasks are independent and seeded by draw index only, so the result is
    the same for any ``workers``.
    """
    points = sweep_points(config, kind)
    tasks = [(value, label, snr_db, sigma_e2)
             for (value, snr_db, sigma_e2), label in itertools.product(points, config.precoders)]
    log.info("%s sweep: %d points x %d precoders, %dx%d draws", kind, len(points),
             len(config.precoders), config.n_outer, config.n_inner)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_worker, [(config, l, s, e) for _, l, s, e in tasks]))
    else:
        scenario = build_scenario(config)
        reports = [_evaluate(scenario, config, l, s, e) for _, l, s, e in tasks]

    rows = tuple(SweepRow(float(value), label, rep.esr, rep.esr_stderr, rep.excluded_fraction)
                 for (value, label, _, _), rep in zip(tasks, reports))
    return SweepResult(kind, rows, config.seed, config.digest(), config.n_outer, config.n_inner)


def run_snr_sweep(config, workers=1, output_dir=None):
    return _run_and_write(config, SNR, workers, output_dir)


def run_csit_sweep(config, workers=1, output_dir=None):
    return _run_and_write(config, CSIT, workers, output_dir)


def _run_and_write(config, kind, workers, output_dir):
    if output_dir is None:
        return run_sweep(config, kind, workers)
    # fails on an unwritable path before any Monte Carlo work starts
    writer = RunWriter(output_dir, config, kind)
    result = run_sweep(config, kind, workers)
    writer.finish(result)
    return result
