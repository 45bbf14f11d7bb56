"""Fast built-in sanity checks behind ``cfthp selftest``."""

import numpy as np

from .config import ScenarioConfig
from .lq import lq_decompose
from .metrics import ergodic_sum_rate, simulate_symbol_chain
from .precoders import (Structure, effective_precoder, feedback_encode, lambda_for,
                        modulo, thp_filters)
from .rng import complex_normal
from .scenario import build_scenario


def _lq(rng):
    worst = 0.0
    for _ in range(50):
        k = int(rng.integers(1, 9))
        m = complex_normal(rng, (k, int(rng.integers(k, 33))))
        f = lq_decompose(m)
        worst = max(worst, np.linalg.norm(f.l_mat @ f.q_mat - m) / np.linalg.norm(m),
                    np.linalg.norm(f.q_mat @ f.q_mat.conj().T - np.eye(k)))
    return worst < 1e-10, f"max residual {worst:.1e}"


def _cancellation(rng):
    g_t = complex_normal(rng, (8, 32))
    worst = 0.0
    for structure in Structure.CENTRALIZED, Structure.DECENTRALIZED:
        filt = thp_filters(g_t, structure, 1.0)
        eff = effective_precoder(filt)
        lhs = g_t @ eff.p_mat
        if structure is Structure.DECENTRALIZED:
            lhs = filt.c_mat @ lhs
        worst = max(worst, np.linalg.norm(lhs - np.eye(8)))
    return worst < 1e-9, f"residual {worst:.1e}"


def _modulo(rng):
    lam = lambda_for("QPSK")
    v = 10 * complex_normal(rng, 1000)
    m = modulo(v, lam)
    ok = np.all((m.real >= -lam / 2) & (m.real < lam / 2) & (m.imag >= -lam / 2) & (m.imag < lam / 2))
    return bool(ok), "range [-lam/2, lam/2)"


def _lattice(rng):
    lam = lambda_for("QPSK")
    b = np.tril(complex_normal(rng, (6, 6)), -1) * 3 + np.eye(6)
    s = complex_normal(rng, (6, 200))
    s_brev, d = feedback_encode(s, b, lam)
    off = (b @ s_brev - s) / lam
    dev = np.max(np.abs(off - np.round(off)))
    return dev < 1e-9, f"lattice deviation {dev:.1e}"


def _chain(_):
    cfg = ScenarioConfig(n_aps=16, n_users=4, l_aps=4, cluster_max=2, seed=3)
    sc = build_scenario(cfg)
    sers = [simulate_symbol_chain(sc, s, "QPSK", 2000, 3, noiseless=True)
            for s in ("centralized", "decentralized")]
    return max(sers) == 0.0, f"noiseless SER {sers}"


def _esr(_):
    cfg = ScenarioConfig(n_aps=16, n_users=4, l_aps=4, cluster_max=2, seed=5)
    sc = build_scenario(cfg)
    rep = ergodic_sum_rate(sc, "dTHP-SP", snr_db=10, sigma_e2=0.01, n_outer=4,
                           n_inner=4, seed=5)
    again = ergodic_sum_rate(sc, "dTHP-SP", snr_db=10, sigma_e2=0.01, n_outer=4,
                             n_inner=4, seed=5)
    return rep.esr == again.esr and rep.esr > 0, f"ESR {rep.esr:.3f} reproducible"


CHECKS = (
    ("lq factorization", _lq),
    ("perfect-CSI cancellation", _cancellation),
    ("modulo range", _modulo),
    ("feedback lattice", _lattice),
    ("noiseless symbol chain", _chain),
    ("ergodic sum-rate determinism", _esr),
)


def run(seed=0, echo=print):
    rng = np.random.default_rng(seed)
    failures = 0
    for name, check in CHECKS:
        try:
            ok, detail = check(rng)
        except Exception as exc:  # report and continue
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += not ok
        echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return failures
