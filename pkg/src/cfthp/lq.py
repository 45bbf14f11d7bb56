"""LQ factorization of wide complex matrices."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SingularFactorizationError

RANK_TOL = 1e-12


@dataclass(frozen=True)
class LqFactors:
    l_mat: np.ndarray   # (K, K) lower triangular, real nonnegative diagonal
    q_mat: np.ndarray   # (K, N) orthonormal rows


def lq_decompose(m, tol=RANK_TOL):
    """Factor a ``K x N`` matrix (``K <= N``) as ``m = L @ Q``.

    Computed from a Householder QR of ``m^H`` restricted to the columns of
    ``m`` that are not identically zero; those columns of ``Q`` are exactly
    zero, which keeps sparse channels sparse.  The diagonal of ``L`` is made
    real and nonnegative.

    Raises
    ------
    SingularFactorizationError
        If some ``|l_ii|`` falls below ``tol`` times the norm of row ``i``.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise InvalidArgumentError(f"expected a matrix, got shape {m.shape}")
    k, n = m.shape
    if k > n:
        raise InvalidArgumentError(f"LQ needs K <= N, got {k}x{n}")

    active = np.flatnonzero(np.any(m != 0, axis=0))
    if active.size < k:
        raise SingularFactorizationError(
            f"only {active.size} nonzero columns for {k} rows", row=int(active.size))
    q_r, r = np.linalg.qr(m[:, active].conj().T)

    diag = np.diagonal(r)
    mag = np.abs(diag)
    phase = np.where(mag > 0, diag / np.where(mag > 0, mag, 1.0), 1.0)
    r = phase.conj()[:, None] * r
    q_r = q_r * phase[None, :]

    row_norms = np.linalg.norm(m, axis=1)
    bad = np.flatnonzero(mag <= tol * row_norms)
    if bad.size:
        i = int(bad[0])
        raise SingularFactorizationError(
            f"row {i} is linearly dependent on the rows before it "
            f"(|l_ii| = {mag[i]:.3e}, row norm {row_norms[i]:.3e})", row=i)

    l_mat = np.tril(r.conj().T)
    l_mat[np.diag_indices(k)] = mag
    q = np.zeros((k, n), dtype=np.result_type(m.dtype, np.complex128))
    q[:, active] = q_r.conj().T
    return LqFactors(l_mat, q)
