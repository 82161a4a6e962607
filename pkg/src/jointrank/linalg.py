"""Dense SVD and the three interchangeable diagonal-scaling strategies.

The correspondence-analysis target matrix is

    T = D_r^(-1/2) (P - r c^T) D_c^(-1/2)

where P is the correspondence matrix (data over grand total) and r, c its
row and column margins. Three strategies build T (and the row principal
coordinates F = D_r^(-1/2) U S):

* ``full_diagonal``   -- materializes dense diagonal matrices and uses
  matrix products. Deliberately memory-hungry; benchmark baseline.
* ``sparse_diagonal`` -- stores the diagonals as scipy sparse matrices.
* ``vectorized``      -- loops over columns with elementwise multiplies,
  never forming any diagonal matrix. Default everywhere outside the
  benchmark.

All three agree elementwise to ~1e-15; a cross-strategy tolerance of
1e-12 is asserted in the tests.

If an ``alloc_stats`` dict is passed to a strategy it records
``scaling_scratch_elements``: the number of array elements allocated for
the scaling structures themselves (the dense diagonals for the full
strategy, the diagonal/vector storage otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInput, NumericalFailure, ZeroMargin

# Singular values below this fraction of the largest are snapped to zero
# so rank decisions are stable on degenerate inputs.
SINGULAR_VALUE_CUTOFF = 1e-12


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``A = U diag(s) V^T`` with deterministic column signs."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.singular_values))


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInput(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix contains NaN or Inf")
    return A


def svd(A) -> SvdResult:
    """Thin SVD with a fixed sign convention.

    The largest-magnitude entry of each left singular vector is forced
    non-negative (the corresponding right vector is flipped with it), so
    results are deterministic across platforms and scaling strategies.
    """
    A = _as_matrix(A)
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc

    # Deterministic signs: pivot on the largest-magnitude entry per column.
    pivots = np.abs(U).argmax(axis=0)
    signs = np.sign(U[pivots, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U = U * signs
    Vt = Vt * signs[:, None]

    if s.size and s[0] > 0:
        s = np.where(s < SINGULAR_VALUE_CUTOFF * s[0], 0.0, s)

    for arr in (U, s, Vt):
        arr.setflags(write=False)
    return SvdResult(U=U, singular_values=s, V=Vt.T)


def _check_ca_inputs(P, r, c):
    P = _as_matrix(P)
    r = np.asarray(r, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if r.shape != (P.shape[0],) or c.shape != (P.shape[1],):
        raise InvalidInput("margin lengths do not match P")
    zr = np.flatnonzero(r <= 0.0)
    if zr.size:
        raise ZeroMargin("row", int(zr[0]))
    zc = np.flatnonzero(c <= 0.0)
    if zc.size:
        raise ZeroMargin("column", int(zc[0]))
    return P, r, c


def correspondence_matrix(N) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P = N / grand total, with its row and column margins r, c."""
    N = _as_matrix(N)
    if np.any(N < 0):
        raise InvalidInput("count matrix has negative entries")
    total = N.sum()
    if total <= 0:
        raise InvalidInput("count matrix sums to zero")
    P = N / total
    return P, P.sum(axis=1), P.sum(axis=0)


def ca_target_full_diagonal(P, r, c, alloc_stats=None) -> np.ndarray:
    """Standardized residuals via dense diagonal matrices (naive baseline)."""
    P, r, c = _check_ca_inputs(P, r, c)
    m, p = P.shape
    Dr = np.diag(1.0 / np.sqrt(r))
    Dc = np.diag(1.0 / np.sqrt(c))
    if alloc_stats is not None:
        alloc_stats["scaling_scratch_elements"] = m * m + p * p
    return Dr @ (P - np.outer(r, c)) @ Dc


def ca_target_sparse_diagonal(P, r, c, alloc_stats=None) -> np.ndarray:
    """Standardized residuals with the diagonals held as sparse matrices."""
    P, r, c = _check_ca_inputs(P, r, c)
    rsp = sp.diags(1.0 / np.sqrt(r))
    csp = sp.diags(1.0 / np.sqrt(c))
    if alloc_stats is not None:
        alloc_stats["scaling_scratch_elements"] = r.size + c.size
    return rsp @ (P - np.outer(r, c)) @ csp


def ca_target_vectorized(P, r, c, alloc_stats=None) -> np.ndarray:
    """Standardized residuals via a column loop; no diagonal matrices."""
    P, r, c = _check_ca_inputs(P, r, c)
    rsq = 1.0 / np.sqrt(r)
    csq = 1.0 / np.sqrt(c)
    if alloc_stats is not None:
        alloc_stats["scaling_scratch_elements"] = r.size + c.size
    T = P.copy()
    for j in range(T.shape[1]):
        col = T[:, j]
        col -= r * c[j]
        col *= rsq
        col *= csq[j]
    return T


def principal_coordinates(svd_result: SvdResult, row_scale=None) -> np.ndarray:
    """Row principal coordinates F[i, j] = U[i, j] * s[j] / sqrt(scale[i]).

    ``row_scale`` defaults to the uniform mass 1/m, giving
    F = sqrt(m) * U * diag(s).
    """
    U = svd_result.U
    s = svd_result.singular_values
    m = U.shape[0]
    if row_scale is None:
        row_scale = np.full(m, 1.0 / m)
    else:
        row_scale = np.asarray(row_scale, dtype=np.float64)
        if row_scale.shape != (m,):
            raise InvalidInput("row_scale length does not match U")
    bad = np.flatnonzero(row_scale <= 0.0)
    if bad.size:
        raise ZeroMargin("row", int(bad[0]))
    return (U * s) / np.sqrt(row_scale)[:, None]


CA_TARGET_STRATEGIES = {
    "full": ca_target_full_diagonal,
    "sparse": ca_target_sparse_diagonal,
    "vectorized": ca_target_vectorized,
}
