"""Dense real linear algebra used by the estimators.

Matrices and vectors are plain float64 :class:`numpy.ndarray` objects.
:func:`as_matrix` and :func:`as_vector` are the validating constructors;
every public routine here runs its operands through them, so NaN/Inf and
ragged shapes are rejected at the boundary.

The module provides an SVD-based Moore-Penrose pseudo-inverse and the two
rank-update inverse identities (Woodbury, Sherman-Morrison).
"""

import numpy as np

from .errors import DataError, NumericalError, ShapeError, SingularMatrixError, SingularUpdateError

__all__ = [
    "DEFAULT_DENOMINATOR_FLOOR",
    "WOODBURY_COND_LIMIT",
    "as_matrix",
    "as_vector",
    "default_rcond",
    "pseudo_inverse",
    "pinv_with_rank",
    "woodbury_inverse",
    "sherman_morrison_update",
    "symmetrize",
]

DEFAULT_DENOMINATOR_FLOOR = 1e-12
WOODBURY_COND_LIMIT = 1e12


def as_matrix(m, name="matrix"):
    """Return `m` as a finite 2-D float64 array (copied, never aliased)."""
    try:
        arr = np.array(m, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"{name}: cannot convert to a real matrix ({exc})") from None
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name}: expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name}: entries must be finite")
    return arr


def as_vector(v, name="vector"):
    """Return `v` as a finite 1-D float64 array (copied, never aliased)."""
    try:
        arr = np.array(v, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"{name}: cannot convert to a real vector ({exc})") from None
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size < 1:
        raise ShapeError(f"{name}: expected a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name}: entries must be finite")
    return arr


def _square(m, name):
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name}: expected a square matrix, got shape {m.shape}")
    return m.shape[0]


def default_rcond(shape):
    """Machine epsilon scaled by the larger dimension."""
    return np.finfo(np.float64).eps * max(shape)


def pinv_with_rank(m, rcond=None):
    """Pseudo-inverse of `m` together with its numerical rank.

    Singular values ``s_i <= rcond * s_max`` are treated as exact zeros.
    """
    m = as_matrix(m)
    if rcond is None:
        rcond = default_rcond(m.shape)
    if rcond < 0 or not np.isfinite(rcond):
        raise ValueError(f"rcond must be a finite nonnegative number, got {rcond}")
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from None
    cutoff = rcond * (s[0] if s.size else 0.0)
    keep = s > cutoff
    rank = int(np.count_nonzero(keep))
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (vt.T * s_inv) @ u.T, rank


def pseudo_inverse(m, rcond=None):
    """Moore-Penrose pseudo-inverse computed from a thin SVD.

    Parameters
    ----------
    m : array_like, shape (r, c)
        Finite real matrix.
    rcond : float, optional
        Relative cutoff; singular values ``<= rcond * max(s)`` are dropped.
        Defaults to ``eps * max(r, c)``.

    Returns
    -------
    ndarray, shape (c, r)

    Raises
    ------
    NumericalError
        If LAPACK's SVD fails to converge.
    """
    return pinv_with_rank(m, rcond)[0]


def woodbury_inverse(a_inv, u, c, v, cond_limit=WOODBURY_COND_LIMIT):
    """Return ``(A + U C V)^-1`` given ``A^-1`` via the Woodbury identity.

    Only m x m systems are solved, where m is the rank of the update
    (the column count of `u`).

    Raises
    ------
    SingularMatrixError
        If `c` or the capacitance matrix ``C^-1 + V A^-1 U`` has a condition
        number above `cond_limit`.
    """
    a_inv = as_matrix(a_inv, "a_inv")
    u = as_matrix(u, "u")
    c = as_matrix(c, "c")
    v = as_matrix(v, "v")
    n = _square(a_inv, "a_inv")
    m = _square(c, "c")
    if u.shape != (n, m) or v.shape != (m, n):
        raise ShapeError(
            f"incompatible shapes: a_inv {a_inv.shape}, u {u.shape}, c {c.shape}, v {v.shape}"
        )
    if np.linalg.cond(c) > cond_limit:
        raise SingularMatrixError("c is numerically singular")
    c_inv = np.linalg.inv(c)
    a_inv_u = a_inv @ u
    v_a_inv = v @ a_inv
    capacitance = c_inv + v @ a_inv_u
    if np.linalg.cond(capacitance) > cond_limit:
        raise SingularMatrixError("C^-1 + V A^-1 U is numerically singular")
    return a_inv - a_inv_u @ np.linalg.solve(capacitance, v_a_inv)


def sherman_morrison_update(a_inv, u, v, floor=DEFAULT_DENOMINATOR_FLOOR):
    """Return ``(A + u v^T)^-1`` from ``A^-1`` in O(n^2) work.

    Raises :class:`SingularUpdateError` when ``|1 + v^T A^-1 u| < floor``,
    i.e. when ``A + u v^T`` is numerically singular.
    """
    a_inv = as_matrix(a_inv, "a_inv")
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    n = _square(a_inv, "a_inv")
    if u.size != n or v.size != n:
        raise ShapeError(f"u and v must have dimension {n}, got {u.size} and {v.size}")
    a_inv_u = a_inv @ u
    v_a_inv = v @ a_inv
    denom = 1.0 + v @ a_inv_u
    if abs(denom) < floor:
        raise SingularUpdateError(f"|1 + v^T A^-1 u| = {abs(denom):.3e} is below floor {floor:.1e}")
    return a_inv - np.outer(a_inv_u, v_a_inv) / denom


def symmetrize(m):
    """Return ``(M + M^T) / 2``; the result is exactly symmetric."""
    m = as_matrix(m)
    _square(m, "m")
    return (m + m.T) / 2.0
