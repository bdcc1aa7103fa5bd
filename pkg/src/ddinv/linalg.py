"""Dense numerical kernels: truncated pseudoinverses, kernels, spectra.

All singular-value cutoffs in this package are absolute: a singular value
``s`` counts as zero when ``s <= tol``. There is no relative mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

#: Default absolute cutoff for rank decisions.
RANK_TOL_DEFAULT = 1e-8
#: Default cutoff for the output-Hankel SVD.
Y_TRUNC_DEFAULT = 1e-4
#: Default cutoff for the reduced least-squares pseudoinverse.
LS_TRUNC_DEFAULT = 1e-3


@dataclass(frozen=True)
class ToleranceSet:
    """Absolute singular-value cutoffs used throughout the toolbox."""

    rank_tol: float = RANK_TOL_DEFAULT
    y_trunc: float = Y_TRUNC_DEFAULT
    ls_trunc: float = LS_TRUNC_DEFAULT

    def __post_init__(self):
        for name in ("rank_tol", "y_trunc", "ls_trunc"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise InvalidInputError(
                    f"{name} must be a nonnegative finite real, got {value!r}"
                )


def _as_matrix(M, name: str = "M") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return M


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not np.isfinite(tol) or tol < 0.0:
        raise InvalidInputError(f"tol must be a nonnegative finite real, got {tol!r}")
    return tol


def truncated_pinv(M, tol: float) -> np.ndarray:
    """Moore-Penrose pseudoinverse with singular values <= tol zeroed."""
    M = _as_matrix(M)
    tol = _check_tol(tol)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    keep = s > tol
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (Vt.T * s_inv) @ U.T


def numerical_rank(M, tol: float) -> int:
    """Number of singular values strictly greater than tol."""
    M = _as_matrix(M)
    tol = _check_tol(tol)
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol))


def nullspace_basis(M, tol: float) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of M.

    Returns the right singular vectors whose singular value is <= tol,
    as columns of a width(M) x (width(M) - rank) matrix.
    """
    M = _as_matrix(M)
    tol = _check_tol(tol)
    cols = M.shape[1]
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    sigma = np.zeros(cols)
    sigma[: s.size] = s
    return Vt.T[:, sigma <= tol]


def kernel_projector(M, tol: float) -> np.ndarray:
    """Orthogonal projector onto ker(M), built from the kernel basis.

    Computed as V_null @ V_null.T rather than I - pinv(M) @ M, which is
    prone to cancellation when M is ill conditioned.
    """
    V_null = nullspace_basis(M, tol)
    return V_null @ V_null.T


def _as_square(M, name: str = "M") -> np.ndarray:
    M = _as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {M.shape}")
    return M


def eigenvalues(M) -> np.ndarray:
    """Full complex spectrum of a square real matrix, with multiplicity."""
    M = _as_square(M)
    return np.linalg.eigvals(M)


def spectral_radius(M) -> float:
    """Largest eigenvalue modulus of a square real matrix."""
    ev = eigenvalues(M)
    if ev.size == 0:
        return 0.0
    return float(np.max(np.abs(ev)))
