"""Block Hankel matrices, data partitions, and excitation checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentTrajectoryError, InvalidInputError
from .linalg import RANK_TOL_DEFAULT, numerical_rank, truncated_pinv


@dataclass(frozen=True)
class HankelBundle:
    """Partitioned offline-data matrices.

    ``Up`` holds the first m*N rows of the depth-(N+L+1) input Hankel matrix
    and ``UfL`` the last m*(L+1); ``Uf`` is the first m rows of ``UfL``.
    ``Yp`` / ``YfL`` partition the output Hankel matrix the same way and
    ``Y`` is their vertical stack. All blocks share T+1 columns.
    """

    Up: np.ndarray
    Uf: np.ndarray
    UfL: np.ndarray
    Yp: np.ndarray
    YfL: np.ndarray
    Y: np.ndarray
    N: int
    L: int
    T: int
    m: int
    p: int


def _as_signal(signal, name: str = "signal") -> np.ndarray:
    sig = np.asarray(signal, dtype=float)
    if sig.ndim == 1:
        sig = sig.reshape(-1, 1)
    if sig.ndim != 2:
        raise InvalidInputError(f"{name} must be a sequence of vectors, got shape {sig.shape}")
    if not np.all(np.isfinite(sig)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return sig


def block_hankel(signal, depth: int) -> np.ndarray:
    """Block Hankel matrix of the given depth.

    For a signal of q-vectors with length len, the result has shape
    (q*depth, len-depth+1) with block entry (i, j) equal to signal[i+j].
    """
    sig = _as_signal(signal)
    if depth < 1:
        raise InvalidInputError(f"depth must be positive, got {depth}")
    length, q = sig.shape
    if length < depth:
        raise InvalidInputError(
            f"signal length {length} is shorter than depth {depth}"
        )
    cols = length - depth + 1
    H = np.empty((q * depth, cols))
    for i in range(depth):
        H[i * q : (i + 1) * q, :] = sig[i : i + cols].T
    return H


def is_persistently_exciting(signal, order: int, tol: float = RANK_TOL_DEFAULT) -> bool:
    """True iff the depth-``order`` block Hankel matrix has full row rank."""
    sig = _as_signal(signal)
    if order < 1:
        raise InvalidInputError(f"order must be positive, got {order}")
    if len(sig) < order:
        raise InvalidInputError(
            f"signal length {len(sig)} too short for excitation order {order}"
        )
    H = block_hankel(sig, order)
    return numerical_rank(H, tol) == sig.shape[1] * order


def partition_data(u_d, y_d, N: int, L: int) -> HankelBundle:
    """Slice depth-(N+L+1) Hankel matrices of recorded data into past/future."""
    u = _as_signal(u_d, "u_d")
    y = _as_signal(y_d, "y_d")
    if len(u) != len(y):
        raise InvalidInputError(
            f"u_d and y_d must have equal length, got {len(u)} and {len(y)}"
        )
    if N < 1:
        raise InvalidInputError(f"N must be positive, got {N}")
    if L < 0:
        raise InvalidInputError(f"L must be nonnegative, got {L}")
    depth = N + L + 1
    if len(u) < depth:
        raise InvalidInputError(
            f"need at least N+L+1 = {depth} samples, got {len(u)}"
        )
    m = u.shape[1]
    p = y.shape[1]
    T = len(u) - depth
    Hu = block_hankel(u, depth)
    Hy = block_hankel(y, depth)
    UfL = Hu[m * N :, :]
    return HankelBundle(
        Up=Hu[: m * N, :],
        Uf=UfL[:m, :],
        UfL=UfL,
        Yp=Hy[: p * N, :],
        YfL=Hy[p * N :, :],
        Y=Hy,
        N=N,
        L=L,
        T=T,
        m=m,
        p=p,
    )


def one_shot_inversion(
    bundle: HankelBundle,
    u_past,
    y_past,
    y_future,
    tol: float = RANK_TOL_DEFAULT,
    residual_rtol: float = 1e-6,
) -> np.ndarray:
    """One-shot data-driven inversion from exactly known past inputs.

    Solves [Up; Yp; YfL] g = [u_past; y_past; y_future] by truncated-SVD
    least squares and returns Uf @ g. When the right-hand side is a genuine
    trajectory window of the data-generating system this equals the true
    input at the window's pivot step, which makes it a test utility for the
    exact-knowledge baseline. A residual above residual_rtol * ||rhs||
    raises InconsistentTrajectoryError.
    """
    u_past = np.asarray(u_past, dtype=float).reshape(-1)
    y_past = np.asarray(y_past, dtype=float).reshape(-1)
    y_future = np.asarray(y_future, dtype=float).reshape(-1)
    expected = (bundle.m * bundle.N, bundle.p * bundle.N, bundle.p * (bundle.L + 1))
    got = (u_past.size, y_past.size, y_future.size)
    if got != expected:
        raise InvalidInputError(
            f"window sizes {got} do not match bundle partition {expected}"
        )
    H_L = np.vstack([bundle.Up, bundle.Y])
    rhs = np.concatenate([u_past, y_past, y_future])
    g = truncated_pinv(H_L, tol) @ rhs
    residual = float(np.linalg.norm(H_L @ g - rhs))
    if residual > residual_rtol * float(np.linalg.norm(rhs)):
        raise InconsistentTrajectoryError(
            f"window is not a trajectory of the offline data: residual "
            f"{residual:.3e} exceeds {residual_rtol:.1e} * ||rhs||",
            residual=residual,
        )
    return bundle.Uf @ g
