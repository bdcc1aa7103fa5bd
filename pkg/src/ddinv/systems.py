"""Benchmark systems with fixed invariant-zero configurations.

Three minimal, invertible two-input two-output four-state systems that differ
only in where their invariant zeros sit: strictly inside the unit circle, no
zeros at all, or one zero outside. Every generator re-validates its zero
configuration, minimality, and invertibility before returning, so tests built
on these systems cannot silently drift.
"""

from __future__ import annotations

import numpy as np

from .linalg import RANK_TOL_DEFAULT, numerical_rank
from .lti import StateSpaceModel, inherent_delay, invariant_zeros

STABLE_ZEROS = "stable-zeros"
NO_ZEROS = "no-zeros"
UNSTABLE_ZERO = "unstable-zero"


def _controllability(model: StateSpaceModel) -> np.ndarray:
    blocks = []
    M = model.B
    for _ in range(model.n):
        blocks.append(M)
        M = model.A @ M
    return np.hstack(blocks)


def _observability(model: StateSpaceModel) -> np.ndarray:
    blocks = []
    M = model.C
    for _ in range(model.n):
        blocks.append(M)
        M = M @ model.A
    return np.vstack(blocks)


def _validate(model: StateSpaceModel, expected_zeros: list[complex], name: str,
              exact: bool = True) -> StateSpaceModel:
    if numerical_rank(_controllability(model), RANK_TOL_DEFAULT) != model.n:
        raise RuntimeError(f"benchmark {name!r} is not controllable")
    if numerical_rank(_observability(model), RANK_TOL_DEFAULT) != model.n:
        raise RuntimeError(f"benchmark {name!r} is not observable")
    delay = inherent_delay(model)
    if delay is None:
        raise RuntimeError(f"benchmark {name!r} is not invertible for L <= n")
    zeros = invariant_zeros(model)
    hits_expected = zeros.size > 0 and all(
        np.min(np.abs(zeros - z)) <= 1e-8 for z in expected_zeros
    )
    if exact:
        ok = zeros.size == 0 if not expected_zeros else (
            zeros.size == len(expected_zeros) and hits_expected
        )
    else:
        ok = hits_expected
    if not ok:
        raise RuntimeError(
            f"benchmark {name!r} has zeros {zeros}, expected {expected_zeros}"
        )
    return model


def stable_zeros_system() -> StateSpaceModel:
    """Two decoupled channels with transmission zeros at 0.7 and 0.8."""
    model = StateSpaceModel(
        A=np.array([
            [0.5, 1.0, 0.0, 0.0],
            [0.0, 0.6, 0.0, 0.0],
            [0.0, 0.0, 0.3, 1.0],
            [0.0, 0.0, 0.0, 0.4],
        ]),
        B=np.array([
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 0.0],
            [0.0, 1.0],
        ]),
        C=np.array([
            [-1.0, 5.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 2.0],
        ]),
        D=np.zeros((2, 2)),
    )
    return _validate(model, [0.7, 0.8], STABLE_ZEROS)


def no_zeros_system() -> StateSpaceModel:
    """Strongly observable system: the zero pencil never loses rank."""
    model = StateSpaceModel(
        A=np.array([
            [0.25, 0.25, 0.0, 0.5],
            [0.5, 0.0, 0.0, 0.25],
            [-0.25, -0.25, 0.0, 0.0],
            [0.25, 0.25, 0.0, 0.0],
        ]),
        B=np.array([
            [0.0, -1.0],
            [0.0, 0.0],
            [0.0, 1.0],
            [-1.0, 0.0],
        ]),
        C=np.array([
            [1.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, -1.0, 0.0],
        ]),
        D=np.zeros((2, 2)),
    )
    return _validate(model, [], NO_ZEROS)


def unstable_zero_system() -> StateSpaceModel:
    """Same state map as the no-zeros system but with a zero at 1.25."""
    model = StateSpaceModel(
        A=np.array([
            [0.25, 0.25, 0.0, 0.5],
            [0.5, 0.0, 0.0, 0.25],
            [-0.25, -0.25, 0.0, 0.0],
            [0.25, 0.25, 0.0, 0.0],
        ]),
        B=np.array([
            [2.0, -2.0],
            [-1.0, 2.0],
            [2.0, 0.0],
            [0.0, -1.0],
        ]),
        C=np.array([
            [2.0, 1.0, 1.0, -2.0],
            [0.0, -1.0, -2.0, -2.0],
        ]),
        D=np.zeros((2, 2)),
    )
    return _validate(model, [1.25], UNSTABLE_ZERO, exact=False)


SYSTEM_GENERATORS = {
    STABLE_ZEROS: stable_zeros_system,
    NO_ZEROS: no_zeros_system,
    UNSTABLE_ZERO: unstable_zero_system,
}
