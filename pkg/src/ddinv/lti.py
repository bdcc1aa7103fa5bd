"""Discrete-time LTI state-space models and model-based input reconstruction.

Provides simulation, stacked observability/invertibility matrices, invariant
zeros via the system matrix pencil, delayed left inverses, and the inverse
system used as a reconstruction oracle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    InvalidGainError,
    InvalidInputError,
    NoLeftInverseError,
    UnsupportedShapeError,
)
from .linalg import RANK_TOL_DEFAULT, numerical_rank, truncated_pinv

#: Generalized eigenvalues with modulus above this cap count as infinite.
ZERO_MODULUS_CAP = 1e8

#: Fixed seed for the deterministic row compression of tall pencils.
_COMPRESSION_SEED = 0x5EED


def _readonly(M) -> np.ndarray:
    M = np.array(M, dtype=float)
    M.setflags(write=False)
    return M


@dataclass(frozen=True)
class StateSpaceModel:
    """Quadruple (A, B, C, D) with x in R^n, u in R^m, y in R^p."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = _readonly(self.A)
        B = _readonly(self.B)
        C = _readonly(self.C)
        D = _readonly(self.D)
        for name, M in (("A", A), ("B", B), ("C", C), ("D", D)):
            if M.ndim != 2:
                raise InvalidInputError(f"{name} must be 2-D, got shape {M.shape}")
            if not np.all(np.isfinite(M)):
                raise InvalidInputError(f"{name} contains non-finite entries")
        n = A.shape[0]
        if A.shape != (n, n):
            raise InvalidInputError(f"A must be square, got shape {A.shape}")
        if B.shape[0] != n:
            raise InvalidInputError(f"B must have {n} rows, got {B.shape[0]}")
        if C.shape[1] != n:
            raise InvalidInputError(f"C must have {n} columns, got {C.shape[1]}")
        if D.shape != (C.shape[0], B.shape[1]):
            raise InvalidInputError(
                f"D must have shape {(C.shape[0], B.shape[1])}, got {D.shape}"
            )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class InverseSystemModel:
    """State-space realization mapping stacked outputs back to inputs."""

    A_tilde: np.ndarray
    B_tilde: np.ndarray
    C_tilde: np.ndarray
    D_tilde: np.ndarray
    L: int

    @property
    def n(self) -> int:
        return self.A_tilde.shape[0]

    @property
    def m(self) -> int:
        return self.C_tilde.shape[0]


class ZeroCategory(enum.Enum):
    NO_ZEROS = "no-zeros"
    ALL_STABLE = "all-stable"
    MARGINAL_OR_UNSTABLE = "marginal-or-unstable"


@dataclass(frozen=True)
class ZeroClassification:
    """Invariant zeros together with their stability category."""

    zeros: np.ndarray
    category: ZeroCategory
    max_modulus: float


@dataclass(frozen=True)
class Trajectory:
    """Paired input/output sequences, optionally with the state sequence."""

    inputs: np.ndarray
    outputs: np.ndarray
    states: np.ndarray | None = None

    def __post_init__(self):
        if len(self.inputs) != len(self.outputs):
            raise InvalidInputError(
                f"inputs and outputs must have equal length, got "
                f"{len(self.inputs)} and {len(self.outputs)}"
            )
        if self.states is not None and len(self.states) != len(self.inputs):
            raise InvalidInputError("states must have the same length as inputs")

    def __len__(self) -> int:
        return len(self.inputs)


def _as_signal(signal, width: int, name: str) -> np.ndarray:
    """Coerce a sequence of vectors to a (length, width) float array."""
    sig = np.asarray(signal, dtype=float)
    if sig.ndim == 1:
        if width == 1:
            sig = sig.reshape(-1, 1)
        else:
            raise InvalidInputError(f"{name} must be a sequence of {width}-vectors")
    if sig.ndim != 2 or sig.shape[1] != width:
        raise InvalidInputError(
            f"{name} must have shape (length, {width}), got {sig.shape}"
        )
    if not np.all(np.isfinite(sig)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return sig


def simulate(model: StateSpaceModel, x0, inputs) -> Trajectory:
    """Roll the state recursion forward from x0 under the given inputs."""
    u = _as_signal(inputs, model.m, "inputs")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.shape != (model.n,):
        raise InvalidInputError(f"x0 must have length {model.n}, got {x.shape}")
    steps = len(u)
    states = np.empty((steps, model.n))
    outputs = np.empty((steps, model.p))
    for k in range(steps):
        states[k] = x
        outputs[k] = model.C @ x + model.D @ u[k]
        x = model.A @ x + model.B @ u[k]
    return Trajectory(inputs=u, outputs=outputs, states=states)


def observability_matrix(model: StateSpaceModel, L: int) -> np.ndarray:
    """Stacked maps x_k -> y_{k:k+L} with zero input, shape (L+1)p x n."""
    if L < 0:
        raise InvalidInputError(f"L must be nonnegative, got {L}")
    O = model.C
    for _ in range(L):
        O = np.vstack([model.C, O @ model.A])
    return O


def invertibility_matrix(model: StateSpaceModel, L: int) -> np.ndarray:
    """Block-Toeplitz map u_{k:k+L} -> y_{k:k+L}, shape (L+1)p x (L+1)m.

    Block lower triangular with the Markov parameters D, CB, CAB, ... down
    the block columns.
    """
    if L < 0:
        raise InvalidInputError(f"L must be nonnegative, got {L}")
    p, m = model.p, model.m
    I_L = model.D
    O = model.C
    for ell in range(1, L + 1):
        I_L = np.block([
            [model.D, np.zeros((p, ell * m))],
            [O @ model.B, I_L],
        ])
        O = np.vstack([model.C, O @ model.A])
    return I_L


def stacked_output_identity_check(
    model: StateSpaceModel,
    x0,
    inputs,
    L: int,
    outputs=None,
    atol: float = 1e-10,
) -> bool:
    """Check y_{k:k+L} = O_L x_k + I_L u_{k:k+L} along a simulated run.

    Test utility. When ``outputs`` is given it replaces the simulated output
    sequence, which allows negative controls against corrupted data.
    """
    traj = simulate(model, x0, inputs)
    y = traj.outputs if outputs is None else _as_signal(outputs, model.p, "outputs")
    if len(y) != len(traj.inputs):
        raise InvalidInputError("outputs length must match inputs length")
    if len(y) < L + 1:
        raise InvalidInputError(f"trajectory too short for window L={L}")
    O_L = observability_matrix(model, L)
    I_L = invertibility_matrix(model, L)
    worst = 0.0
    for k in range(len(y) - L):
        y_stack = y[k : k + L + 1].reshape(-1)
        u_stack = traj.inputs[k : k + L + 1].reshape(-1)
        resid = y_stack - (O_L @ traj.states[k] + I_L @ u_stack)
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst <= atol


def _system_pencil(model: StateSpaceModel) -> tuple[np.ndarray, np.ndarray]:
    n, m, p = model.n, model.m, model.p
    M0 = np.block([[model.A, model.B], [model.C, model.D]])
    M1 = np.zeros((n + p, n + m))
    M1[:n, :n] = np.eye(n)
    return M0, M1


def _pencil_rank_drops(model: StateSpaceModel, z: complex, rank_tol: float) -> bool:
    n = model.n
    P = np.block(
        [[model.A - z * np.eye(n), model.B], [model.C, model.D]]
    ).astype(complex)
    s = np.linalg.svd(P, compute_uv=False)
    return bool(s[-1] <= rank_tol)


def invariant_zeros(
    model: StateSpaceModel,
    rank_tol: float = RANK_TOL_DEFAULT,
    modulus_cap: float = ZERO_MODULUS_CAP,
) -> np.ndarray:
    """Finite points where the system matrix pencil loses column rank.

    For square systems (p = m) these are the finite generalized eigenvalues
    of ([A B; C D], blkdiag(I, 0)). For tall systems (p > m) the pencil is
    first compressed to a square one by an orthonormal basis of its left
    range; every candidate is then confirmed by an explicit rank test on the
    original pencil, so spurious eigenvalues introduced by the compression
    are discarded.
    """
    if model.p < model.m:
        raise UnsupportedShapeError(
            f"invariant zeros require p >= m, got p={model.p}, m={model.m}"
        )
    M0, M1 = _system_pencil(model)
    nm = model.n + model.m
    if model.p == model.m:
        W = None
    else:
        Q = scipy.linalg.orth(np.hstack([M0, M1]))
        if Q.shape[1] == nm:
            W = Q.T
        else:
            # Range wider than the pencil: mix down to nm rows. A fixed-seed
            # Gaussian mixing keeps the result deterministic; the rank test
            # below removes any spurious candidates it introduces.
            rng = np.random.default_rng(_COMPRESSION_SEED)
            W = rng.standard_normal((nm, Q.shape[1])) @ Q.T
    if W is not None:
        M0 = W @ M0
        M1 = W @ M1
    candidates = scipy.linalg.eigvals(M0, M1)
    finite = [
        z
        for z in candidates
        if np.isfinite(z) and abs(z) <= modulus_cap
    ]
    zeros = [z for z in finite if _pencil_rank_drops(model, z, rank_tol)]
    return np.sort_complex(np.asarray(zeros, dtype=complex))


def _left_inverse_target(m: int, L: int) -> np.ndarray:
    return np.hstack([np.eye(m), np.zeros((m, L * m))])


def inherent_delay(
    model: StateSpaceModel,
    L_max: int | None = None,
    rank_tol: float = RANK_TOL_DEFAULT,
) -> int | None:
    """Smallest L admitting an L-delay left inverse, or None up to L_max.

    Uses the row-space membership test: [I_m 0] lies in the row space of
    the invertibility matrix iff stacking it on top does not raise the rank.
    """
    if L_max is None:
        L_max = model.n
    for L in range(L_max + 1):
        I_L = invertibility_matrix(model, L)
        stacked = np.vstack([I_L, _left_inverse_target(model.m, L)])
        if numerical_rank(stacked, rank_tol) == numerical_rank(I_L, rank_tol):
            return L
    return None


def left_inverse_gain(
    model: StateSpaceModel,
    L: int,
    rank_tol: float = RANK_TOL_DEFAULT,
    residual_tol: float = 1e-8,
    decouple_state: bool = False,
) -> np.ndarray:
    """Minimum-Frobenius-norm P with P @ I_L = [I_m 0].

    With ``decouple_state`` the gain is additionally required to satisfy
    P @ O_L = 0, which exists exactly when the system is strongly observable
    at horizon L; the returned P then reconstructs inputs without any state
    information.
    """
    target = _left_inverse_target(model.m, L)
    I_L = invertibility_matrix(model, L)
    if decouple_state:
        O_L = observability_matrix(model, L)
        stacked = np.hstack([O_L, I_L])
        rhs = np.hstack([np.zeros((model.m, model.n)), target])
        P = rhs @ truncated_pinv(stacked, rank_tol)
        residual = float(
            np.linalg.norm(P @ I_L - target) + np.linalg.norm(P @ O_L)
        )
    else:
        P = target @ truncated_pinv(I_L, rank_tol)
        residual = float(np.linalg.norm(P @ I_L - target))
    if residual > residual_tol:
        raise NoLeftInverseError(
            f"no left inverse at L={L}: residual {residual:.3e} exceeds "
            f"{residual_tol:.1e}",
            residual=residual,
        )
    return P


def inverse_system(
    model: StateSpaceModel,
    P: np.ndarray,
    L: int,
    residual_tol: float = 1e-8,
) -> InverseSystemModel:
    """Realize the input-reconstructing system driven by y_{k:k+L}."""
    P = np.asarray(P, dtype=float)
    expected = (model.m, (L + 1) * model.p)
    if P.shape != expected:
        raise InvalidGainError(f"P must have shape {expected}, got {P.shape}")
    target = _left_inverse_target(model.m, L)
    residual = float(np.linalg.norm(P @ invertibility_matrix(model, L) - target))
    if residual > residual_tol:
        raise InvalidGainError(
            f"P does not satisfy its defining equation: residual {residual:.3e}"
        )
    O_L = observability_matrix(model, L)
    PO = P @ O_L
    return InverseSystemModel(
        A_tilde=model.A - model.B @ PO,
        B_tilde=model.B @ P,
        C_tilde=-PO,
        D_tilde=P,
        L=L,
    )


def model_based_reconstruct(inv: InverseSystemModel, x0_hat, outputs) -> np.ndarray:
    """Run the inverse recursion over sliding output windows.

    Returns the reconstructed inputs u_hat_k for k = 0 .. len(outputs)-L-1;
    exact when x0_hat matches the true initial state.
    """
    p_width = inv.B_tilde.shape[1] // (inv.L + 1)
    y = _as_signal(outputs, p_width, "outputs")
    if len(y) < inv.L + 1:
        raise InvalidInputError(
            f"need at least L+1 = {inv.L + 1} outputs, got {len(y)}"
        )
    x = np.asarray(x0_hat, dtype=float).reshape(-1)
    if x.shape != (inv.n,):
        raise InvalidInputError(f"x0_hat must have length {inv.n}, got {x.shape}")
    steps = len(y) - inv.L
    u_hat = np.empty((steps, inv.m))
    for k in range(steps):
        window = y[k : k + inv.L + 1].reshape(-1)
        u_hat[k] = inv.C_tilde @ x + inv.D_tilde @ window
        x = inv.A_tilde @ x + inv.B_tilde @ window
    return u_hat


def strong_observability_check(
    model: StateSpaceModel,
    L_max: int | None = None,
    rank_tol: float = RANK_TOL_DEFAULT,
) -> bool:
    """True iff rank [O_L I_L] = n + rank I_L for some L <= L_max.

    Equivalent to the system having no invariant zeros; horizons up to the
    state dimension suffice.
    """
    if L_max is None:
        L_max = model.n
    for L in range(L_max + 1):
        O_L = observability_matrix(model, L)
        I_L = invertibility_matrix(model, L)
        combined = numerical_rank(np.hstack([O_L, I_L]), rank_tol)
        if combined == model.n + numerical_rank(I_L, rank_tol):
            return True
    return False


def classify_zeros(
    model: StateSpaceModel,
    margin: float = 1e-9,
    rank_tol: float = RANK_TOL_DEFAULT,
) -> ZeroClassification:
    """Bucket the invariant zeros into none / all stable / not all stable."""
    zeros = invariant_zeros(model, rank_tol=rank_tol)
    if zeros.size == 0:
        return ZeroClassification(zeros=zeros, category=ZeroCategory.NO_ZEROS, max_modulus=0.0)
    max_modulus = float(np.max(np.abs(zeros)))
    if max_modulus < 1.0 - margin:
        category = ZeroCategory.ALL_STABLE
    else:
        category = ZeroCategory.MARGINAL_OR_UNSTABLE
    return ZeroClassification(zeros=zeros, category=category, max_modulus=max_modulus)
