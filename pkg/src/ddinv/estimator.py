"""Autoregressive unknown-input estimator built from Hankel data.

The estimator recovers the input sequence driving an LTI system from output
measurements alone, without knowing the inputs that preceded the estimation
window. Offline input/output data enters through a constrained least-squares
problem: output consistency with the recorded behavior is a hard constraint,
while agreement with the previous input estimates is minimized. Its closed
form is a linear recursion

    u_hat_k = Mu @ u_hat_{k-N:k-1} + My @ y_{k-N:k+L}

whose gains are assembled once from an SVD nullspace reparameterization of
the output Hankel block. The estimation error obeys a companion-matrix
recursion, so a single spectral radius computed from data decides whether
the estimator converges for arbitrary initializations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDataError, InvalidInputError
from .hankel import HankelBundle
from .linalg import ToleranceSet, eigenvalues, truncated_pinv

#: Build-time agreement required between the nullspace-parameterized gains
#: and their explicit kernel-projector form.
_FORM_AGREEMENT_ATOL = 1e-10


@dataclass(frozen=True)
class EstimatorGains:
    """Frozen gain and diagnostic matrices of the input estimator.

    ``Mu`` and ``My`` drive the online recursion. The remaining factors are
    kept so that per-step diagnostics (objective residual of the constrained
    least squares and violation of the output-consistency constraint) and
    the full coefficient vector g can be reproduced without refactoring the
    offline data.
    """

    Mu: np.ndarray
    My: np.ndarray
    Y_pinv: np.ndarray
    V_null: np.ndarray
    Up0: np.ndarray
    Up0_pinv: np.ndarray
    UpY_pinv: np.ndarray
    YV_null: np.ndarray
    Y_feas_defect: np.ndarray
    tolerances: ToleranceSet
    N: int
    L: int
    m: int
    p: int

    @property
    def past_size(self) -> int:
        return self.m * self.N

    @property
    def window_size(self) -> int:
        return self.p * (self.N + self.L + 1)

    def reduced_coefficients(self, u_hat_past: np.ndarray, y_window: np.ndarray) -> np.ndarray:
        """Minimizing kernel coordinates for one (past, window) pair."""
        return self.Up0_pinv @ (u_hat_past - self.UpY_pinv @ y_window)

    def objective_residual(self, u_hat_past: np.ndarray, y_window: np.ndarray) -> float:
        """Norm of Up @ g - u_hat_past at the minimizer."""
        r = u_hat_past - self.UpY_pinv @ y_window
        return float(np.linalg.norm(self.Up0 @ (self.Up0_pinv @ r) - r))

    def constraint_violation(self, u_hat_past: np.ndarray, y_window: np.ndarray) -> float:
        """Norm of Y @ g - y_window at the minimizer."""
        alpha = self.reduced_coefficients(u_hat_past, y_window)
        return float(np.linalg.norm(self.Y_feas_defect @ y_window + self.YV_null @ alpha))


class EstimatorState:
    """Ring buffer of the last N input estimates, oldest first."""

    def __init__(self, initial_guess, N: int, m: int):
        guess = np.asarray(initial_guess, dtype=float).reshape(-1)
        if guess.size != N * m:
            raise InvalidInputError(
                f"initial guess must have {N * m} entries, got {guess.size}"
            )
        self._buffer = guess.reshape(N, m).copy()
        self.N = N
        self.m = m
        self.step_index = 0

    @property
    def past_vector(self) -> np.ndarray:
        """Stacked u_hat_{k-N:k-1} as a flat vector."""
        return self._buffer.reshape(-1)

    def push(self, u_hat: np.ndarray) -> None:
        self._buffer = np.vstack([self._buffer[1:], u_hat.reshape(1, self.m)])
        self.step_index += 1


@dataclass(frozen=True)
class ConvergenceCertificate:
    """Spectral summary of the error-dynamics companion matrix."""

    R: np.ndarray
    eigvals: np.ndarray
    rho: float
    schur_stable: bool


@dataclass
class RunReport:
    """Per-step record of an estimation run.

    ``error_norms`` and ``truth_inputs`` are present only when the true
    inputs were supplied. ``estimation_start_step`` is the time index of the
    first produced estimate; estimates[i] refers to step
    estimation_start_step + i.
    """

    estimates: np.ndarray
    residual_norms: np.ndarray
    constraint_violations: np.ndarray
    certificate: ConvergenceCertificate
    estimation_start_step: int
    error_norms: np.ndarray | None = None
    truth_inputs: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)


def build_gains(bundle: HankelBundle, tolerances: ToleranceSet | None = None) -> EstimatorGains:
    """Assemble the estimator gains from partitioned offline data.

    The output Hankel stack Y is factored once by SVD. Right singular
    vectors with singular value <= tolerances.y_trunc span the feasible
    kernel V_null; the reduced matrix Up0 = Up @ V_null is pseudoinverted
    with cutoff tolerances.ls_trunc. The gains are

        Mu = Uf @ V_null @ pinv(Up0)
        My = Uf @ (pinv(Y) - V_null @ pinv(Up0) @ Up @ pinv(Y))

    and are verified at build time against the equivalent kernel-projector
    form computed from (I - pinv(Y) Y).

    Raises:
        DegenerateDataError: Y has no numerical kernel, so no input history
            can be matched.
        InvalidInputError: non-finite data.
    """
    if tolerances is None:
        tolerances = ToleranceSet()
    for name, M in (("Up", bundle.Up), ("Uf", bundle.Uf), ("Y", bundle.Y)):
        if not np.all(np.isfinite(M)):
            raise InvalidInputError(f"bundle.{name} contains non-finite entries")

    Y = bundle.Y
    U_Y, s_Y, Vt_Y = np.linalg.svd(Y, full_matrices=True)
    rank_Y = int(np.sum(s_Y > tolerances.y_trunc))
    V = Vt_Y.T
    V_null = V[:, rank_Y:]
    if V_null.shape[1] == 0:
        raise DegenerateDataError(
            "output Hankel stack has no numerical kernel; offline data is too "
            "short or the truncation cutoff too small"
        )
    s_inv = np.zeros_like(s_Y)
    s_inv[:rank_Y] = 1.0 / s_Y[:rank_Y]
    Y_pinv = (V[:, : s_Y.size] * s_inv) @ U_Y.T

    Up0 = bundle.Up @ V_null
    Up0_pinv = truncated_pinv(Up0, tolerances.ls_trunc)
    UpY_pinv = bundle.Up @ Y_pinv

    Mu = bundle.Uf @ V_null @ Up0_pinv
    My = bundle.Uf @ (Y_pinv - V_null @ Up0_pinv @ UpY_pinv)

    # Same gains from the explicit projector onto ker(Y); disagreement here
    # means the truncation split the spectrum of Y inconsistently.
    projector = V_null @ V_null.T
    Up_proj_pinv = truncated_pinv(bundle.Up @ projector, tolerances.ls_trunc)
    Mu_proj = bundle.Uf @ projector @ Up_proj_pinv
    My_proj = bundle.Uf @ (Y_pinv - projector @ Up_proj_pinv @ UpY_pinv)
    if (
        float(np.max(np.abs(Mu - Mu_proj))) > _FORM_AGREEMENT_ATOL
        or float(np.max(np.abs(My - My_proj))) > _FORM_AGREEMENT_ATOL
    ):
        raise RuntimeError(
            "nullspace and projector gain forms disagree beyond "
            f"{_FORM_AGREEMENT_ATOL:.0e}; adjust the truncation cutoffs"
        )

    return EstimatorGains(
        Mu=Mu,
        My=My,
        Y_pinv=Y_pinv,
        V_null=V_null,
        Up0=Up0,
        Up0_pinv=Up0_pinv,
        UpY_pinv=UpY_pinv,
        YV_null=Y @ V_null,
        Y_feas_defect=Y @ Y_pinv - np.eye(Y.shape[0]),
        tolerances=tolerances,
        N=bundle.N,
        L=bundle.L,
        m=bundle.m,
        p=bundle.p,
    )


def solve_constrained_ls(
    bundle: HankelBundle,
    u_hat_past,
    y_window,
    tolerances: ToleranceSet | None = None,
    gains: EstimatorGains | None = None,
) -> tuple[np.ndarray, float]:
    """Solve min ||Up g - u_hat_past|| subject to Y g = y_window.

    Returns the specific minimizer

        g = pinv(Y) y + V_null pinv(Up0) (u_hat_past - Up pinv(Y) y)

    together with the achieved objective residual ||Up g - u_hat_past||.
    Infeasibility of the output constraint (a window that is not a system
    trajectory) is not an error; it shows up in the diagnostics instead so
    that online loops keep running.

    Pass ``gains`` to reuse an existing factorization of the same bundle.
    """
    if gains is None:
        gains = build_gains(bundle, tolerances)
    u_hat_past = np.asarray(u_hat_past, dtype=float).reshape(-1)
    y_window = np.asarray(y_window, dtype=float).reshape(-1)
    if u_hat_past.size != gains.past_size:
        raise InvalidInputError(
            f"u_hat_past must have {gains.past_size} entries, got {u_hat_past.size}"
        )
    if y_window.size != gains.window_size:
        raise InvalidInputError(
            f"y_window must have {gains.window_size} entries, got {y_window.size}"
        )
    alpha = gains.reduced_coefficients(u_hat_past, y_window)
    g = gains.Y_pinv @ y_window + gains.V_null @ alpha
    residual = float(np.linalg.norm(bundle.Up @ g - u_hat_past))
    return g, residual


def step(gains: EstimatorGains, state: EstimatorState, y_window) -> np.ndarray:
    """One recursion update: estimate, push into the buffer, advance."""
    y_window = np.asarray(y_window, dtype=float).reshape(-1)
    if y_window.size != gains.window_size:
        raise InvalidInputError(
            f"y_window must have {gains.window_size} entries, got {y_window.size}"
        )
    u_hat = gains.Mu @ state.past_vector + gains.My @ y_window
    state.push(u_hat)
    return u_hat


def error_matrix(gains: EstimatorGains) -> np.ndarray:
    """Block companion matrix of the estimation-error recursion.

    Shape (m*N, m*N): identity super-diagonal blocks shift the error window
    forward; the bottom block row is Mu.
    """
    m, N = gains.m, gains.N
    R = np.zeros((m * N, m * N))
    for i in range(N - 1):
        R[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] = np.eye(m)
    R[(N - 1) * m :, :] = gains.Mu
    return R


def convergence_certificate(gains: EstimatorGains) -> ConvergenceCertificate:
    """Data-only stability certificate for arbitrary initializations.

    The estimator converges for every initial guess exactly when the
    companion matrix is Schur stable, which this reads off its spectrum.
    """
    R = error_matrix(gains)
    eigvals = np.sort_complex(eigenvalues(R))
    rho = float(np.max(np.abs(eigvals))) if eigvals.size else 0.0
    return ConvergenceCertificate(
        R=R, eigvals=eigvals, rho=rho, schur_stable=bool(rho < 1.0)
    )


def run(
    gains: EstimatorGains,
    initial_guess,
    outputs,
    truth=None,
) -> RunReport:
    """Slide the estimator over a measured output sequence.

    Args:
        gains: frozen estimator gains.
        initial_guess: stacked guess for the N inputs before the first
            estimate (length m*N, any values).
        outputs: measured outputs, shape (horizon, p) with
            horizon >= N+L+1.
        truth: optional true inputs aligned with outputs; enables the
            per-step error norms in the report.

    Returns:
        RunReport with one entry per produced estimate; estimate i refers
        to time step N + i.
    """
    y = np.asarray(outputs, dtype=float)
    if y.ndim == 1:
        y = y.reshape(-1, 1)
    if y.ndim != 2 or y.shape[1] != gains.p:
        raise InvalidInputError(
            f"outputs must have shape (horizon, {gains.p}), got {y.shape}"
        )
    N, L = gains.N, gains.L
    if len(y) < N + L + 1:
        raise InvalidInputError(
            f"need at least N+L+1 = {N + L + 1} outputs, got {len(y)}"
        )
    u_true = None
    if truth is not None:
        u_true = np.asarray(truth, dtype=float)
        if u_true.ndim == 1:
            u_true = u_true.reshape(-1, 1)
        if u_true.shape != (len(y), gains.m):
            raise InvalidInputError(
                f"truth must have shape ({len(y)}, {gains.m}), got {u_true.shape}"
            )

    state = EstimatorState(initial_guess, N, gains.m)
    steps = len(y) - L - N
    estimates = np.empty((steps, gains.m))
    residual_norms = np.empty(steps)
    constraint_violations = np.empty(steps)
    for i, k in enumerate(range(N, len(y) - L)):
        y_window = y[k - N : k + L + 1].reshape(-1)
        past = state.past_vector
        residual_norms[i] = gains.objective_residual(past, y_window)
        constraint_violations[i] = gains.constraint_violation(past, y_window)
        estimates[i] = step(gains, state, y_window)

    error_norms = None
    truth_inputs = None
    if u_true is not None:
        truth_inputs = u_true[N : N + steps]
        error_norms = np.linalg.norm(estimates - truth_inputs, axis=1)

    return RunReport(
        estimates=estimates,
        residual_norms=residual_norms,
        constraint_violations=constraint_violations,
        certificate=convergence_certificate(gains),
        estimation_start_step=N,
        error_norms=error_norms,
        truth_inputs=truth_inputs,
    )
