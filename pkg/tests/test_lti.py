import numpy as np
import pytest

import ddinv
from ddinv import (
    InvalidGainError,
    InvalidInputError,
    NoLeftInverseError,
    StateSpaceModel,
    UnsupportedShapeError,
    ZeroCategory,
)
from conftest import fresh_trajectory


def random_minimal_models(count, seed, p_at_least_m=False):
    """Seeded minimal models with n <= 4 for property sweeps."""
    rng = np.random.default_rng(seed)
    models = []
    while len(models) < count:
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 3))
        p = int(rng.integers(m if p_at_least_m else 1, 4))
        A = rng.standard_normal((n, n)) * 0.6
        B = rng.standard_normal((n, m))
        C = rng.standard_normal((p, n))
        D = rng.standard_normal((p, m)) * rng.integers(0, 2)
        model = StateSpaceModel(A=A, B=B, C=C, D=D)
        ctrb = np.hstack([np.linalg.matrix_power(A, k) @ B for k in range(n)])
        obsv = np.vstack([C @ np.linalg.matrix_power(A, k) for k in range(n)])
        if (
            ddinv.numerical_rank(ctrb, 1e-8) == n
            and ddinv.numerical_rank(obsv, 1e-8) == n
        ):
            models.append(model)
    return models


class TestStateSpaceModel:
    def test_dimensions(self):
        model = ddinv.stable_zeros_system()
        assert (model.n, model.m, model.p) == (4, 2, 2)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            StateSpaceModel(
                A=np.eye(2), B=np.ones((3, 1)), C=np.ones((1, 2)), D=np.zeros((1, 1))
            )

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            StateSpaceModel(
                A=np.array([[np.inf]]), B=np.ones((1, 1)),
                C=np.ones((1, 1)), D=np.zeros((1, 1)),
            )

    def test_matrices_read_only(self):
        model = ddinv.stable_zeros_system()
        with pytest.raises(ValueError):
            model.A[0, 0] = 99.0


class TestSimulate:
    def test_pure_feedthrough(self):
        model = StateSpaceModel(
            A=np.zeros((2, 2)), B=np.zeros((2, 2)), C=np.eye(2), D=np.eye(2)
        )
        u = np.random.default_rng(0).standard_normal((6, 2))
        traj = ddinv.simulate(model, np.zeros(2), u)
        assert np.allclose(traj.outputs, u)

    def test_integrator_recursion(self):
        model = StateSpaceModel(
            A=np.eye(1), B=np.ones((1, 1)), C=np.ones((1, 1)), D=np.zeros((1, 1))
        )
        traj = ddinv.simulate(model, [0.0], [[1.0], [0.0], [0.0]])
        assert np.allclose(traj.outputs.ravel(), [0.0, 1.0, 1.0])

    def test_modal_response(self):
        A = np.diag([0.5, 2.0])
        model = StateSpaceModel(
            A=A, B=np.ones((2, 1)), C=np.array([[1.0, -2.0]]), D=np.ones((1, 1))
        )
        x0 = np.array([1.0, 0.0])  # eigenvector of A, eigenvalue 0.5
        traj = ddinv.simulate(model, x0, np.zeros((8, 1)))
        expected = [(0.5 ** k) * (model.C @ x0)[0] for k in range(8)]
        assert np.allclose(traj.outputs.ravel(), expected)

    def test_dimension_mismatch(self):
        model = ddinv.stable_zeros_system()
        with pytest.raises(InvalidInputError):
            ddinv.simulate(model, np.zeros(3), np.zeros((5, 2)))
        with pytest.raises(InvalidInputError):
            ddinv.simulate(model, np.zeros(4), np.zeros((5, 3)))


class TestStackedMatrices:
    def test_observability_base_case(self):
        model = ddinv.stable_zeros_system()
        assert np.array_equal(ddinv.observability_matrix(model, 0), model.C)

    def test_observability_identity_state_map(self):
        model = StateSpaceModel(
            A=np.eye(3), B=np.ones((3, 1)), C=np.arange(6.0).reshape(2, 3),
            D=np.zeros((2, 1)),
        )
        O = ddinv.observability_matrix(model, 3)
        assert np.array_equal(O, np.vstack([model.C] * 4))

    def test_observability_scalar_powers(self):
        model = StateSpaceModel(
            A=np.array([[2.0]]), B=np.ones((1, 1)), C=np.ones((1, 1)),
            D=np.zeros((1, 1)),
        )
        O = ddinv.observability_matrix(model, 2)
        assert np.allclose(O.ravel(), [1.0, 2.0, 4.0])

    def test_invertibility_base_case(self):
        model = ddinv.stable_zeros_system()
        assert np.array_equal(ddinv.invertibility_matrix(model, 0), model.D)

    def test_invertibility_no_input_coupling(self):
        rng = np.random.default_rng(1)
        D = rng.standard_normal((2, 2))
        model = StateSpaceModel(
            A=rng.standard_normal((3, 3)), B=np.zeros((3, 2)),
            C=rng.standard_normal((2, 3)), D=D,
        )
        I_2 = ddinv.invertibility_matrix(model, 2)
        expected = np.kron(np.eye(3), D)
        assert np.allclose(I_2, expected)

    def test_invertibility_shift_structure(self):
        model = StateSpaceModel(
            A=np.zeros((2, 2)), B=np.eye(2), C=np.eye(2), D=np.zeros((2, 2))
        )
        I_1 = ddinv.invertibility_matrix(model, 1)
        expected = np.block(
            [[np.zeros((2, 2)), np.zeros((2, 2))], [np.eye(2), np.zeros((2, 2))]]
        )
        assert np.allclose(I_1, expected)

    def test_markov_parameter_blocks(self):
        for model in random_minimal_models(5, seed=11):
            L = 4
            I_L = ddinv.invertibility_matrix(model, L)
            p, m = model.p, model.m
            for i in range(L + 1):
                for j in range(L + 1):
                    block = I_L[i * p : (i + 1) * p, j * m : (j + 1) * m]
                    if i == j:
                        expected = model.D
                    elif i > j:
                        expected = model.C @ np.linalg.matrix_power(
                            model.A, i - j - 1
                        ) @ model.B
                    else:
                        expected = np.zeros((p, m))
                    assert np.allclose(block, expected, atol=1e-12)


class TestStackedOutputIdentity:
    def test_random_models(self):
        rng = np.random.default_rng(23)
        for model in random_minimal_models(6, seed=29):
            u = rng.standard_normal((12, model.m))
            x0 = rng.standard_normal(model.n)
            for L in (0, 3, 6):
                assert ddinv.stacked_output_identity_check(model, x0, u, L)

    def test_pure_feedthrough(self):
        model = StateSpaceModel(
            A=np.zeros((2, 2)), B=np.zeros((2, 2)), C=np.eye(2), D=np.eye(2)
        )
        u = np.random.default_rng(3).standard_normal((8, 2))
        assert ddinv.stacked_output_identity_check(model, np.zeros(2), u, 2)

    def test_negative_control_with_corrupted_outputs(self):
        model = ddinv.stable_zeros_system()
        rng = np.random.default_rng(5)
        u = rng.standard_normal((10, 2))
        x0 = rng.standard_normal(4)
        traj = ddinv.simulate(model, x0, u)
        corrupted = traj.outputs.copy()
        corrupted[4, 0] += 1e-3
        assert not ddinv.stacked_output_identity_check(
            model, x0, u, 2, outputs=corrupted
        )


class TestInvariantZeros:
    def test_siso_first_order(self):
        model = StateSpaceModel(
            A=np.array([[0.5]]), B=np.ones((1, 1)), C=np.ones((1, 1)),
            D=np.ones((1, 1)),
        )
        zeros = ddinv.invariant_zeros(model)
        assert zeros.shape == (1,)
        assert abs(zeros[0] + 0.5) < 1e-10

    def test_benchmark_configurations(self):
        assert np.allclose(
            ddinv.invariant_zeros(ddinv.stable_zeros_system()), [0.7, 0.8]
        )
        assert ddinv.invariant_zeros(ddinv.no_zeros_system()).size == 0
        zeros = ddinv.invariant_zeros(ddinv.unstable_zero_system())
        assert np.min(np.abs(zeros - 1.25)) < 1e-10

    def test_rejects_wide_systems(self):
        model = StateSpaceModel(
            A=np.eye(2), B=np.ones((2, 2)), C=np.ones((1, 2)), D=np.zeros((1, 2))
        )
        with pytest.raises(UnsupportedShapeError):
            ddinv.invariant_zeros(model)

    def test_tall_system_duplicated_output(self):
        # A copied output row cannot change where the pencil loses rank.
        base = ddinv.stable_zeros_system()
        model = StateSpaceModel(
            A=base.A, B=base.B,
            C=np.vstack([base.C, base.C[:1]]),
            D=np.vstack([base.D, base.D[:1]]),
        )
        assert np.allclose(ddinv.invariant_zeros(model), [0.7, 0.8])

    def test_tall_system_independent_extra_output(self):
        base = ddinv.stable_zeros_system()
        extra = np.array([[0.3, -1.1, 0.7, 0.2]])
        model = StateSpaceModel(
            A=base.A, B=base.B,
            C=np.vstack([base.C, extra]),
            D=np.vstack([base.D, np.zeros((1, 2))]),
        )
        zeros = ddinv.invariant_zeros(model)
        # Must agree with the rank-identity characterization either way.
        assert (zeros.size == 0) == ddinv.strong_observability_check(model)


class TestInherentDelay:
    def test_invertible_feedthrough(self):
        rng = np.random.default_rng(9)
        model = StateSpaceModel(
            A=rng.standard_normal((3, 3)), B=rng.standard_normal((3, 2)),
            C=rng.standard_normal((2, 3)), D=np.eye(2),
        )
        assert ddinv.inherent_delay(model) == 0

    def test_unit_delay_shift_system(self):
        model = StateSpaceModel(
            A=np.zeros((2, 2)), B=np.eye(2), C=np.eye(2), D=np.zeros((2, 2))
        )
        assert ddinv.inherent_delay(model) == 1

    def test_no_output_information(self):
        model = StateSpaceModel(
            A=np.diag([0.5, 0.4]), B=np.eye(2), C=np.zeros((2, 2)),
            D=np.zeros((2, 2)),
        )
        assert ddinv.inherent_delay(model) is None

    def test_benchmarks(self):
        assert ddinv.inherent_delay(ddinv.stable_zeros_system()) == 1
        assert ddinv.inherent_delay(ddinv.no_zeros_system()) == 3
        assert ddinv.inherent_delay(ddinv.unstable_zero_system()) == 2

    def test_delay_at_most_n_when_invertible(self):
        for model in random_minimal_models(10, seed=61, p_at_least_m=True):
            delay = ddinv.inherent_delay(model, L_max=2 * model.n + 2)
            if delay is not None:
                assert delay <= model.n


class TestLeftInverseGain:
    def test_identity_feedthrough(self):
        model = StateSpaceModel(
            A=np.diag([0.2, 0.3]), B=np.eye(2), C=np.eye(2), D=np.eye(2)
        )
        P = ddinv.left_inverse_gain(model, 0)
        assert np.allclose(P, np.eye(2))

    def test_shift_system_selects_second_block(self):
        model = StateSpaceModel(
            A=np.zeros((2, 2)), B=np.eye(2), C=np.eye(2), D=np.zeros((2, 2))
        )
        P = ddinv.left_inverse_gain(model, 1)
        expected = np.hstack([np.zeros((2, 2)), np.eye(2)])
        assert np.allclose(P, expected, atol=1e-12)

    def test_non_invertible_raises_with_residual(self):
        model = StateSpaceModel(
            A=np.diag([0.5, 0.4]), B=np.eye(2), C=np.zeros((2, 2)),
            D=np.zeros((2, 2)),
        )
        with pytest.raises(NoLeftInverseError) as excinfo:
            ddinv.left_inverse_gain(model, 2)
        assert excinfo.value.residual > 0.1

    def test_decoupled_gain_annihilates_observability(self):
        model = ddinv.no_zeros_system()
        L = 3
        P = ddinv.left_inverse_gain(model, L, decouple_state=True)
        O_L = ddinv.observability_matrix(model, L)
        I_L = ddinv.invertibility_matrix(model, L)
        target = np.hstack([np.eye(2), np.zeros((2, 2 * L))])
        assert np.linalg.norm(P @ I_L - target) < 1e-8
        assert np.linalg.norm(P @ O_L) < 1e-8

    def test_decoupled_gain_impossible_with_zeros(self):
        with pytest.raises(NoLeftInverseError):
            ddinv.left_inverse_gain(ddinv.stable_zeros_system(), 1, decouple_state=True)


class TestInverseSystem:
    def test_identity_feedthrough_formulas(self):
        rng = np.random.default_rng(17)
        model = StateSpaceModel(
            A=rng.standard_normal((3, 3)) * 0.4, B=rng.standard_normal((3, 2)),
            C=rng.standard_normal((2, 3)), D=np.eye(2),
        )
        inv = ddinv.inverse_system(model, np.eye(2), 0)
        assert np.allclose(inv.A_tilde, model.A - model.B @ model.C)
        assert np.allclose(inv.C_tilde, -model.C)
        assert np.allclose(inv.B_tilde, model.B)
        assert np.allclose(inv.D_tilde, np.eye(2))

    def test_zero_input_map(self):
        model = StateSpaceModel(
            A=np.diag([0.5, 0.2]), B=np.zeros((2, 2)), C=np.eye(2), D=np.eye(2)
        )
        inv = ddinv.inverse_system(model, np.eye(2), 0)
        assert np.allclose(inv.A_tilde, model.A)
        assert np.allclose(inv.B_tilde, np.zeros((2, 2)))

    def test_invalid_gain_rejected(self):
        model = ddinv.stable_zeros_system()
        with pytest.raises(InvalidGainError):
            ddinv.inverse_system(model, np.ones((2, 4)), 1)

    def test_zeros_appear_in_inverse_dynamics(self):
        for system, L in (
            (ddinv.stable_zeros_system(), 1),
            (ddinv.unstable_zero_system(), 2),
        ):
            P = ddinv.left_inverse_gain(system, L)
            inv = ddinv.inverse_system(system, P, L)
            poles = np.linalg.eigvals(inv.A_tilde)
            for z in ddinv.invariant_zeros(system):
                assert np.min(np.abs(poles - z)) < 1e-6


class TestModelBasedReconstruct:
    def test_exact_initialization_recovers_inputs(self):
        for system, L in (
            (ddinv.stable_zeros_system(), 1),
            (ddinv.no_zeros_system(), 3),
            (ddinv.unstable_zero_system(), 2),
        ):
            traj = fresh_trajectory(system, 60, seed=101)
            P = ddinv.left_inverse_gain(system, L)
            inv = ddinv.inverse_system(system, P, L)
            u_hat = ddinv.model_based_reconstruct(inv, traj.states[0], traj.outputs)
            assert np.max(np.abs(u_hat - traj.inputs[: len(u_hat)])) < 1e-8

    def test_decoupled_gain_ignores_initialization(self):
        model = ddinv.no_zeros_system()
        L = 3
        P = ddinv.left_inverse_gain(model, L, decouple_state=True)
        inv = ddinv.inverse_system(model, P, L)
        traj = fresh_trajectory(model, 40, seed=7)
        rng = np.random.default_rng(8)
        for _ in range(5):
            u_hat = ddinv.model_based_reconstruct(
                inv, rng.standard_normal(4), traj.outputs
            )
            assert np.max(np.abs(u_hat - traj.inputs[: len(u_hat)])) < 1e-8

    def test_stable_zeros_geometric_decay(self):
        model = ddinv.stable_zeros_system()
        P = ddinv.left_inverse_gain(model, 1)
        inv = ddinv.inverse_system(model, P, 1)
        traj = fresh_trajectory(model, 120, seed=55)
        u_hat = ddinv.model_based_reconstruct(inv, np.zeros(4), traj.outputs)
        err = np.linalg.norm(u_hat - traj.inputs[: len(u_hat)], axis=1)
        assert err[-1] < 1e-8 * max(1.0, err[0])
        # Decay rate is governed by the slowest zero at 0.8.
        window = err[20:80]
        ratios = (window[10:] / window[:-10]) ** 0.1
        assert np.max(ratios) < 0.85

    def test_window_too_short(self):
        model = ddinv.stable_zeros_system()
        P = ddinv.left_inverse_gain(model, 1)
        inv = ddinv.inverse_system(model, P, 1)
        with pytest.raises(InvalidInputError):
            ddinv.model_based_reconstruct(inv, np.zeros(4), np.zeros((1, 2)))


class TestStrongObservability:
    def test_benchmarks(self):
        assert not ddinv.strong_observability_check(ddinv.stable_zeros_system())
        assert ddinv.strong_observability_check(ddinv.no_zeros_system())
        assert not ddinv.strong_observability_check(ddinv.unstable_zero_system())

    def test_full_state_output(self):
        model = StateSpaceModel(
            A=np.diag([0.9, 0.3]), B=np.zeros((2, 1)), C=np.eye(2),
            D=np.zeros((2, 1)),
        )
        assert ddinv.strong_observability_check(model)

    def test_equivalent_to_no_invariant_zeros(self):
        suite = random_minimal_models(12, seed=83, p_at_least_m=True)
        suite += [
            ddinv.stable_zeros_system(),
            ddinv.no_zeros_system(),
            ddinv.unstable_zero_system(),
        ]
        for model in suite:
            zeros = ddinv.invariant_zeros(model)
            assert ddinv.strong_observability_check(model) == (zeros.size == 0)


class TestClassifyZeros:
    def test_stable(self):
        cls = ddinv.classify_zeros(ddinv.stable_zeros_system())
        assert cls.category is ZeroCategory.ALL_STABLE
        assert cls.max_modulus == pytest.approx(0.8, abs=1e-9)

    def test_unstable(self):
        cls = ddinv.classify_zeros(ddinv.unstable_zero_system())
        assert cls.category is ZeroCategory.MARGINAL_OR_UNSTABLE
        assert cls.max_modulus == pytest.approx(1.25, abs=1e-9)

    def test_none(self):
        cls = ddinv.classify_zeros(ddinv.no_zeros_system())
        assert cls.category is ZeroCategory.NO_ZEROS
        assert cls.max_modulus == 0.0
        assert cls.zeros.size == 0
