"""Exact single-step recovery on a strongly observable system.

Without invariant zeros the input-history gain vanishes entirely, so the
estimate no longer depends on its own past: the very first estimate is
already exact, whatever the initialization. The same trajectory is also
inverted with a model-based gain chosen to ignore the state estimate, and
the two reconstructions agree to machine precision.
"""

import numpy as np

import ddinv

N = 10
rng = np.random.default_rng(11)

model = ddinv.no_zeros_system()
L = ddinv.inherent_delay(model)
print(f"invariant zeros: {ddinv.invariant_zeros(model)} (none)")
print(f"strongly observable: {ddinv.strong_observability_check(model)}")
print(f"inherent delay L0 = {L}")

u_d = rng.standard_normal((500 + N + L, model.m))
offline = ddinv.simulate(model, rng.standard_normal(model.n), u_d)
bundle = ddinv.partition_data(offline.inputs, offline.outputs, N, L)
gains = ddinv.build_gains(bundle)

print(f"\n||Mu||_2 = {np.linalg.norm(gains.Mu, 2):.3e}  "
      "(input-history gain vanishes)")

horizon = 120
online = ddinv.simulate(
    model, rng.standard_normal(model.n), rng.standard_normal((horizon, model.m))
)
report = ddinv.run(
    gains, 5.0 * rng.standard_normal(N * model.m), online.outputs,
    truth=online.inputs,
)
print(f"max estimation error over the whole run: {np.max(report.error_norms):.3e}")
print("residual trace (drops to zero once the wrong guesses leave the window):")
for i in (0, 3, 6, 9, 10, 12):
    print(f"  step {report.estimation_start_step + i:3d}: "
          f"{report.residual_norms[i]:.3e}")

# --- model-based oracle with a state-decoupled gain ---------------------
P = ddinv.left_inverse_gain(model, L, decouple_state=True)
inverse = ddinv.inverse_system(model, P, L)
oracle = ddinv.model_based_reconstruct(
    inverse, rng.standard_normal(model.n), online.outputs
)
aligned = oracle[N : N + len(report.estimates)]
print(f"\nmax |data-driven - model-based| over {len(aligned)} steps: "
      f"{np.max(np.abs(report.estimates - aligned)):.3e}")
