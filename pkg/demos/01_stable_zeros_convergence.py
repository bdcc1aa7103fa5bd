"""Unknown-input estimation on a system with stable transmission zeros.

Walks the full pipeline: record one excited trajectory, partition it into
Hankel blocks, build the estimator gains, certify convergence from data
alone, then reconstruct the inputs of a fresh trajectory starting from a
wrong initial guess. The estimation error contracts geometrically at the
rate set by the slowest zero.
"""

import numpy as np

import ddinv

N = 10  # past-window length, at least the state dimension
rng = np.random.default_rng(7)

model = ddinv.stable_zeros_system()
L = ddinv.inherent_delay(model)
print(f"system: n={model.n}, m={model.m}, p={model.p}")
print(f"invariant zeros: {ddinv.invariant_zeros(model)}")
print(f"inherent delay L0 = {L}")

# --- offline phase: one recorded experiment ----------------------------
data_len = 500 + N + L
u_d = rng.standard_normal((data_len, model.m))
offline = ddinv.simulate(model, rng.standard_normal(model.n), u_d)

order = model.n + N + L + 1
assert ddinv.is_persistently_exciting(offline.inputs, order)
print(f"offline data: {data_len} samples, persistently exciting of order {order}")

bundle = ddinv.partition_data(offline.inputs, offline.outputs, N, L)
gains = ddinv.build_gains(bundle)

certificate = ddinv.convergence_certificate(gains)
print(f"\ncertificate from data alone: rho(R) = {certificate.rho:.6f} "
      f"-> {'converges' if certificate.schur_stable else 'diverges'} "
      "for any initialization")

# --- online phase: reconstruct inputs of a fresh run -------------------
horizon = 200
online = ddinv.simulate(
    model, rng.standard_normal(model.n), rng.standard_normal((horizon, model.m))
)
wrong_guess = rng.standard_normal(N * model.m)
report = ddinv.run(gains, wrong_guess, online.outputs, truth=online.inputs)

print(f"\nestimation starts at step {report.estimation_start_step}")
print("step    |u_hat - u|      input-history residual")
for i in (0, 5, 10, 20, 40, 80, len(report.estimates) - 1):
    k = report.estimation_start_step + i
    print(f"{k:4d}    {report.error_norms[i]:.3e}       "
          f"{report.residual_norms[i]:.3e}")

rate = (report.error_norms[40] / report.error_norms[20]) ** (1 / 20)
print(f"\nempirical decay per step between steps 30 and 50: {rate:.3f} "
      f"(slowest zero: 0.8)")

ddinv.emit_plot_data(report, "stable_zeros_run.csv")
print("per-step traces written to stable_zeros_run.csv")
