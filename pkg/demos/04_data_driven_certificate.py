"""The stability certificate computed from input-output data alone.

Whether every invariant zero of an unknown plant lies strictly inside the
unit circle decides if delayed left inversion can converge from arbitrary
initializations. That property is usually checked on the model; here it is
read off one recorded trajectory instead: the spectrum of the error
companion matrix R contains exactly the invariant zeros, and all of its
remaining eigenvalues are stable.
"""

import numpy as np

import ddinv

N = 10
rng = np.random.default_rng(17)

for name, generator in ddinv.SYSTEM_GENERATORS.items():
    model = generator()
    L = ddinv.inherent_delay(model)
    u_d = rng.standard_normal((500 + N + L, model.m))
    offline = ddinv.simulate(model, rng.standard_normal(model.n), u_d)
    bundle = ddinv.partition_data(offline.inputs, offline.outputs, N, L)
    gains = ddinv.build_gains(bundle)
    certificate = ddinv.convergence_certificate(gains)

    model_zeros = ddinv.invariant_zeros(model)
    print(f"== {name}")
    print(f"   model zeros (needs A,B,C,D): {np.round(model_zeros, 6)}")
    print(f"   rho(R) from data:            {certificate.rho:.6f}")
    print(f"   Schur stable:                {certificate.schur_stable}")
    if model_zeros.size:
        recovered = [
            certificate.eigvals[np.argmin(np.abs(certificate.eigvals - z))]
            for z in model_zeros
        ]
        print(f"   zeros recovered in sigma(R): {np.round(recovered, 6)}")
    others = [
        lam for lam in certificate.eigvals
        if model_zeros.size == 0 or np.min(np.abs(model_zeros - lam)) > 1e-3
    ]
    print(f"   largest remaining |eig|:     {max(abs(lam) for lam in others):.6f}")
    print()

print("The verdict needs no state-space matrices: `ddinv certify` exposes")
print("exactly this computation, with exit code 0 when stable.")
