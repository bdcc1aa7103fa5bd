"""Shared fixtures: benchmark systems with prebuilt offline data and gains."""

from collections import namedtuple

import numpy as np
import pytest

import ddinv

DATA_SEED = 12345
N_PAST = 10
DATA_COLUMNS = 500  # T+1

Setup = namedtuple("Setup", "model L bundle gains offline")


def make_setup(model, L, N=N_PAST, columns=DATA_COLUMNS, seed=DATA_SEED) -> Setup:
    rng = np.random.default_rng(seed)
    length = columns + N + L
    u_d = rng.standard_normal((length, model.m))
    x0 = rng.standard_normal(model.n)
    offline = ddinv.simulate(model, x0, u_d)
    bundle = ddinv.partition_data(offline.inputs, offline.outputs, N, L)
    gains = ddinv.build_gains(bundle)
    return Setup(model=model, L=L, bundle=bundle, gains=gains, offline=offline)


def fresh_trajectory(model, steps, seed):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((steps, model.m))
    x0 = rng.standard_normal(model.n)
    return ddinv.simulate(model, x0, u)


@pytest.fixture(scope="session")
def stable_setup() -> Setup:
    return make_setup(ddinv.stable_zeros_system(), L=1)


@pytest.fixture(scope="session")
def no_zeros_setup() -> Setup:
    return make_setup(ddinv.no_zeros_system(), L=3)


@pytest.fixture(scope="session")
def unstable_setup() -> Setup:
    return make_setup(ddinv.unstable_zero_system(), L=2)


@pytest.fixture(scope="session")
def all_setups(stable_setup, no_zeros_setup, unstable_setup) -> dict:
    return {
        "stable-zeros": stable_setup,
        "no-zeros": no_zeros_setup,
        "unstable-zero": unstable_setup,
    }
