"""Experiment driver: scenario runs, certification, data generation.

Subcommands:
    run           full experiment, report written as deterministic JSON
    certify       data-only stability certificate, exit code 0 iff stable
    gen-data      offline trajectory to CSV
    invert-oracle model-based reconstruction of the same online trajectory
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

import numpy as np

from . import estimator, hankel, lti, report
from .config import (
    FROM_FILE,
    ScenarioConfig,
    load_config,
    with_seed,
)
from .errors import ConfigError, PersistencyError
from .linalg import numerical_rank
from .systems import SYSTEM_GENERATORS


def load_system_file(path) -> lti.StateSpaceModel:
    """Read state-space matrices from a JSON file with keys A, B, C, D."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    missing = {"A", "B", "C", "D"} - set(payload)
    if missing:
        raise ConfigError(f"{path}: missing matrices {sorted(missing)}")
    return lti.StateSpaceModel(
        A=np.asarray(payload["A"], dtype=float),
        B=np.asarray(payload["B"], dtype=float),
        C=np.asarray(payload["C"], dtype=float),
        D=np.asarray(payload["D"], dtype=float),
    )


def resolve_model(config: ScenarioConfig) -> lti.StateSpaceModel:
    if config.system == FROM_FILE:
        return load_system_file(config.system_path)
    return SYSTEM_GENERATORS[config.system]()


def resolve_delay(config: ScenarioConfig, model: lti.StateSpaceModel) -> int:
    if config.L is not None:
        return config.L
    delay = lti.inherent_delay(model, rank_tol=config.tolerances.rank_tol)
    if delay is None:
        raise ConfigError(
            f"system {config.system!r} admits no delayed left inverse for "
            f"L <= {model.n}; specify L explicitly"
        )
    return delay


def _validate_dimensions(config: ScenarioConfig, model: lti.StateSpaceModel, L: int) -> None:
    if config.N < model.n:
        raise ConfigError(
            f"N = {config.N} must be at least the state dimension n = {model.n}"
        )
    if config.data_length < config.N + L + 1:
        raise ConfigError(
            f"data_length = {config.data_length} shorter than one window "
            f"N+L+1 = {config.N + L + 1}"
        )
    if config.horizon < config.N + L + 1:
        raise ConfigError(
            f"horizon = {config.horizon} shorter than one window "
            f"N+L+1 = {config.N + L + 1}"
        )


def generate_scenario_data(config: ScenarioConfig, model: lti.StateSpaceModel, L: int):
    """Draw offline data, online trajectory, and initial guess from one seed.

    The draw order is fixed (offline inputs, offline state, online inputs,
    online state, initial guess) so that every consumer of the same config
    sees identical data.
    """
    rng = np.random.default_rng(config.seed)
    u_offline = rng.standard_normal((config.data_length, model.m))
    x0_offline = rng.standard_normal(model.n)
    offline = lti.simulate(model, x0_offline, u_offline)
    u_online = rng.standard_normal((config.horizon, model.m))
    x0_online = rng.standard_normal(model.n)
    online = lti.simulate(model, x0_online, u_online)
    if config.init_guess == "random":
        initial_guess = config.init_scale * rng.standard_normal(config.N * model.m)
    else:
        initial_guess = np.zeros(config.N * model.m)
    return offline, online, initial_guess


def verify_excitation(config: ScenarioConfig, model: lti.StateSpaceModel,
                      offline: lti.Trajectory, L: int) -> None:
    order = model.n + config.N + L + 1
    required_rank = model.m * order
    if len(offline.inputs) < order:
        raise PersistencyError(
            f"offline data too short for excitation order {order}",
            required_order=order, required_rank=required_rank, achieved_rank=0,
        )
    H = hankel.block_hankel(offline.inputs, order)
    achieved = numerical_rank(H, config.tolerances.rank_tol)
    if achieved != required_rank:
        raise PersistencyError(
            f"offline input is not persistently exciting of order {order}: "
            f"rank {achieved} < {required_rank}",
            required_order=order, required_rank=required_rank, achieved_rank=achieved,
        )


def build_gains_for(config: ScenarioConfig):
    """Offline half of a scenario: model, delay, data, verified gains."""
    model = resolve_model(config)
    L = resolve_delay(config, model)
    _validate_dimensions(config, model, L)
    offline, online, initial_guess = generate_scenario_data(config, model, L)
    verify_excitation(config, model, offline, L)
    bundle = hankel.partition_data(offline.inputs, offline.outputs, config.N, L)
    gains = estimator.build_gains(bundle, config.tolerances)
    return model, L, bundle, gains, offline, online, initial_guess


def run_scenario(config: ScenarioConfig) -> estimator.RunReport:
    """Full experiment: offline data, gains, online estimation, report."""
    model, L, bundle, gains, offline, online, initial_guess = build_gains_for(config)
    result = estimator.run(
        gains, initial_guess, online.outputs, truth=online.inputs
    )
    result.metadata = dict(config.to_mapping())
    result.metadata["L_resolved"] = str(L)
    result.metadata["estimation_start_step"] = str(result.estimation_start_step)
    return result


def run_oracle(config: ScenarioConfig) -> estimator.RunReport:
    """Model-based reconstruction of the scenario's online trajectory.

    Uses the minimum-norm delayed left inverse started from a zero state
    estimate; produces a report aligned with run_scenario's time axis.
    """
    model = resolve_model(config)
    L = resolve_delay(config, model)
    _validate_dimensions(config, model, L)
    _, online, _ = generate_scenario_data(config, model, L)
    P = lti.left_inverse_gain(model, L, rank_tol=config.tolerances.rank_tol)
    inverse = lti.inverse_system(model, P, L)
    u_hat = lti.model_based_reconstruct(inverse, np.zeros(model.n), online.outputs)
    truth = online.inputs[: len(u_hat)]
    eigvals = np.sort_complex(np.linalg.eigvals(inverse.A_tilde))
    rho = float(np.max(np.abs(eigvals)))
    return estimator.RunReport(
        estimates=u_hat,
        residual_norms=np.zeros(len(u_hat)),
        constraint_violations=np.zeros(len(u_hat)),
        certificate=estimator.ConvergenceCertificate(
            R=inverse.A_tilde, eigvals=eigvals, rho=rho,
            schur_stable=bool(rho < 1.0),
        ),
        estimation_start_step=0,
        error_norms=np.linalg.norm(u_hat - truth, axis=1),
        truth_inputs=truth,
        metadata=dict(config.to_mapping()),
    )


def certify(config: ScenarioConfig, data_path=None) -> estimator.ConvergenceCertificate:
    """Stability certificate from generated or recorded offline data."""
    if data_path is not None:
        offline = report.load_trajectory(data_path)
        if config.L is None:
            raise ConfigError(
                "certify on recorded data requires an explicit L"
            )
        L = config.L
        bundle = hankel.partition_data(offline.inputs, offline.outputs, config.N, L)
        gains = estimator.build_gains(bundle, config.tolerances)
        return estimator.convergence_certificate(gains)
    _, _, _, gains, _, _, _ = build_gains_for(config)
    return estimator.convergence_certificate(gains)


def _print_certificate(certificate: estimator.ConvergenceCertificate) -> None:
    verdict = "stable" if certificate.schur_stable else "unstable"
    print(f"rho(R) = {certificate.rho:.6f}")
    print(f"verdict: {verdict}")
    eigvals = certificate.eigvals
    order = np.argsort(np.abs(np.abs(eigvals) - 1.0))
    print("eigenvalues nearest the unit circle:")
    for idx in order[: min(5, len(order))]:
        z = eigvals[idx]
        print(f"  {z.real:+.6f}{z.imag:+.6f}j  |z| = {abs(z):.6f}")


def _parallel_out_path(out: Path, index: int) -> Path:
    return out.with_name(f"{out.stem}-{index:03d}{out.suffix}")


def _run_single(config: ScenarioConfig, out: Path) -> Path:
    result = run_scenario(config)
    report.save_report(result, out)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddinv",
        description="Data-driven unknown-input estimation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=None, help="flat key=value config file")
        p.add_argument("--system", type=str, default=None, help="benchmark system name")
        p.add_argument("--N", type=int, default=None, help="past-window length")
        p.add_argument("--L", type=str, default=None, help="reconstruction delay or 'auto'")
        p.add_argument("--seed", type=int, default=None, help="experiment seed")
        p.add_argument("--horizon", type=int, default=None, help="online trajectory length")
        p.add_argument("--out", type=Path, default=None, help="output file path")

    p_run = sub.add_parser("run", help="run a full estimation experiment")
    add_common(p_run)
    p_run.add_argument(
        "--parallel", type=int, default=1,
        help="number of replicate scenarios (seeds seed+0..seed+k-1) run concurrently",
    )

    p_cert = sub.add_parser("certify", help="print the data-only stability certificate")
    add_common(p_cert)
    p_cert.add_argument(
        "--data", type=Path, default=None,
        help="trajectory CSV to certify instead of generated data",
    )

    p_gen = sub.add_parser("gen-data", help="generate offline data as CSV")
    add_common(p_gen)

    p_oracle = sub.add_parser(
        "invert-oracle", help="model-based reconstruction for comparison"
    )
    add_common(p_oracle)

    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict[str, str]:
    overrides: dict[str, str] = {}
    if args.system is not None:
        overrides["system"] = args.system
    if args.N is not None:
        overrides["N"] = str(args.N)
    if args.L is not None:
        overrides["L"] = args.L
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.horizon is not None:
        overrides["horizon"] = str(args.horizon)
    return overrides


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, _overrides_from_args(args))
        if args.command == "run":
            out = args.out or Path(f"report-{config.system}.json")
            if args.parallel > 1:
                configs = [with_seed(config, config.seed + i) for i in range(args.parallel)]
                outs = [_parallel_out_path(out, i) for i in range(args.parallel)]
                with concurrent.futures.ProcessPoolExecutor(
                    max_workers=args.parallel
                ) as pool:
                    for path in pool.map(_run_single, configs, outs):
                        print(f"wrote {path}")
            else:
                _run_single(config, out)
                print(f"wrote {out}")
            return 0
        if args.command == "certify":
            certificate = certify(config, data_path=args.data)
            _print_certificate(certificate)
            return 0 if certificate.schur_stable else 1
        if args.command == "gen-data":
            model = resolve_model(config)
            L = resolve_delay(config, model)
            _validate_dimensions(config, model, L)
            offline, _, _ = generate_scenario_data(config, model, L)
            out = args.out or Path(f"data-{config.system}.csv")
            report.save_trajectory(offline, out)
            print(f"wrote {out}")
            return 0
        if args.command == "invert-oracle":
            result = run_oracle(config)
            out = args.out or Path(f"oracle-{config.system}.csv")
            report.emit_plot_data(result, out)
            print(f"wrote {out}")
            return 0
    except PersistencyError as exc:
        print(
            f"error: {exc} (required order {exc.required_order}, rank "
            f"{exc.achieved_rank}/{exc.required_rank})",
            file=sys.stderr,
        )
        return 2
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
