"""Trajectory CSV round-trip and deterministic report emission.

All numeric fields are written with 17 significant digits so that CSV
round-trips reproduce the exact double-precision values, and report files
are byte-identical across runs of the same configuration.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import TrajectoryFormatError
from .estimator import RunReport
from .lti import Trajectory

_FLOAT_FMT = "{:.17g}"


def _fmt(value: float) -> str:
    return _FLOAT_FMT.format(float(value))


def save_trajectory(trajectory: Trajectory, path) -> None:
    """Write inputs/outputs as CSV with header k,u_1..u_m,y_1..y_p."""
    u = np.asarray(trajectory.inputs, dtype=float)
    y = np.asarray(trajectory.outputs, dtype=float)
    m = u.shape[1]
    p = y.shape[1]
    header = ",".join(
        ["k"]
        + [f"u_{i + 1}" for i in range(m)]
        + [f"y_{i + 1}" for i in range(p)]
    )
    lines = [header]
    for k in range(len(u)):
        fields = [str(k)] + [_fmt(v) for v in u[k]] + [_fmt(v) for v in y[k]]
        lines.append(",".join(fields))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_trajectory(path) -> Trajectory:
    """Parse a trajectory CSV written by save_trajectory.

    Input and output widths are inferred from the header. Raises
    TrajectoryFormatError with the offending 1-based line number on any
    malformed content.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TrajectoryFormatError(f"{path}: empty trajectory file", line=1)
    header = [h.strip() for h in lines[0].split(",")]
    m = sum(1 for h in header if h.startswith("u_"))
    p = sum(1 for h in header if h.startswith("y_"))
    expected_header = (
        ["k"]
        + [f"u_{i + 1}" for i in range(m)]
        + [f"y_{i + 1}" for i in range(p)]
    )
    if m == 0 or p == 0 or header != expected_header:
        raise TrajectoryFormatError(
            f"{path}:1: malformed header {lines[0]!r}", line=1
        )
    inputs = []
    outputs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 1 + m + p:
            raise TrajectoryFormatError(
                f"{path}:{lineno}: expected {1 + m + p} fields, got {len(fields)}",
                line=lineno,
            )
        try:
            row = [float(f) for f in fields[1:]]
        except ValueError:
            raise TrajectoryFormatError(
                f"{path}:{lineno}: non-numeric field in {line!r}", line=lineno
            ) from None
        inputs.append(row[:m])
        outputs.append(row[m:])
    if not inputs:
        raise TrajectoryFormatError(f"{path}: no data rows", line=2)
    return Trajectory(inputs=np.asarray(inputs), outputs=np.asarray(outputs))


def _complex_pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in values]


def report_to_dict(report: RunReport) -> dict:
    """JSON-ready dictionary with deterministic field ordering."""
    payload = {
        "metadata": dict(sorted(report.metadata.items())),
        "estimation_start_step": report.estimation_start_step,
        "certificate": {
            "rho": float(report.certificate.rho),
            "schur_stable": bool(report.certificate.schur_stable),
            "eigenvalues": _complex_pairs(report.certificate.eigvals),
        },
        "estimates": np.asarray(report.estimates).tolist(),
        "residual_norms": np.asarray(report.residual_norms).tolist(),
        "constraint_violations": np.asarray(report.constraint_violations).tolist(),
        "error_norms": (
            None
            if report.error_norms is None
            else np.asarray(report.error_norms).tolist()
        ),
        "truth_inputs": (
            None
            if report.truth_inputs is None
            else np.asarray(report.truth_inputs).tolist()
        ),
    }
    return payload


def save_report(report: RunReport, path) -> None:
    """Serialize a run report as deterministic JSON."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report_to_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit_plot_data(report: RunReport, path) -> None:
    """Write per-step columns suitable for any plotting tool.

    Columns: k, estimate components, true input components when known,
    error norm when known, objective residual norm, constraint violation.
    """
    estimates = np.asarray(report.estimates)
    m = estimates.shape[1]
    has_truth = report.truth_inputs is not None
    header = ["k"] + [f"uhat_{i + 1}" for i in range(m)]
    if has_truth:
        header += [f"u_{i + 1}" for i in range(m)]
        header += ["error_norm"]
    header += ["residual_norm", "constraint_violation"]
    lines = [",".join(header)]
    start = report.estimation_start_step
    for i in range(len(estimates)):
        fields = [str(start + i)] + [_fmt(v) for v in estimates[i]]
        if has_truth:
            fields += [_fmt(v) for v in report.truth_inputs[i]]
            fields += [_fmt(report.error_norms[i])]
        fields += [
            _fmt(report.residual_norms[i]),
            _fmt(report.constraint_violations[i]),
        ]
        lines.append(",".join(fields))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
