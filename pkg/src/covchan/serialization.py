"""JSON file formats and report serialization.

Matrices travel as ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` with
the data flat in row-major order; Kraus sets as ``{"dim": d, "ops":
[matrix, ...]}``. Parse errors always name the offending field. Report
floats rely on Python's shortest round-trip repr, so identical payloads
serialize to identical bytes; non-finite values become null. Reports are
written atomically (temp file, then rename), so a failed run never leaves
a partial report behind.
"""

from __future__ import annotations

import json
import math
import os
import sys
import tempfile

import numpy as np

from .channels import COMPLETENESS_TOL, DensityMatrix, KrausSet
from .covariance import (
    UNITARY_TOL,
    CovarianceReport,
    FrameTransform,
    MixingUnitary,
    N1SearchReport,
)
from .scenario import Intervention, ScenarioConfig, ScenarioResult, Target

__all__ = [
    "InputError",
    "covariance_report_payload",
    "dump_report",
    "load_json",
    "matrix_to_obj",
    "n1_report_payload",
    "parse_density",
    "parse_frame",
    "parse_kraus_set",
    "parse_matrix",
    "parse_scenario_config",
    "run_report",
    "scenario_result_payload",
]


class InputError(ValueError):
    """Malformed or invalid input data; maps to CLI exit code 1."""


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from e


def _as_object(obj, path: str) -> dict:
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a JSON object")
    return obj


def _get(obj, key: str, path: str):
    _as_object(obj, path)
    if key not in obj:
        raise InputError(f"{path}.{key}: missing field")
    return obj[key]


def _as_int(value, path: str, minimum: int = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{path}: expected an integer")
    if minimum is not None and value < minimum:
        raise InputError(f"{path}: must be >= {minimum}")
    return value


def _as_real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{path}: expected a number")
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{path}: must be finite")
    return value


def parse_matrix(obj, path: str) -> np.ndarray:
    """Read a MatrixFile object into a complex array."""
    rows = _as_int(_get(obj, "rows", path), f"{path}.rows", minimum=1)
    cols = _as_int(_get(obj, "cols", path), f"{path}.cols", minimum=1)
    data = _get(obj, "data", path)
    if not isinstance(data, list):
        raise InputError(f"{path}.data: expected a list of [re, im] pairs")
    if len(data) != rows * cols:
        raise InputError(
            f"{path}.data: has {len(data)} entries, expected rows*cols = {rows * cols}"
        )
    values = np.empty(rows * cols, dtype=np.complex128)
    for i, entry in enumerate(data):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise InputError(f"{path}.data[{i}]: expected an [re, im] pair")
        re = _as_real(entry[0], f"{path}.data[{i}][0]")
        im = _as_real(entry[1], f"{path}.data[{i}][1]")
        values[i] = complex(re, im)
    return values.reshape(rows, cols)


def matrix_to_obj(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def parse_kraus_set(obj, path: str, tol: float = COMPLETENESS_TOL) -> KrausSet:
    """Read ``{"dim": d, "ops": [matrix, ...]}`` into a KrausSet.

    ``"trace_preserving": false`` admits branch subsets; completeness of
    flagged sets is checked at the looser of the default and ``tol``.
    """
    dim = _as_int(_get(obj, "dim", path), f"{path}.dim", minimum=1)
    ops_obj = _get(obj, "ops", path)
    if not isinstance(ops_obj, list) or not ops_obj:
        raise InputError(f"{path}.ops: expected a nonempty list of matrices")
    ops = []
    for i, op_obj in enumerate(ops_obj):
        op = parse_matrix(op_obj, f"{path}.ops[{i}]")
        if op.shape != (dim, dim):
            raise InputError(
                f"{path}.ops[{i}]: shape {op.shape} does not match dim {dim}"
            )
        ops.append(op)
    tp = obj.get("trace_preserving", True)
    if not isinstance(tp, bool):
        raise InputError(f"{path}.trace_preserving: expected a boolean")
    try:
        return KrausSet(
            ops,
            trace_preserving=tp,
            completeness_tol=max(COMPLETENESS_TOL, tol),
        )
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


def parse_frame(obj, path: str, tol: float = UNITARY_TOL) -> FrameTransform:
    mat = parse_matrix(obj, path)
    try:
        return FrameTransform(mat, unitarity_tol=max(UNITARY_TOL, tol))
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


def parse_density(obj, path: str) -> DensityMatrix:
    mat = parse_matrix(obj, path)
    try:
        return DensityMatrix(mat)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


_TARGETS = {t.value: t for t in Target}


def parse_scenario_config(obj, path: str, default_tol: float) -> ScenarioConfig:
    """Read a scenario file: dims, initial state, frame, interventions.

    Schema:
    ``{"dim_a": int, "dim_b": int, "initial_state": matrix, "frame": matrix,
    "tol": optional number, "interventions": [{"label": str, "target":
    "A"|"B"|"JOINT", "kraus": kraus_set, "mixing": optional matrix,
    "sprime_kraus": optional kraus_set}, ...]}``
    """
    _as_object(obj, path)
    tol = default_tol
    if "tol" in obj:
        tol = _as_real(obj["tol"], f"{path}.tol")
        if tol <= 0:
            raise InputError(f"{path}.tol: must be positive")
    dim_a = _as_int(_get(obj, "dim_a", path), f"{path}.dim_a", minimum=1)
    dim_b = _as_int(_get(obj, "dim_b", path), f"{path}.dim_b", minimum=1)
    initial = parse_density(_get(obj, "initial_state", path), f"{path}.initial_state")
    frame = parse_frame(_get(obj, "frame", path), f"{path}.frame", tol)

    iv_list = _get(obj, "interventions", path)
    if not isinstance(iv_list, list):
        raise InputError(f"{path}.interventions: expected a list")
    interventions = []
    for i, iv_obj in enumerate(iv_list):
        iv_path = f"{path}.interventions[{i}]"
        _as_object(iv_obj, iv_path)
        label = iv_obj.get("label", f"intervention-{i}")
        if not isinstance(label, str):
            raise InputError(f"{iv_path}.label: expected a string")
        target_str = _get(iv_obj, "target", iv_path)
        if target_str not in _TARGETS:
            raise InputError(
                f"{iv_path}.target: expected one of {sorted(_TARGETS)}, "
                f"got {target_str!r}"
            )
        kraus = parse_kraus_set(_get(iv_obj, "kraus", iv_path), f"{iv_path}.kraus", tol)
        mixing = None
        if iv_obj.get("mixing") is not None:
            mat = parse_matrix(iv_obj["mixing"], f"{iv_path}.mixing")
            try:
                mixing = MixingUnitary(mat, unitarity_tol=max(UNITARY_TOL, tol))
            except ValueError as e:
                raise InputError(f"{iv_path}.mixing: {e}") from e
        sprime = None
        if iv_obj.get("sprime_kraus") is not None:
            sprime = parse_kraus_set(
                iv_obj["sprime_kraus"], f"{iv_path}.sprime_kraus", tol
            )
        try:
            interventions.append(
                Intervention(
                    label=label,
                    kraus=kraus,
                    target=_TARGETS[target_str],
                    mixing=mixing,
                    sprime_kraus=sprime,
                )
            )
        except ValueError as e:
            raise InputError(f"{iv_path}: {e}") from e

    try:
        return ScenarioConfig(
            initial_state=initial,
            dim_a=dim_a,
            dim_b=dim_b,
            frame=frame,
            interventions=tuple(interventions),
            tol=tol,
        )
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


def _jfloat(x: float):
    x = float(x)
    return x if math.isfinite(x) else None


def covariance_report_payload(rep: CovarianceReport) -> dict:
    return {
        "residual": _jfloat(rep.residual),
        "covariant_distance": _jfloat(rep.covariant_distance),
        "rank": rep.rank,
        "dim": rep.dim,
        "tol": _jfloat(rep.tol),
        "verdict": rep.verdict.value,
    }


def _density_obj(state: DensityMatrix | None):
    return None if state is None else matrix_to_obj(state.mat)


def scenario_result_payload(res: ScenarioResult) -> dict:
    return {
        "dim_a": res.dim_a,
        "dim_b": res.dim_b,
        "interventions": [
            {
                "label": rec.label,
                "target": rec.target.value,
                "probabilities_s": [_jfloat(p) for p in rec.probabilities_s],
                "probabilities_sprime": [_jfloat(p) for p in rec.probabilities_sprime],
                "probability_defect": _jfloat(rec.probability_defect),
            }
            for rec in res.interventions
        ],
        "branches": [
            {
                "sequence": list(br.sequence),
                "probability_s": _jfloat(br.probability_s),
                "probability_sprime": _jfloat(br.probability_sprime),
                "state_s": _density_obj(br.state_s),
                "state_sprime": _density_obj(br.state_sprime),
            }
            for br in res.branches
        ],
        "final_state_s": _density_obj(res.final_state_s),
        "final_state_sprime": _density_obj(res.final_state_sprime),
        "probability_defect": _jfloat(res.probability_defect),
        "state_defect": _jfloat(res.state_defect),
        "covariance_defect": _jfloat(res.covariance_defect),
        "representation_distance": _jfloat(res.representation_distance),
        "tol": _jfloat(res.tol),
        "verdict": res.verdict.value,
    }


def n1_report_payload(rep: N1SearchReport) -> dict:
    return {
        "dim": rep.dim,
        "trials": rep.trials,
        "tol": _jfloat(rep.tol),
        "distance_floor": _jfloat(rep.distance_floor),
        "examined": rep.examined,
        "min_residual": _jfloat(rep.min_residual),
        "best_phase_distance": (
            None if rep.best_phase_distance is None else _jfloat(rep.best_phase_distance)
        ),
        "best_candidate": (
            None if rep.best_candidate is None else matrix_to_obj(rep.best_candidate)
        ),
        "violation_count": rep.violation_count,
        "violations": [
            {
                "residual": _jfloat(v.residual),
                "phase_distance": _jfloat(v.phase_distance),
                "candidate": matrix_to_obj(v.candidate),
            }
            for v in rep.violations
        ],
    }


def run_report(
    command: str, seed: int, tolerance: float, trials: int, results, version: str
) -> dict:
    return {
        "command": command,
        "seed": seed,
        "tolerance": _jfloat(tolerance),
        "trials": trials,
        "results": results,
        "version": version,
    }


def dump_report(report: dict, out: str | None) -> None:
    """Serialize a report to stdout or atomically to a file."""
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp_path, out)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
