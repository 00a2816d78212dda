"""Command-line front end: orchestration, seeding, and report emission.

Exit codes: 0 success or compatible finding, 1 input error, 2 an
incompatibility finding, 3 a finding that would falsify this
implementation (a single-operator counterexample, or a mixed set that
fails compatibility). Diagnostic verbosity goes to stderr only and is
controlled by COVCHAN_LOG (off, info, debug). Reports are deterministic:
same inputs, flags, and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from . import __version__
from .channels import CHANNEL_EQUALITY_TOL, random_kraus_set
from .covariance import (
    FrameTransform,
    MixingUnitary,
    Verdict,
    analyze,
    compatibility_residual,
    conjugate_kraus,
    covariant_distance,
    make_noncovariant_solution,
    n1_covariance_search,
    phase_aligned_distance,
    phase_permutation_distance,
)
from .linalg import random_unitary, spawn_rng
from .scenario import run_scenario
from .serialization import (
    InputError,
    covariance_report_payload,
    dump_report,
    load_json,
    n1_report_payload,
    parse_frame,
    parse_kraus_set,
    parse_matrix,
    parse_scenario_config,
    run_report,
    scenario_result_payload,
)

__all__ = [
    "NONTRIVIAL_MIXING_FLOOR",
    "build_parser",
    "cmd_analyze",
    "cmd_freedom_sweep",
    "cmd_n1_search",
    "cmd_scenario",
    "freedom_sweep",
    "main",
]

LOGGER = logging.getLogger("covchan")

# A mixing unitary closer than this to phase-times-permutation counts as a
# trivial relabeling in sweep classification.
NONTRIVIAL_MIXING_FLOOR = 1e-3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, which collides with the
    # exit-code contract (2 = incompatibility); surface usage problems as
    # input errors instead.
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _configure_logging() -> None:
    value = os.environ.get("COVCHAN_LOG", "off").strip().lower()
    LOGGER.handlers.clear()
    if value in ("info", "debug"):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        LOGGER.addHandler(handler)
        LOGGER.setLevel(logging.INFO if value == "info" else logging.DEBUG)
    else:
        LOGGER.addHandler(logging.NullHandler())
        LOGGER.setLevel(logging.CRITICAL + 10)


def freedom_sweep(dim: int, rank: int, trials: int, seed: int, tol: float):
    """Randomized sweep over the mixed solution family at fixed (dim, rank).

    Each trial draws a channel, a frame, and a Haar mixing unitary, builds
    the mixed frame-S' set, and records the compatibility residual and the
    covariant distance (phase-aligned for rank 1, where the family is pure
    phases). Returns ``(payload, falsified)``: a trial falsifies the
    implementation when the mixed set fails compatibility, or, at rank 1,
    when a compatible candidate sits far from the covariant solution.
    """
    if dim < 1 or rank < 1 or trials < 1:
        raise InputError("dim, rank, and trials must all be >= 1")
    per_trial = []
    max_residual = 0.0
    min_nontrivial = math.inf
    noncovariant_compatible = 0
    nontrivial_mixings = 0
    degenerate = 0

    for i in range(trials):
        k = random_kraus_set(dim, rank, spawn_rng(seed, 0, i))
        f = FrameTransform(random_unitary(dim, spawn_rng(seed, 1, i)))
        v = MixingUnitary(random_unitary(rank, spawn_rng(seed, 2, i)))
        lprime = make_noncovariant_solution(k, f, v)
        residual = compatibility_residual(k, lprime, f)
        mixing_distance = phase_permutation_distance(v)
        if rank == 1:
            distance, _ = phase_aligned_distance(
                conjugate_kraus(k, f).ops[0], lprime.ops[0]
            )
        else:
            distance = covariant_distance(k, lprime, f)

        nontrivial = mixing_distance > NONTRIVIAL_MIXING_FLOOR
        finding = residual <= tol and distance > NONTRIVIAL_MIXING_FLOOR
        trial_degenerate = nontrivial and distance <= NONTRIVIAL_MIXING_FLOOR
        max_residual = max(max_residual, residual)
        if nontrivial:
            nontrivial_mixings += 1
            min_nontrivial = min(min_nontrivial, distance)
        if finding:
            noncovariant_compatible += 1
        if trial_degenerate:
            degenerate += 1
            LOGGER.info(
                "trial %d: nontrivial mixing collapsed to distance %.3e",
                i,
                distance,
            )
        LOGGER.debug(
            "trial %d: residual %.3e distance %.3e mixing %.3e",
            i,
            residual,
            distance,
            mixing_distance,
        )
        per_trial.append(
            {
                "trial": i,
                "residual": residual,
                "covariant_distance": distance,
                "mixing_distance": mixing_distance,
                "nontrivial_mixing": nontrivial,
                "degenerate": trial_degenerate,
            }
        )

    payload = {
        "dim": dim,
        "rank": rank,
        "per_trial": per_trial,
        "summary": {
            "max_residual": max_residual,
            "min_nontrivial_distance": (
                None if math.isinf(min_nontrivial) else min_nontrivial
            ),
            "noncovariant_compatible": noncovariant_compatible,
            "nontrivial_mixings": nontrivial_mixings,
            "degenerate": degenerate,
        },
    }
    falsified = max_residual > tol or (rank == 1 and noncovariant_compatible > 0)
    return payload, falsified


def cmd_analyze(args) -> int:
    k = parse_kraus_set(load_json(args.kraus_file), args.kraus_file, args.tol)
    lprime = parse_kraus_set(load_json(args.lprime_file), args.lprime_file, args.tol)
    frame = parse_frame(load_json(args.lambda_file), args.lambda_file, args.tol)
    try:
        rep = analyze(k, lprime, frame, args.tol)
    except ValueError as e:
        raise InputError(str(e)) from e
    LOGGER.info(
        "analyze: residual %.3e distance %s verdict %s",
        rep.residual,
        f"{rep.covariant_distance:.3e}",
        rep.verdict.value,
    )
    report = run_report(
        "analyze", 0, args.tol, 0, covariance_report_payload(rep), __version__
    )
    dump_report(report, args.out)
    return 2 if rep.verdict is Verdict.INCOMPATIBLE else 0


def cmd_freedom_sweep(args) -> int:
    payload, falsified = freedom_sweep(
        args.dim, args.rank, args.trials, args.seed, args.tol
    )
    report = run_report(
        "freedom-sweep", args.seed, args.tol, args.trials, payload, __version__
    )
    dump_report(report, args.out)
    return 3 if falsified else 0


def cmd_n1_search(args) -> int:
    k1 = parse_matrix(load_json(args.k1_file), args.k1_file)
    frame = parse_frame(load_json(args.lambda_file), args.lambda_file, args.tol)
    try:
        rep = n1_covariance_search(k1, frame, args.trials, args.seed, tol=args.tol)
    except ValueError as e:
        raise InputError(str(e)) from e
    LOGGER.info(
        "n1-search: examined %d candidates, min constrained residual %s, %d violations",
        rep.examined,
        "none" if math.isinf(rep.min_residual) else f"{rep.min_residual:.3e}",
        rep.violation_count,
    )
    report = run_report(
        "n1-search", args.seed, args.tol, args.trials, n1_report_payload(rep), __version__
    )
    dump_report(report, args.out)
    return 3 if rep.violation_count else 0


def cmd_scenario(args) -> int:
    cfg = parse_scenario_config(
        load_json(args.config_file), args.config_file, CHANNEL_EQUALITY_TOL
    )
    try:
        result = run_scenario(cfg)
    except ValueError as e:
        raise InputError(str(e)) from e
    LOGGER.info(
        "scenario: covariance defect %.3e verdict %s",
        result.covariance_defect,
        result.verdict.value,
    )
    report = run_report(
        "scenario", 0, cfg.tol, 0, scenario_result_payload(result), __version__
    )
    dump_report(report, args.out)
    return 0 if result.covariance_defect <= cfg.tol else 2


def _add_common(parser, *, trials: bool) -> None:
    parser.add_argument(
        "--tol", type=float, default=CHANNEL_EQUALITY_TOL,
        help="comparison tolerance (default 1e-9)",
    )
    if trials:
        parser.add_argument(
            "--trials", type=int, default=100, help="number of random trials"
        )
        parser.add_argument(
            "--seed", type=int, default=0, help="seed for all randomness"
        )
    parser.add_argument(
        "--out", default=None, metavar="FILE",
        help="report destination (default stdout)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="covchan",
        description="Frame-covariance analysis of Kraus channel representations.",
    )
    parser.add_argument(
        "--version", action="version", version=f"covchan {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser(
        "analyze",
        help="classify a frame-S set against a frame-S' set and a frame unitary",
    )
    p.add_argument("kraus_file", help="frame-S Kraus set (JSON)")
    p.add_argument("lprime_file", help="frame-S' Kraus set (JSON)")
    p.add_argument("lambda_file", help="frame unitary (JSON matrix)")
    _add_common(p, trials=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser(
        "freedom-sweep",
        help="randomized sweep of the mixed solution family at fixed dim and rank",
    )
    p.add_argument("--dim", type=int, default=2, help="Hilbert space dimension")
    p.add_argument("--rank", type=int, default=2, help="number of Kraus operators")
    _add_common(p, trials=True)
    p.set_defaults(func=cmd_freedom_sweep)

    p = sub.add_parser(
        "n1-search",
        help="hunt for a single-operator counterexample to covariance rigidity",
    )
    p.add_argument("k1_file", help="frame-S operator (JSON matrix, unitary)")
    p.add_argument("lambda_file", help="frame unitary (JSON matrix)")
    _add_common(p, trials=True)
    p.set_defaults(func=cmd_n1_search)

    p = sub.add_parser(
        "scenario", help="run a two-frame interventions scenario from a config file"
    )
    p.add_argument("config_file", help="scenario config (JSON)")
    p.add_argument(
        "--out", default=None, metavar="FILE",
        help="report destination (default stdout)",
    )
    p.set_defaults(func=cmd_scenario)

    return parser


def _validate_flags(args) -> None:
    tol = getattr(args, "tol", None)
    if tol is not None and (tol <= 0 or not math.isfinite(tol)):
        raise InputError("--tol must be a positive finite number")
    trials = getattr(args, "trials", None)
    if trials is not None and trials < 1:
        raise InputError("--trials must be >= 1")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate_flags(args)
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
