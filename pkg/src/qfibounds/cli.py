"""Command-line surface.

    qfi report SPEC --theta 0.2 [--povm optimal] [--format json]
    qfi sweep SPEC --theta-grid 0.1:0.9:9 [--format csv]
    qfi estimate SPEC --theta-true 0.2 --shots 10000 --reps 200 [--adaptive]
    qfi optimize-input SPEC --theta 0.3 --objective sld
    qfi verify --suite all

Exit codes: 0 success, 2 validation error, 3 numeric failure
(degeneracy / singular terms / non-finite output), 4 verification-suite
failure.  The seed falls back to the QFI_SEED environment variable, then 0.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import reporting
from .bounds import (
    bound_report,
    canonical_kraus,
    optimal_povm_from_sld,
    povm_sld_condition_check,
    povm_sm_condition_check,
    sld_score,
    spectral_curve,
    unitary_attainability,
)
from .channels import ParametricChannel
from .errors import NumericError, ValidationError
from .estimation import (
    AdaptiveConfig,
    adaptive_experiment,
    cr_experiment,
    optimize_input_state,
)
from .linalg import DiffConfig
from .multiparam import (
    fisher_matrix,
    loewner_report,
    multi_attainability_check,
    multi_spectral_curve,
    pinv_with_rank,
    sld_matrix,
    sm_matrix,
)
from .quantum import POVM, computational_basis_povm, pauli_basis_povm
from .specfile import ChannelSpec
from .verify import DEFAULT_SEED, SUITES, run_suites

POVM_CHOICES = ("optimal", "computational", "x-basis", "y-basis")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfi",
        description="Information bounds and estimation experiments for parametric quantum channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_spec=True):
        if with_spec:
            p.add_argument("spec", type=Path, help="channel spec file")
        p.add_argument("--fd-step", type=float, default=1e-4, help="finite-difference step")
        p.add_argument(
            "--fd-scheme", choices=("central-2", "central-4"), default="central-4"
        )
        p.add_argument("--richardson", action="store_true", help="extrapolate the stencil")
        p.add_argument("--tol", type=float, default=1e-6, help="verdict tolerance")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("report", help="bounds and attainability at one point")
    add_common(p)
    p.add_argument("--theta", type=float, nargs="+", required=True)
    p.add_argument("--povm", choices=POVM_CHOICES)

    p = sub.add_parser("sweep", help="bounds over a parameter grid")
    add_common(p)
    p.add_argument(
        "--theta-grid",
        required=True,
        help="grid as start:stop:count or a comma-separated list",
    )

    p = sub.add_parser("estimate", help="seeded Monte-Carlo estimation experiment")
    add_common(p)
    p.add_argument("--theta-true", type=float, required=True)
    p.add_argument("--shots", "-N", type=int, default=10000)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--povm", choices=POVM_CHOICES, default="optimal")
    p.add_argument("--adaptive", action="store_true", help="two-stage adaptive measurement")
    p.add_argument("--n-pilot", type=int, default=500)

    p = sub.add_parser("optimize-input", help="maximize H or the channel bound over inputs")
    add_common(p)
    p.add_argument("--theta", type=float, nargs="+", required=True)
    p.add_argument("--objective", choices=("sld", "channel-bound"), default="sld")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("verify", help="run the randomized property suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _seed_of(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("QFI_SEED", "0"))


def _diff_config(args) -> DiffConfig:
    return DiffConfig(step=args.fd_step, scheme=args.fd_scheme, richardson=args.richardson)


def _load_spec(path: Path) -> tuple[ChannelSpec, ParametricChannel]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read spec file {path}: {exc}") from None
    spec = ChannelSpec.from_text(text)
    return spec, spec.build()


def _resolve_povm(name: str | None, channel, theta, cfg) -> tuple[POVM | None, str | None]:
    if name is None:
        return None, None
    if name == "computational":
        return computational_basis_povm(channel.dim), name
    if name in ("x-basis", "y-basis"):
        if channel.dim != 2:
            raise ValidationError(f"{name} POVM is only defined for qubit channels")
        return pauli_basis_povm(name[0]), name
    if theta is None:
        raise ValidationError(
            "the optimal POVM comes from a single SLD score; pick a named basis "
            "for multi-parameter channels"
        )
    curve = spectral_curve(channel, theta, cfg)
    return optimal_povm_from_sld(sld_score(curve)), f"sld-optimal@{float(theta):.6g}"


def _channel_block(spec: ChannelSpec, channel) -> dict:
    return {
        "name": channel.name,
        "family": spec.family,
        "dim": channel.dim,
        "param_count": channel.param_count,
        "domain": [[lo, hi] for lo, hi in channel.domain],
        "spec": spec.source,
    }


def _point_report(channel, theta, cfg, povm, povm_id, tol) -> dict:
    report = bound_report(channel, theta, cfg, povm=povm, attainability_tol=tol)
    doc = reporting.bound_report_dict(report)
    warnings = list(doc["warnings"])
    if report.gauge_source == "canonical-kraus":
        warnings.append(
            "eigenvector gauge fixed by maximal overlap with the center point; "
            "diagonal overlaps <w'|w> are gauge-dependent"
        )
    ops = channel.kraus_matrices(theta) if channel.is_kraus_form else None
    if ops is not None and ops.shape[0] == 1:
        value, flat = unitary_attainability(channel, theta, cfg, tol)
        doc["unitary_condition"] = {
            "value": reporting.complex_value(value),
            "attainable": flat,
        }
    if povm is not None:
        doc["povm"] = povm_id
        curve = spectral_curve(channel, theta, cfg)
        lam = sld_score(curve)
        rho = channel.output_state(theta)
        doc["sld_condition"] = reporting.condition_report_dict(
            povm_sld_condition_check(povm, lam, rho, tol)
        )
        if channel.is_kraus_form:
            ck = canonical_kraus(channel, theta, cfg)
            sm_report, _ = povm_sm_condition_check(
                povm, ck.operators, ck.derivatives, channel.input_state.density(), tol
            )
            doc["sm_condition"] = reporting.condition_report_dict(sm_report)
    doc["warnings"] = warnings
    return doc


def _matrix_report(channel, theta, cfg, povm, povm_id, tol) -> dict:
    vec = channel.theta_vector(theta)
    msc = multi_spectral_curve(channel, vec, cfg)
    h = sld_matrix(msc)
    c = sm_matrix(channel, vec, cfg)
    att = multi_attainability_check(msc, tol, channel=channel, cfg=cfg)
    warnings = []
    doc = {
        "theta": [float(x) for x in vec],
        "sld_information": reporting.info_matrix_dict(h),
        "channel_bound": reporting.info_matrix_dict(c),
        "attainability": {
            "attainable": att.attainable,
            "residual": att.residual,
            "tol": att.tol,
            "quasi_classical": att.quasi_classical,
        },
        "gauge_source": msc.gauge_source,
    }
    if att.unitary_condition_values is not None:
        doc["unitary_condition"] = [
            reporting.complex_value(z) for z in att.unitary_condition_values
        ]
    inv, rank = pinv_with_rank(h)
    doc["covariance_floor"] = {"matrix": reporting.matrix_values(inv), "rank": rank}
    if rank < h.size:
        warnings.append(
            f"SLD information matrix is rank {rank} of {h.size}; covariance floor "
            "uses the pseudo-inverse"
        )
    if povm is not None:
        doc["povm"] = povm_id
        f = fisher_matrix(channel, povm, vec, cfg)
        doc["fisher_information"] = reporting.info_matrix_dict(f)
        doc["loewner"] = reporting.loewner_report_dict(loewner_report(f, h, c))
    doc["warnings"] = warnings
    return doc


def cmd_report(args) -> int:
    spec, channel = _load_spec(args.spec)
    cfg = _diff_config(args)
    theta = args.theta if len(args.theta) > 1 else args.theta[0]
    channel.require_in_domain(theta)
    povm, povm_id = _resolve_povm(
        args.povm, channel, theta if channel.param_count == 1 else None, cfg
    )
    if channel.param_count == 1:
        result = _point_report(channel, theta, cfg, povm, povm_id, args.tol)
    else:
        result = _matrix_report(channel, theta, cfg, povm, povm_id, args.tol)
    doc = {
        "tool": reporting.TOOL,
        "channel": _channel_block(spec, channel),
        "config": {
            "fd_step": args.fd_step,
            "fd_scheme": args.fd_scheme,
            "richardson": args.richardson,
            "tol": args.tol,
        },
        "result": result,
    }
    sys.stdout.write(reporting.to_json(doc))
    return 0


def _parse_grid(text: str) -> np.ndarray:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"grid {text!r} must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValidationError("grid count must be positive")
        return np.linspace(start, stop, count)
    return np.array([float(tok) for tok in text.split(",") if tok.strip()])


def cmd_sweep(args) -> int:
    spec, channel = _load_spec(args.spec)
    if channel.param_count != 1:
        raise ValidationError("sweep handles one-parameter channels")
    cfg = _diff_config(args)
    grid = _parse_grid(args.theta_grid)
    for theta in grid:
        channel.require_in_domain(float(theta))
    rows = []
    for theta in grid:
        try:
            report = bound_report(channel, float(theta), cfg, attainability_tol=args.tol)
            rows.append(reporting.bound_report_dict(report))
        except NumericError as exc:
            rows.append({"theta": float(theta), "warnings": [str(exc)]})
    if args.format == "csv":
        sys.stdout.write(reporting.sweep_csv(rows))
        return 0
    doc = {
        "tool": reporting.TOOL,
        "channel": _channel_block(spec, channel),
        "config": {
            "fd_step": args.fd_step,
            "fd_scheme": args.fd_scheme,
            "richardson": args.richardson,
            "tol": args.tol,
        },
        "points": rows,
    }
    sys.stdout.write(reporting.to_json(doc))
    return 0


def cmd_estimate(args) -> int:
    spec, channel = _load_spec(args.spec)
    if channel.param_count != 1:
        raise ValidationError("estimation handles one-parameter channels")
    cfg = _diff_config(args)
    seed = _seed_of(args)
    channel.require_in_domain(args.theta_true)
    povm, povm_id = _resolve_povm(args.povm, channel, args.theta_true, cfg)
    if args.adaptive:
        run = adaptive_experiment(
            channel,
            args.theta_true,
            args.shots,
            AdaptiveConfig(n_pilot=args.n_pilot),
            args.reps,
            seed,
            cfg,
        )
    else:
        run = cr_experiment(
            channel, args.theta_true, povm, args.shots, args.reps, seed, cfg, povm_id
        )
    doc = {
        "tool": reporting.TOOL,
        "channel": _channel_block(spec, channel),
        "experiment": run.to_dict(),
    }
    sys.stdout.write(reporting.to_json(doc))
    return 0


def cmd_optimize_input(args) -> int:
    spec, channel = _load_spec(args.spec)
    cfg = _diff_config(args)
    theta = args.theta if len(args.theta) > 1 else args.theta[0]
    channel.require_in_domain(theta)
    state, value = optimize_input_state(
        channel, theta, args.objective, restarts=args.restarts, seed=_seed_of(args), cfg=cfg
    )
    doc = {
        "tool": reporting.TOOL,
        "channel": _channel_block(spec, channel),
        "objective": args.objective,
        "theta": args.theta,
        "optimal_input": [reporting.complex_value(z) for z in state.amplitudes],
        "value": value,
    }
    sys.stdout.write(reporting.to_json(doc))
    return 0


def cmd_verify(args) -> int:
    results = run_suites([args.suite], seed=_seed_of(args) or DEFAULT_SEED)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        doc = {
            "tool": reporting.TOOL,
            "checks": [
                {"suite": r.suite, "name": r.name, "passed": r.passed, "detail": r.detail}
                for r in results
            ],
            "passed": not failed,
        }
        sys.stdout.write(reporting.to_json(doc))
    else:
        for r in results:
            flag = "PASS" if r.passed else "FAIL"
            sys.stdout.write(f"{flag} [{r.suite}] {r.name}: {r.detail}\n")
        sys.stdout.write(
            f"{'all checks passed' if not failed else f'{len(failed)} check(s) failed'}\n"
        )
    return 0 if not failed else 4


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "report": cmd_report,
        "sweep": cmd_sweep,
        "estimate": cmd_estimate,
        "optimize-input": cmd_optimize_input,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
