"""Randomized property suites.

Seeded batteries of random channels exercising the ordering chain
F <= H <= C (and H <= C_E for remixed representations), the gap identity,
the agreement of the Kraus and spectral routes to the channel bound, and the
directional reduction of multi-parameter quantities to one-parameter slices.
Shared by `qfi verify` and the acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import (
    attainability_check,
    bound_gap,
    canonical_kraus,
    fisher_information,
    optimal_povm_from_sld,
    sld_information,
    sld_score,
    sm_bound_kraus,
    sm_bound_spectral,
    spectral_curve,
)
from .channels import (
    ParametricChannel,
    example2,
    kraus_derivative,
    random_hermitian,
    random_kraus_channel,
    random_pure_state,
    random_unitary,
    remix_channel,
)
from .errors import DegeneracyError, NumericError
from .linalg import hermitian_eigendecompose, max_abs
from .multiparam import (
    directional_reduction_check,
    fisher_matrix,
    loewner_report,
    multi_attainability_check,
    multi_spectral_curve,
    sld_matrix,
    sm_matrix,
)
from .quantum import POVM

DEFAULT_SEED = 20260809
SUITES = ("ordering", "gap", "routes", "directional")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def random_povm(dim: int, rng: np.random.Generator, elements: int | None = None) -> POVM:
    """Random informationally nontrivial POVM via normalized random PSD parts."""
    r = elements or dim
    parts = []
    for _ in range(r):
        x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        parts.append(x @ x.conj().T)
    total = sum(parts)
    sys = hermitian_eigendecompose(total)
    inv_root = (sys.eigenvectors / np.sqrt(sys.eigenvalues)) @ sys.eigenvectors.conj().T
    return POVM(np.array([inv_root @ p @ inv_root for p in parts]))


def one_param_battery(
    seed: int = DEFAULT_SEED, count: int = 200, max_dim: int = 4
) -> list[tuple[ParametricChannel, float]]:
    """Seeded random one-parameter Kraus curves with evaluation points."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    battery = []
    for i in range(count):
        dim = int(rng.integers(2, max_dim + 1))
        env = int(rng.integers(1, dim + 1))
        channel = random_kraus_channel(
            dim=dim,
            env=env,
            param_count=1,
            seed=int(rng.integers(0, 2**63)),
            input_state=random_pure_state(dim, rng),
        )
        for _ in range(8):
            theta = float(rng.uniform(-0.6, 0.6))
            try:
                spectral_curve(channel, theta)
                battery.append((channel, theta))
                break
            except DegeneracyError:
                continue
    return battery


def two_param_battery(
    seed: int = DEFAULT_SEED, count: int = 50, max_dim: int = 3
) -> list[tuple[ParametricChannel, np.ndarray]]:
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed ^ 0xA5A5A5A5)))
    battery = []
    for i in range(count):
        dim = int(rng.integers(2, max_dim + 1))
        env = int(rng.integers(1, dim + 1))
        channel = random_kraus_channel(
            dim=dim,
            env=env,
            param_count=2,
            seed=int(rng.integers(0, 2**63)),
            input_state=random_pure_state(dim, rng),
        )
        for _ in range(8):
            theta = rng.uniform(-0.5, 0.5, size=2)
            try:
                multi_spectral_curve(channel, theta)
                battery.append((channel, theta))
                break
            except DegeneracyError:
                continue
    return battery


def gap_suite(seed: int = DEFAULT_SEED, count: int = 200) -> list[CheckResult]:
    """Gap formula equals C - H on every battery channel."""
    results = []
    worst = 0.0
    battery = one_param_battery(seed, count)
    for channel, theta in battery:
        curve = spectral_curve(channel, theta)
        h = sld_information(curve)
        c = sm_bound_spectral(curve)
        gap = bound_gap(curve)
        defect = abs((c - h) - gap) / max(1.0, c)
        worst = max(worst, defect)
    results.append(
        CheckResult(
            "gap",
            f"gap identity over {len(battery)} random channels",
            worst < 1e-8,
            f"worst relative defect {worst:.3e}",
        )
    )
    return results


def ordering_suite(seed: int = DEFAULT_SEED, count: int = 200) -> list[CheckResult]:
    """F <= H <= C, H <= C_E under remixing, and F = H for the SLD eigenbasis."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed ^ 0x0F0F0F0F)))
    battery = one_param_battery(seed, count)
    worst_fh = worst_hc = worst_hce = np.inf
    worst_opt = 0.0
    optimal_checked = 0
    for channel, theta in battery:
        curve = spectral_curve(channel, theta)
        h = sld_information(curve)
        c = sm_bound_spectral(curve)
        povm = random_povm(channel.dim, rng)
        f = fisher_information(channel, povm, theta)
        worst_fh = min(worst_fh, h - f)
        worst_hc = min(worst_hc, c - h)

        n_ops = channel.kraus_matrices(theta).shape[0]
        rho0 = channel.input_state.density()
        fixed = random_unitary(n_ops, rng)
        gen = random_hermitian(n_ops, rng)
        for label, mix, dmix in (
            ("fixed", lambda t, u=fixed: u, lambda t, i: np.zeros_like(fixed)),
            (
                "curve",
                lambda t, g=gen: _expm_curve(g, t[0]),
                lambda t, i, g=gen: -1j * g @ _expm_curve(g, t[0]),
            ),
        ):
            remixed = remix_channel(channel, mix, dmix, name=f"{channel.name}-{label}")
            ce = sm_bound_kraus(
                remixed.kraus_matrices(theta),
                kraus_derivative(remixed, theta, 0),
                rho0,
            )
            worst_hce = min(worst_hce, ce - h)

        lam = sld_score(curve)
        eigs = np.linalg.eigvalsh(lam)
        if len(eigs) < 2 or float(np.min(np.diff(eigs))) > 1e-4:
            f_opt = fisher_information(channel, optimal_povm_from_sld(lam), theta)
            worst_opt = max(worst_opt, abs(f_opt - h) / max(1.0, h))
            optimal_checked += 1
    results = [
        CheckResult(
            "ordering",
            f"F <= H for random POVMs over {len(battery)} channels",
            worst_fh > -1e-7,
            f"min H - F = {worst_fh:.3e}",
        ),
        CheckResult(
            "ordering",
            "H <= C on the same battery",
            worst_hc > -1e-8,
            f"min C - H = {worst_hc:.3e}",
        ),
        CheckResult(
            "ordering",
            "H <= C_E for fixed and theta-dependent remixings",
            worst_hce > -1e-8,
            f"min C_E - H = {worst_hce:.3e}",
        ),
        CheckResult(
            "ordering",
            f"SLD eigenbasis achieves F = H ({optimal_checked} nondegenerate cases)",
            worst_opt < 1e-5,
            f"worst relative misfit {worst_opt:.3e}",
        ),
    ]
    return results


def _expm_curve(generator: np.ndarray, t: float) -> np.ndarray:
    from scipy.linalg import expm

    return expm(-1j * t * generator)


def routes_suite(seed: int = DEFAULT_SEED, count: int = 200) -> list[CheckResult]:
    """Channel bound from canonical Kraus derivatives vs from the spectral curve."""
    battery = one_param_battery(seed, count)
    worst = 0.0
    for channel, theta in battery:
        curve = spectral_curve(channel, theta)
        c_spec = sm_bound_spectral(curve)
        ck = canonical_kraus(channel, theta)
        c_kraus = sm_bound_kraus(ck.operators, ck.derivatives, channel.input_state.density())
        worst = max(worst, abs(c_spec - c_kraus) / max(1.0, abs(c_spec)))
    return [
        CheckResult(
            "routes",
            f"bound route agreement over {len(battery)} channels",
            worst < 1e-6,
            f"worst relative disagreement {worst:.3e}",
        )
    ]


def directional_suite(
    seed: int = DEFAULT_SEED, count: int = 50, directions: int = 20
) -> list[CheckResult]:
    """Multi-parameter Loewner ordering and slice consistency checks."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed ^ 0x3C3C3C3C)))
    battery = two_param_battery(seed, count)
    worst_slack = np.inf
    worst_dir = 0.0
    worst_diag = 0.0
    for channel, theta in battery:
        msc = multi_spectral_curve(channel, theta)
        h = sld_matrix(msc)
        c = sm_matrix(channel, theta)
        f = fisher_matrix(channel, random_povm(channel.dim, rng), theta)
        rep = loewner_report(f, h, c)
        worst_slack = min(
            worst_slack,
            rep.fisher_le_sld.min_eigenvalue,
            rep.sld_le_sm.min_eigenvalue,
            rep.fisher_le_sm.min_eigenvalue,
        )
        for l in range(2):
            slice_curve = msc.slice(l)
            worst_diag = max(
                worst_diag,
                abs(sld_information(slice_curve) - h.entries[l, l]),
                abs(sm_bound_spectral(slice_curve) - c.entries[l, l]),
            )
        for _ in range(directions):
            v = rng.normal(size=2)
            v /= np.linalg.norm(v)
            try:
                check = directional_reduction_check(channel, theta, v, sld=h, sm=c)
            except (DegeneracyError, NumericError):
                continue
            worst_dir = max(worst_dir, check.sld_mismatch, check.sm_mismatch)
            if check.kraus_deriv_mismatch is not None:
                worst_dir = max(worst_dir, check.kraus_deriv_mismatch)
    results = [
        CheckResult(
            "directional",
            f"Loewner chain F <= H <= C over {len(battery)} two-parameter channels",
            worst_slack > -1e-8,
            f"min eigenvalue slack {worst_slack:.3e}",
        ),
        CheckResult(
            "directional",
            "matrix diagonals match one-parameter slices",
            worst_diag < 1e-8,
            f"worst diagonal mismatch {worst_diag:.3e}",
        ),
        CheckResult(
            "directional",
            f"slice consistency over {directions} random directions per channel",
            worst_dir < 1e-5,
            f"worst relative mismatch {worst_dir:.3e}",
        ),
    ]
    # The two-parameter equality family: matrix bounds coincide and the
    # attainability residual vanishes.
    ch = example2()
    theta = np.array([0.6, 0.3])
    msc = multi_spectral_curve(ch, theta)
    h = sld_matrix(msc)
    c = sm_matrix(ch, theta)
    att = multi_attainability_check(msc, tol=1e-9)
    entry_gap = max_abs(c.entries - h.entries)
    results.append(
        CheckResult(
            "directional",
            "equality family: H = C as matrices with vanishing residual",
            entry_gap < 1e-8 and att.attainable,
            f"max entry difference {entry_gap:.3e}, residual {att.residual:.3e}",
        )
    )
    return results


def run_suites(names, seed: int = DEFAULT_SEED) -> list[CheckResult]:
    picked = list(SUITES) if "all" in names else list(names)
    runners = {
        "ordering": ordering_suite,
        "gap": gap_suite,
        "routes": routes_suite,
        "directional": directional_suite,
    }
    results: list[CheckResult] = []
    for name in picked:
        if name not in runners:
            raise ValueError(f"unknown suite {name!r}")
        results.extend(runners[name](seed))
    return results
