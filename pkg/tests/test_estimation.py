import dataclasses

import numpy as np
import pytest

from qfibounds.bounds import sld_information, spectral_curve
from qfibounds.channels import builtin
from qfibounds.errors import NumericError, ValidationError
from qfibounds.estimation import (
    AdaptiveConfig,
    adaptive_experiment,
    adaptive_two_stage,
    cr_experiment,
    mle_estimate,
    optimize_input_state,
    replication_seed,
    sample_outcomes,
)
from qfibounds.quantum import (
    PureState,
    computational_basis_povm,
    pauli_basis_povm,
)

PLUS = PureState(np.array([1.0, 1.0]) / np.sqrt(2))
XPOVM = pauli_basis_povm("x")


def test_sample_outcomes_deterministic_state():
    ket0 = PureState(np.array([1.0, 0.0]))
    counts = sample_outcomes(ket0.density(), computational_basis_povm(2), 100, seed=1)
    assert counts.tolist() == [100, 0]


def test_sample_outcomes_seed_contract():
    rho = builtin("dephasing").output_state(0.2)
    a = sample_outcomes(rho, XPOVM, 1000, seed=42)
    b = sample_outcomes(rho, XPOVM, 1000, seed=42)
    c = sample_outcomes(rho, XPOVM, 1000, seed=43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_outcomes_law_of_large_numbers():
    rho = builtin("dephasing").output_state(0.2)
    n = 100_000
    counts = sample_outcomes(rho, XPOVM, n, seed=5)
    sigma = np.sqrt(0.8 * 0.2 / n)
    assert abs(counts[0] / n - 0.8) < 3 * sigma


def test_mle_binomial_closed_form():
    ch = builtin("dephasing")
    res = mle_estimate(ch, XPOVM, np.array([80, 20]))
    assert res.theta_hat == pytest.approx(0.2, abs=1e-7)
    assert not res.boundary


def test_mle_boundary_flag():
    ch = builtin("dephasing")
    res = mle_estimate(ch, XPOVM, np.array([100, 0]))
    assert res.theta_hat == pytest.approx(0.0, abs=1e-6)
    assert res.boundary


def test_mle_flat_likelihood_picks_center():
    ch = builtin("dephasing")
    res = mle_estimate(ch, computational_basis_povm(2), np.array([50, 50]))
    assert abs(res.theta_hat - 0.5) < 0.02


def test_mle_impossible_counts():
    # z rotation leaves |0> fixed, so outcome |1> never occurs in this basis
    ch = builtin("rotation", axis="z", input_state=PureState(np.array([1.0, 0.0])))
    with pytest.raises(NumericError, match="-inf"):
        mle_estimate(ch, computational_basis_povm(2), np.array([0, 10]))


def test_mle_asymptotic_consistency():
    ch = builtin("dephasing")
    theta_true = 0.2
    n = 100_000
    counts = sample_outcomes(ch.output_state(theta_true), XPOVM, n, seed=11)
    res = mle_estimate(ch, XPOVM, counts)
    fisher = 1 / (theta_true * (1 - theta_true))
    assert abs(res.theta_hat - theta_true) < 3 / np.sqrt(n * fisher)


def test_cr_experiment_ratios():
    ch = builtin("dephasing")
    run = cr_experiment(ch, 0.2, XPOVM, shots=10_000, replications=200, seed=7, povm_id="x")
    assert run.replications == 200
    assert sum(run.counts) == 10_000
    assert 0.85 < run.variance_ratios["sld"] < 1.15
    assert run.variance_ratios["channel_bound"] >= 0.85  # C >= H transfers to floors
    assert run.empirical_variance >= 0


def test_cr_experiment_uninformative_povm():
    ch = builtin("dephasing")
    run = cr_experiment(
        ch, 0.2, computational_basis_povm(2), shots=500, replications=5, seed=3, povm_id="z"
    )
    assert run.predicted_bounds["fisher"] is None
    assert run.variance_ratios["fisher"] is None


def test_cr_experiment_determinism():
    ch = builtin("dephasing")
    a = cr_experiment(ch, 0.2, XPOVM, 1000, 10, seed=9)
    b = cr_experiment(ch, 0.2, XPOVM, 1000, 10, seed=9)
    assert a == b
    assert a.theta_hats == b.theta_hats


def test_replication_seed_xor():
    assert replication_seed(5, 0) == 5
    assert replication_seed(5, 3) == 5 ^ 3


def test_adaptive_two_stage_record():
    ch = builtin("dephasing")
    run = adaptive_two_stage(ch, 0.2, 2000, AdaptiveConfig(n_pilot=500), seed=13)
    assert len(run.stages) == 2
    assert run.stages[0].povm_id == "pilot"
    assert run.stages[0].shots == 500
    assert run.stages[1].shots == 1500
    assert sum(run.counts) == 1500  # final estimate uses stage-2 data only
    assert run.povm_id.startswith("adaptive(")


def test_adaptive_degenerate_split_runs():
    ch = builtin("dephasing")
    run = adaptive_two_stage(ch, 0.3, 50, AdaptiveConfig(n_pilot=49), seed=2)
    assert run.stages[1].shots == 1
    with pytest.raises(ValidationError, match="below shots"):
        adaptive_two_stage(ch, 0.3, 50, AdaptiveConfig(n_pilot=50), seed=2)


def test_adaptive_experiment_efficiency():
    ch = builtin("dephasing")
    n, n_pilot = 10_000, 500
    run = adaptive_experiment(ch, 0.2, n, AdaptiveConfig(n_pilot=n_pilot), 200, seed=7)
    h = sld_information(spectral_curve(ch, 0.2))
    floor = 1 / ((n - n_pilot) * h)
    assert abs(run.empirical_variance / floor - 1) < 0.15
    assert run.predicted_bounds["sld"] == pytest.approx(floor, rel=1e-9)


def test_rotation_adaptive_unit_information():
    # restrict to an identifiable window: cos^2(theta/2) aliases +-theta
    ch = dataclasses.replace(builtin("rotation", axis="x"), domain=((0.05, 3.0),))
    run = adaptive_experiment(ch, 0.4, 4000, AdaptiveConfig(n_pilot=400), 100, seed=21)
    floor = 1 / ((4000 - 400) * 1.0)  # H = C = 1 for this family
    assert abs(run.empirical_variance / floor - 1) < 0.25


def test_optimize_input_rotation_sld():
    ch = builtin("rotation", axis="z")
    state, value = optimize_input_state(ch, 0.3, "sld", restarts=6, seed=1)
    assert value == pytest.approx(1.0, abs=1e-6)
    # optimum sits on the equator: equal magnitudes
    mags = np.abs(state.amplitudes)
    assert np.allclose(mags, [np.sqrt(0.5)] * 2, atol=1e-4)


def test_optimize_input_rotation_bound_is_flat():
    ch = builtin("rotation", axis="z")
    _, value = optimize_input_state(ch, 0.3, "channel-bound", restarts=3, seed=2)
    assert value == pytest.approx(1.0, abs=1e-9)


def test_optimize_input_dephasing_beats_grid_scan():
    ch = builtin("dephasing")
    theta = 0.3
    state, value = optimize_input_state(ch, theta, "sld", restarts=6, seed=3)
    assert value == pytest.approx(1 / (theta * (1 - theta)), rel=1e-6)
    # random-state scan oracle: the optimizer must not fall short of it
    rng = np.random.default_rng(0)
    best_scan = 0.0
    for _ in range(10_000):
        amps = rng.normal(size=2) + 1j * rng.normal(size=2)
        cand = ch.with_input_state(PureState(amps / np.linalg.norm(amps)))
        best_scan = max(best_scan, sld_information(spectral_curve(cand, theta)))
    assert value >= best_scan - 1e-6


def test_optimize_input_rejects_objective():
    with pytest.raises(ValidationError, match="unknown objective"):
        optimize_input_state(builtin("dephasing"), 0.3, "entropy")
