import numpy as np
import pytest
from scipy.linalg import expm

from qfibounds.bounds import (
    attainability_check,
    bound_gap,
    bound_report,
    canonical_kraus,
    fisher_information,
    optimal_povm_from_sld,
    povm_sld_condition_check,
    povm_sm_condition_check,
    remixing_penalty,
    sld_information,
    sld_score,
    sm_bound_kraus,
    sm_bound_spectral,
    spectral_curve,
    unitary_attainability,
)
from qfibounds.channels import (
    builtin,
    kraus_derivative,
    random_hermitian,
    random_kraus_channel,
    random_pure_state,
    random_unitary,
    remix_channel,
)
from qfibounds.errors import ValidationError
from qfibounds.linalg import max_abs
from qfibounds.quantum import POVM, PureState, computational_basis_povm, pauli_basis_povm
from qfibounds.verify import one_param_battery, random_povm

PLUS = PureState(np.array([1.0, 1.0]) / np.sqrt(2))
KET0 = PureState(np.array([1.0, 0.0]))


# ---------------------------------------------------------------------------
# Independent oracle: H from the raw state family, straight from the
# defining equation, with no spectral-curve machinery involved.
# ---------------------------------------------------------------------------

def sld_information_from_state(rho_fn, theta: float, h: float = 1e-5) -> float:
    rho = rho_fn(theta)
    drho = (
        8 * (rho_fn(theta + h) - rho_fn(theta - h))
        - (rho_fn(theta + 2 * h) - rho_fn(theta - 2 * h))
    ) / (12 * h)
    vals, vecs = np.linalg.eigh(rho)
    total = 0.0
    for j in range(len(vals)):
        for k in range(len(vals)):
            s = vals[j] + vals[k]
            if s > 1e-12:
                total += 2 * abs(vecs[:, j].conj() @ drho @ vecs[:, k]) ** 2 / s
    return total


# ---------------------------------------------------------------------------
# Canonical Kraus decomposition
# ---------------------------------------------------------------------------

def test_canonical_dephasing_gram_already_diagonal():
    ch = builtin("dephasing")
    ck = canonical_kraus(ch, 0.2)
    assert np.allclose(sorted(ck.weights), [0.2, 0.8])
    # mixing is a (possibly permuted) identity: one unit entry per row
    assert np.allclose(np.sort(np.abs(ck.mixing).ravel()), [0, 0, 1, 1])


def test_canonical_unitary_single_operator():
    ch = builtin("rotation", axis="z")
    ck = canonical_kraus(ch, 0.3)
    assert ck.operators.shape[0] == 1
    assert np.allclose(ck.mixing, [[1.0]])
    assert np.allclose(ck.operators[0], ch.kraus_matrices(0.3)[0])


def test_canonical_recovers_hadamard_remixed_dephasing():
    """Brute-force Gram diagonalization oracle on a scrambled representation."""
    ch = builtin("dephasing")
    had = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    rem = remix_channel(ch, lambda t: had, lambda t, i: np.zeros((2, 2)))
    ck = canonical_kraus(rem, 0.2)
    psi = ch.input_state.amplitudes
    vs = rem.kraus_matrices(0.2) @ psi
    gram = vs @ vs.conj().T
    oracle = np.sort(np.linalg.eigvalsh(gram))
    assert np.allclose(ck.weights, oracle)
    assert np.allclose(sorted(ck.weights), [0.2, 0.8])
    canon_gram = (ck.operators @ psi) @ (ck.operators @ psi).conj().T
    assert max_abs(canon_gram - np.diag(np.diag(canon_gram))) < 1e-10


def test_canonical_requires_kraus_form_and_input():
    with pytest.raises(ValidationError, match="no Kraus curve"):
        canonical_kraus(builtin("example1"), 0.5)


# ---------------------------------------------------------------------------
# Spectral curves
# ---------------------------------------------------------------------------

def test_spectral_curve_example1():
    curve = spectral_curve(builtin("example1"), 0.6)
    assert np.allclose(np.sort(curve.values), [0.0, 0.36, 0.64])
    o = curve.overlaps()
    idx = np.flatnonzero(curve.support)
    assert max_abs(o[np.ix_(idx, idx)]) < 1e-12


def test_spectral_curve_dephasing_fixed_eigenvectors():
    curve = spectral_curve(builtin("dephasing"), 0.2)
    assert np.allclose(np.sort(curve.values), [0.2, 0.8])
    assert max_abs(curve.vector_derivs) < 1e-9


def test_spectral_curve_rotation_gauge_overlap():
    """Canonical gauge keeps the phase of the unitary family: <w'|w> = i/2 on |0>."""
    curve = spectral_curve(builtin("rotation", axis="z"), 0.3)
    o = curve.overlaps()
    k = int(np.flatnonzero(curve.support)[0])
    assert o[k, k] == pytest.approx(0.5j, abs=1e-9)


def test_spectral_curve_derivatives_match_value_slopes():
    # dephasing eigenvalues are (theta, 1 - theta): slopes +- 1
    curve = spectral_curve(builtin("dephasing"), 0.3)
    order = np.argsort(curve.values)
    assert np.allclose(curve.value_derivs[order], [1.0, -1.0], atol=1e-9)


def test_dephasing_resolves_eigenvalue_crossing():
    """At theta = 0.5 the output is maximally mixed; the projected-derivative
    rotation keeps the curve well-defined through the crossing."""
    curve = spectral_curve(builtin("dephasing"), 0.5)
    h = sld_information(curve)
    assert h == pytest.approx(4.0, rel=1e-9)


# ---------------------------------------------------------------------------
# SLD score and information
# ---------------------------------------------------------------------------

def test_sld_score_dephasing_diagonal():
    curve = spectral_curve(builtin("dephasing"), 0.2)
    lam = sld_score(curve)
    assert np.allclose(np.linalg.eigvalsh(lam), [-1.25, 5.0], atol=1e-9)
    plus = PLUS.amplitudes
    assert plus.conj() @ lam @ plus == pytest.approx(-1.25, abs=1e-9)


def test_sld_score_rotation_vanishes():
    curve = spectral_curve(builtin("rotation", axis="z"), 0.3)
    assert max_abs(sld_score(curve)) < 1e-9


def test_sld_defining_equation_random_channels():
    for channel, theta in one_param_battery(seed=77, count=10):
        curve = spectral_curve(channel, theta)
        lam = sld_score(curve)
        rho = curve.state_matrix()
        drho = curve.state_derivative()
        assert max_abs(drho - 0.5 * (rho @ lam + lam @ rho)) < 1e-6


def test_sld_information_dephasing():
    assert sld_information(spectral_curve(builtin("dephasing"), 0.2)) == pytest.approx(
        6.25, rel=1e-9
    )


def test_sld_information_example1_state_oracle():
    """H of the rank-two rotating family, pinned by the from-the-state oracle:
    H(t) = 4 (1 + t^2) / (1 - t^2)."""
    ch = builtin("example1")

    def rho_fn(t):
        return ch.output_matrix(np.array([t]))

    for t in (0.2, 0.4, 0.6, 0.8):
        h = sld_information(spectral_curve(ch, t))
        assert h == pytest.approx(sld_information_from_state(rho_fn, t), rel=1e-7)
        assert h == pytest.approx(4 * (1 + t * t) / (1 - t * t), rel=1e-9)


def test_sld_information_rotation_eigenstate():
    assert sld_information(spectral_curve(builtin("rotation", axis="z"), 0.3)) < 1e-10


def test_pure_state_unitary_oracle():
    """For unitary families H = 4 (<dpsi|dpsi> - |<dpsi|psi>|^2)."""
    rng = np.random.default_rng(6)
    for seed in range(5):
        ch = random_kraus_channel(dim=3, env=1, seed=seed, input_state=random_pure_state(3, rng))
        theta = 0.37
        psi = ch.input_state.amplitudes
        u = ch.kraus_matrices(theta)[0]
        du = kraus_derivative(ch, theta, 0)[0]
        v, dv = u @ psi, du @ psi
        oracle = 4 * (np.vdot(dv, dv).real - abs(np.vdot(dv, v)) ** 2)
        h = sld_information(spectral_curve(ch, theta))
        assert h == pytest.approx(oracle, rel=1e-7, abs=1e-9)


# ---------------------------------------------------------------------------
# Channel bound, both routes
# ---------------------------------------------------------------------------

def test_sm_bound_dephasing_both_routes():
    ch = builtin("dephasing")
    curve = spectral_curve(ch, 0.2)
    assert sm_bound_spectral(curve) == pytest.approx(6.25, rel=1e-9)
    ck = canonical_kraus(ch, 0.2)
    c_kraus = sm_bound_kraus(ck.operators, ck.derivatives, ch.input_state.density())
    assert c_kraus == pytest.approx(6.25, rel=1e-9)


def test_sm_bound_rotation():
    ch = builtin("rotation", axis="z")
    assert sm_bound_spectral(spectral_curve(ch, 0.3)) == pytest.approx(1.0, rel=1e-9)
    rho0 = ch.input_state.density()
    c = sm_bound_kraus(ch.kraus_matrices(0.3), kraus_derivative(ch, 0.3), rho0)
    assert c == pytest.approx(1.0, rel=1e-12)


def test_sm_bound_kraus_representation_dependence():
    """A theta-dependent remixing strictly inflates the representation bound."""
    ch = builtin("dephasing")
    gen = np.array([[0.0, 1.0], [1.0, 0.0]])
    mix = lambda t: expm(-1j * t[0] * gen)
    dmix = lambda t, i: -1j * gen @ expm(-1j * t[0] * gen)
    rem = remix_channel(ch, mix, dmix)
    rho0 = ch.input_state.density()
    c_e = sm_bound_kraus(rem.kraus_matrices(0.2), kraus_derivative(rem, 0.2), rho0)
    assert c_e > 6.25 + 1e-3


def test_remixing_penalty_identity():
    """Measured C_E - C equals 4 sum p_k |du_jk|^2 for an attainable channel."""
    ch = builtin("dephasing")
    theta = 0.2
    rng = np.random.default_rng(8)
    gen = random_hermitian(2, rng)
    mix = lambda t: expm(-1j * t[0] * gen)
    dmix = lambda t, i: -1j * gen @ expm(-1j * t[0] * gen)
    rem = remix_channel(ch, mix, dmix)
    rho0 = ch.input_state.density()
    ck = canonical_kraus(ch, theta)
    c_ups = sm_bound_kraus(ck.operators, ck.derivatives, rho0)
    c_e = sm_bound_kraus(rem.kraus_matrices(theta), kraus_derivative(rem, theta), rho0)
    du_canonical = dmix(np.array([theta]), 0) @ ck.mixing.conj().T
    penalty = remixing_penalty(du_canonical, ck.weights)
    assert c_e - c_ups == pytest.approx(penalty, rel=1e-6)


# ---------------------------------------------------------------------------
# Gap and attainability
# ---------------------------------------------------------------------------

def test_gap_example1_vanishes():
    for t in (0.2, 0.5, 0.8):
        assert bound_gap(spectral_curve(builtin("example1"), t)) < 1e-12


def test_gap_rotation_on_pole():
    curve = spectral_curve(builtin("rotation", axis="z"), 0.3)
    assert bound_gap(curve) == pytest.approx(1.0, rel=1e-9)


def test_amplitude_damping_frozen_values():
    """theta = 0.5 on |+>: H = 3/2 (state-route oracle), C = 2, gap = 1/2."""
    ch = builtin("amplitude-damping")
    curve = spectral_curve(ch, 0.5)
    h = sld_information(curve)
    c = sm_bound_spectral(curve)
    gap = bound_gap(curve)
    assert h == pytest.approx(1.5, rel=1e-9)
    assert h == pytest.approx(
        sld_information_from_state(lambda t: ch.output_matrix(np.array([t])), 0.5), rel=1e-7
    )
    assert c == pytest.approx(2.0, rel=1e-9)
    assert gap == pytest.approx(c - h, abs=1e-10)
    attainable, residual = attainability_check(curve)
    assert not attainable and residual > 0.01
    assert residual == pytest.approx(1 / np.sqrt(2), rel=1e-6)


def test_attainability_examples():
    assert attainability_check(spectral_curve(builtin("example1"), 0.6), 1e-9) == (
        True,
        pytest.approx(0.0, abs=1e-10),
    )
    ok, residual = attainability_check(spectral_curve(builtin("dephasing"), 0.3))
    assert ok and residual < 1e-12


def test_unitary_attainability_examples():
    value, ok = unitary_attainability(builtin("rotation", axis="z"), 0.4)
    assert value == pytest.approx(0.5j, abs=1e-12) and not ok
    value, ok = unitary_attainability(
        builtin("rotation", axis="z", input_state=PLUS), 0.4
    )
    assert abs(value) < 1e-12 and ok
    value, ok = unitary_attainability(builtin("rotation", axis="x"), 0.4)
    assert abs(value) < 1e-12 and ok
    with pytest.raises(ValidationError, match="expected 1"):
        unitary_attainability(builtin("dephasing"), 0.4)


# ---------------------------------------------------------------------------
# Optimal POVMs and Fisher information
# ---------------------------------------------------------------------------

def test_optimal_povm_examples():
    lam = sld_score(spectral_curve(builtin("dephasing"), 0.2))
    povm = optimal_povm_from_sld(lam)
    probs = np.real([PLUS.amplitudes.conj() @ m @ PLUS.amplitudes for m in povm.elements])
    assert np.allclose(np.sort(probs), [0.0, 1.0], atol=1e-9)  # projectors onto |+->, |->

    povm = optimal_povm_from_sld(np.zeros((2, 2)))
    assert len(povm) == 1 and np.allclose(povm.elements[0], np.eye(2))

    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    povm = optimal_povm_from_sld(sx)
    assert len(povm) == 2
    for m in povm.elements:
        assert max_abs(m @ sx - sx @ m) < 1e-12


def test_fisher_information_examples():
    dz = builtin("dephasing")
    assert fisher_information(dz, pauli_basis_povm("x"), 0.2) == pytest.approx(6.25, rel=1e-9)
    assert fisher_information(dz, computational_basis_povm(2), 0.2) == pytest.approx(
        0.0, abs=1e-12
    )
    rot = builtin("rotation", axis="z", input_state=PLUS)
    for theta in (0.1, 0.7, 1.3):
        f = fisher_information(rot, pauli_basis_povm("y"), theta)
        assert f == pytest.approx(1.0, rel=1e-9)


def test_fisher_optimal_povm_achieves_h():
    ch = builtin("amplitude-damping")
    curve = spectral_curve(ch, 0.3)
    povm = optimal_povm_from_sld(sld_score(curve))
    f = fisher_information(ch, povm, 0.3)
    assert f == pytest.approx(sld_information(curve), rel=1e-6)


# ---------------------------------------------------------------------------
# POVM condition checks
# ---------------------------------------------------------------------------

def test_sld_condition_dephasing_eigenbasis():
    ch = builtin("dephasing")
    curve = spectral_curve(ch, 0.2)
    lam = sld_score(curve)
    report = povm_sld_condition_check(pauli_basis_povm("x"), lam, ch.output_state(0.2), 1e-6)
    assert report.satisfied
    assert sorted(e.xi for e in report.elements) == pytest.approx([-1.25, 5.0], rel=1e-6)


def test_sld_condition_fails_for_uninformative_basis():
    ch = builtin("dephasing")
    lam = sld_score(spectral_curve(ch, 0.2))
    report = povm_sld_condition_check(
        computational_basis_povm(2), lam, ch.output_state(0.2), 1e-6
    )
    assert not report.satisfied
    assert report.max_residual() > 0.1


def test_sld_condition_identity_povm():
    ch = builtin("rotation", axis="z")
    lam = sld_score(spectral_curve(ch, 0.3))  # zero score
    report = povm_sld_condition_check(POVM(np.eye(2)[np.newaxis]), lam, ch.output_state(0.3))
    assert report.satisfied
    assert report.elements[0].xi == pytest.approx(0.0, abs=1e-9)


def test_sm_condition_dephasing_eigenbasis():
    ch = builtin("dephasing")
    ck = canonical_kraus(ch, 0.3)
    report, table = povm_sm_condition_check(
        pauli_basis_povm("x"), ck.operators, ck.derivatives, ch.input_state.density()
    )
    assert report.satisfied
    assert table.shape == (2, 2)
    assert "attainability" in report.note


def test_sm_condition_fails_for_nonattainable_channel():
    ch = builtin("amplitude-damping")
    curve = spectral_curve(ch, 0.5)
    povm = optimal_povm_from_sld(sld_score(curve))
    ck = canonical_kraus(ch, 0.5)
    report, _ = povm_sm_condition_check(
        povm, ck.operators, ck.derivatives, ch.input_state.density()
    )
    assert not report.satisfied


def test_sm_condition_rotation_x_optimal_basis():
    ch = builtin("rotation", axis="x")
    theta = 0.4
    curve = spectral_curve(ch, theta)
    povm = optimal_povm_from_sld(sld_score(curve))
    ck = canonical_kraus(ch, theta)
    report, _ = povm_sm_condition_check(
        povm, ck.operators, ck.derivatives, ch.input_state.density()
    )
    assert report.satisfied


# ---------------------------------------------------------------------------
# Aggregate report
# ---------------------------------------------------------------------------

def test_bound_report_dephasing():
    rep = bound_report(builtin("dephasing"), 0.2, povm=pauli_basis_povm("x"))
    assert rep.fisher_information == pytest.approx(6.25, rel=1e-9)
    assert rep.sld_information == pytest.approx(6.25, rel=1e-9)
    assert rep.channel_bound == pytest.approx(6.25, rel=1e-9)
    assert rep.representation_bound == pytest.approx(6.25, rel=1e-9)
    assert rep.attainable
    assert rep.method_cross_check < 1e-9
    assert rep.gauge_source == "canonical-kraus"


def test_bound_report_warns_when_not_attainable():
    rep = bound_report(builtin("amplitude-damping"), 0.5)
    assert not rep.attainable
    assert any("unsatisfiable" in w for w in rep.warnings)


def test_ordering_random_battery_small():
    rng = np.random.default_rng(11)
    for channel, theta in one_param_battery(seed=123, count=12):
        curve = spectral_curve(channel, theta)
        h = sld_information(curve)
        c = sm_bound_spectral(curve)
        f = fisher_information(channel, random_povm(channel.dim, rng), theta)
        assert f <= h + 1e-7
        assert h <= c + 1e-8
        assert bound_gap(curve) == pytest.approx(c - h, abs=1e-8 * max(1.0, c))


def test_attainability_coherence():
    """Attainable => gap below d^2 tol; not attainable => strictly positive gap."""
    tol = 1e-6
    channels = [
        (builtin("dephasing"), 0.3),
        (builtin("example1"), 0.5),
        (builtin("amplitude-damping"), 0.5),
        (builtin("rotation", axis="z"), 0.3),
    ] + one_param_battery(seed=303, count=10)
    for channel, theta in channels:
        curve = spectral_curve(channel, theta)
        attainable, _ = attainability_check(curve, tol)
        gap = bound_gap(curve)
        if attainable:
            assert gap < channel.dim**2 * tol
        else:
            assert gap > 0


def test_fixed_remix_keeps_bound_above_h():
    rng = np.random.default_rng(12)
    for channel, theta in one_param_battery(seed=45, count=8):
        h = sld_information(spectral_curve(channel, theta))
        n_ops = channel.kraus_matrices(theta).shape[0]
        u = random_unitary(n_ops, rng)
        rem = remix_channel(channel, lambda t, u=u: u, lambda t, i, u=u: np.zeros_like(u))
        c_e = sm_bound_kraus(
            rem.kraus_matrices(theta),
            kraus_derivative(rem, theta, 0),
            channel.input_state.density(),
        )
        assert h <= c_e + 1e-8
