"""One-parameter channel bounds.

Canonical Kraus decomposition with an explicit, reproducible gauge; spectral
curves of the output state; the SLD score and quantum information; the
channel bound computed from canonical Kraus derivatives or from the spectral
curve; the gap identity between the two informations; attainability
verdicts; optimal-POVM construction and POVM optimality condition checks.

Gauge convention: the canonical operators at each stencil point are obtained
by diagonalizing the input-state Gram matrix, then permuting and re-phasing
eigenvector columns to maximal overlap with the center point (each overlap
made real positive).  The resulting curve has a well-defined derivative and
the diagonal overlaps <w_k'|w_k> it produces are reported as
gauge_source = "canonical-kraus".  Spectral-form families carry their own
analytic gauge ("spectral-form").
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .channels import ParametricChannel
from .errors import (
    ConsistencyError,
    DegeneracyError,
    SingularTermError,
    ValidationError,
)
from .linalg import (
    DEFAULT_DIFF,
    DiffConfig,
    fd_weights,
    hermitian_eigendecompose,
    hermitian_part,
    max_abs,
    psd_sqrt,
)
from .quantum import POVM, DensityMatrix, KrausSet

SUPPORT_TOL = 1e-10
DEGENERACY_TOL = 1e-8
P_FLOOR = 1e-12
DP_FLOOR = 1e-8
GRAM_DIAG_TOL = 1e-8
CURVE_SUM_TOL = 1e-9
CURVE_DERIV_TOL = 1e-6
MIN_STENCIL_OVERLAP = 0.7


# ---------------------------------------------------------------------------
# Canonical Kraus decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalKraus:
    """Canonical operators at a point, their derivative, and the mixing unitary."""

    theta: float
    operators: np.ndarray      # (n, d, d)
    derivatives: np.ndarray    # (n, d, d)
    mixing: np.ndarray         # (n, n); operators[i] = sum_j mixing[i, j] raw[j]
    weights: np.ndarray        # (n,) Gram eigenvalues, ascending

    def kraus_set(self) -> KrausSet:
        return KrausSet(self.operators)


def _gram(ops: np.ndarray, psi: np.ndarray) -> np.ndarray:
    vs = ops @ psi
    return vs @ vs.conj().T


def _phase_fix(col: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(col)))
    z = col[j]
    return col * (np.conj(z) / np.abs(z)) if np.abs(z) > 0 else col


def _resolve_degenerate_clusters(
    values: np.ndarray, vectors: np.ndarray, gram_deriv: np.ndarray, supported: np.ndarray
) -> np.ndarray:
    """Rotate supported degenerate clusters to diagonalize the projected Gram derivative.

    Eigenvector curves stay well-defined through an eigenvalue crossing when
    the first-order (projected-derivative) problem separates the branches;
    if it does not, the derivative is genuinely ill-posed and we refuse.
    """
    vectors = vectors.copy()
    start = 0
    for i in range(1, len(values) + 1):
        if i < len(values) and values[i] - values[i - 1] < DEGENERACY_TOL:
            continue
        if i - start > 1 and supported[start:i].any():
            block = vectors[:, start:i]
            sub = hermitian_eigendecompose(block.conj().T @ gram_deriv @ block)
            gaps = np.diff(sub.eigenvalues)
            if gaps.size and float(np.min(gaps)) < DEGENERACY_TOL:
                raise DegeneracyError(
                    "degenerate Gram eigenvalues with degenerate first-order splitting; "
                    "perturb theta to move off the crossing"
                )
            rotated = block @ sub.eigenvectors
            for j in range(rotated.shape[1]):
                rotated[:, j] = _phase_fix(rotated[:, j])
            vectors[:, start:i] = rotated
        start = i
    return vectors


def _align_to_center(vectors: np.ndarray, center: np.ndarray, supported: np.ndarray) -> np.ndarray:
    """Permute and re-phase columns to maximal overlap with the center columns."""
    overlaps = center.conj().T @ vectors
    rows, cols = linear_sum_assignment(-np.abs(overlaps))
    aligned = np.empty_like(vectors)
    for j, i in zip(rows, cols):
        z = overlaps[j, i]
        mag = np.abs(z)
        if supported[j] and mag < MIN_STENCIL_OVERLAP:
            raise DegeneracyError(
                f"eigenvector overlap {mag:.3f} across the stencil; "
                "eigenvalue crossing inside the finite-difference window"
            )
        aligned[:, j] = vectors[:, i] * (np.conj(z) / mag) if mag > 0 else vectors[:, i]
    return aligned


def canonical_kraus(
    channel: ParametricChannel, theta, cfg: DiffConfig = DEFAULT_DIFF
) -> CanonicalKraus:
    """Canonical Kraus operators, mixing unitary and derivative at theta.

    Requires a Kraus-form channel with a pure input state.  The derivative is
    a finite difference of the gauge-fixed canonical curve.
    """
    if not channel.is_kraus_form:
        raise ValidationError(f"channel {channel.name!r} has no Kraus curve")
    if channel.input_state is None:
        raise ValidationError(f"channel {channel.name!r} needs a pure input state")
    if channel.param_count != 1:
        raise ValidationError("canonical_kraus expects a one-parameter channel")
    vec = channel.require_in_domain(theta, margin=cfg.max_offset)
    t0 = float(vec[0])
    psi = channel.input_state.amplitudes

    weights = fd_weights(cfg)
    samples = {off: channel.kraus_matrices(np.array([t0 + off])) for off in weights}
    ops_c = channel.kraus_matrices(vec)
    gram_c = _gram(ops_c, psi)
    sys = hermitian_eigendecompose(gram_c)
    p = np.clip(sys.eigenvalues, 0.0, None)
    boundary = (p > SUPPORT_TOL) & (p <= DEGENERACY_TOL)
    if boundary.any():
        raise DegeneracyError(
            f"Gram eigenvalue {p[boundary][0]:.3e} sits at the support boundary; "
            "the supported/unsupported split is unreliable, perturb theta"
        )
    supported = p > SUPPORT_TOL
    vectors_c = sys.eigenvectors
    if supported.sum() > 1:
        sp = p[supported]
        if float(np.min(np.diff(sp))) < DEGENERACY_TOL:
            gram_deriv = sum(w * _gram(samples[off], psi) for off, w in weights.items())
            vectors_c = _resolve_degenerate_clusters(
                sys.eigenvalues, vectors_c, hermitian_part(gram_deriv), supported
            )

    canonical_c = np.tensordot(vectors_c.conj().T, ops_c, axes=(1, 0))
    deriv = np.zeros_like(canonical_c)
    for off, w in weights.items():
        sys_s = hermitian_eigendecompose(_gram(samples[off], psi))
        aligned = _align_to_center(sys_s.eigenvectors, vectors_c, supported)
        deriv += w * np.tensordot(aligned.conj().T, samples[off], axes=(1, 0))

    gram_canonical = _gram(canonical_c, psi)
    off_diag = gram_canonical - np.diag(np.diag(gram_canonical))
    if max_abs(off_diag) > GRAM_DIAG_TOL:
        raise ConsistencyError(
            f"canonical Gram matrix not diagonal: off-diagonal {max_abs(off_diag):.3e}"
        )
    return CanonicalKraus(
        theta=t0,
        operators=canonical_c,
        derivatives=deriv,
        mixing=vectors_c.conj().T,
        weights=p,
    )


# ---------------------------------------------------------------------------
# Spectral curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralCurve:
    """Output-state eigensystem and its derivative at one parameter point.

    values are ascending with entries below the support threshold zeroed;
    vectors span the full space (unsupported slots hold an orthonormal
    completion whose derivative columns are zero and never used directly).
    """

    theta: float
    values: np.ndarray         # (d,)
    vectors: np.ndarray        # (d, d)
    value_derivs: np.ndarray   # (d,)
    vector_derivs: np.ndarray  # (d, d)
    support: np.ndarray        # (d,) bool
    gauge_source: str

    def __post_init__(self):
        p, w, dp, dw = self.values, self.vectors, self.value_derivs, self.vector_derivs
        if abs(float(p.sum()) - 1.0) > CURVE_SUM_TOL:
            raise ConsistencyError(f"eigenvalues sum to {p.sum()!r}")
        if abs(float(dp.sum())) > CURVE_DERIV_TOL:
            raise ConsistencyError(f"eigenvalue derivatives sum to {dp.sum()!r}")
        gram_defect = max_abs(w.conj().T @ w - np.eye(w.shape[0]))
        if gram_defect > CURVE_SUM_TOL:
            raise ConsistencyError(f"eigenvector orthonormality defect {gram_defect:.3e}")
        overlap = dw.conj().T @ w
        diag_re = np.abs(np.real(np.diag(overlap))[self.support])
        if diag_re.size and float(np.max(diag_re)) > CURVE_DERIV_TOL:
            raise ConsistencyError(
                f"Re<w_k'|w_k> = {float(np.max(diag_re)):.3e}; norms not preserved"
            )
        ss = np.ix_(self.support, self.support)
        antisym = max_abs(overlap[ss] + overlap[ss].conj().T) if self.support.any() else 0.0
        if antisym > CURVE_DERIV_TOL:
            raise ConsistencyError(f"overlap antisymmetry defect {antisym:.3e}")

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def state_matrix(self) -> np.ndarray:
        w = self.vectors
        return hermitian_part((w * self.values) @ w.conj().T)

    def state_derivative(self) -> np.ndarray:
        w, dw = self.vectors, self.vector_derivs
        out = (w * self.value_derivs) @ w.conj().T + (dw * self.values) @ w.conj().T
        return out + (w * self.values) @ dw.conj().T

    def overlaps(self) -> np.ndarray:
        """Matrix O[j, k] = <w_j'|w_k>.

        Rows for unsupported j are recovered from supported columns through
        the antisymmetry <w_j'|w_k> = -<w_j|w_k'>*; entries with both indices
        unsupported are zero.
        """
        raw = self.vector_derivs.conj().T @ self.vectors
        out = raw.copy()
        for j in np.flatnonzero(~self.support):
            out[j, :] = -np.conj(raw[:, j])
        return out


def _orthonormal_completion(columns: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns to a full basis, deterministically."""
    cols = [columns[:, i] for i in range(columns.shape[1])]
    while len(cols) < dim:
        basis = np.column_stack(cols) if cols else np.zeros((dim, 0), dtype=complex)
        residuals = np.eye(dim, dtype=complex) - basis @ (basis.conj().T)
        norms = np.linalg.norm(residuals, axis=0)
        pick = int(np.argmax(norms))
        new = residuals[:, pick] / norms[pick]
        cols.append(_phase_fix(new))
    return np.column_stack(cols)


def _assemble_curve(
    theta: float,
    values,
    vectors,
    value_derivs,
    vector_derivs,
    dim: int,
    gauge_source: str,
) -> SpectralCurve:
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = np.asarray(vectors, dtype=complex)[:, order]
    value_derivs = np.asarray(value_derivs, dtype=float)[order]
    vector_derivs = np.asarray(vector_derivs, dtype=complex)[:, order]

    supported = values > SUPPORT_TOL
    keep = np.flatnonzero(supported)
    if keep.size > dim:
        raise ConsistencyError(f"{keep.size} supported eigenvalues exceed dimension {dim}")
    w_s = vectors[:, keep]
    completion = _orthonormal_completion(w_s, dim)[:, keep.size:]
    n_fill = dim - keep.size
    p = np.concatenate([np.zeros(n_fill), values[keep]])
    dp = np.concatenate([np.zeros(n_fill), value_derivs[keep]])
    w = np.column_stack([completion, w_s])
    dw = np.column_stack([np.zeros((dim, n_fill), dtype=complex), vector_derivs[:, keep]])
    support = np.concatenate([np.zeros(n_fill, dtype=bool), np.ones(keep.size, dtype=bool)])
    return SpectralCurve(
        theta=theta,
        values=p,
        vectors=w,
        value_derivs=dp,
        vector_derivs=dw,
        support=support,
        gauge_source=gauge_source,
    )


def spectral_curve(
    channel: ParametricChannel, theta, cfg: DiffConfig = DEFAULT_DIFF
) -> SpectralCurve:
    """Output-state spectral curve at theta.

    Kraus-form channels go through the canonical decomposition, which fixes
    the eigenvector gauge; spectral-form families supply their own analytic
    eigen-data.
    """
    if channel.param_count != 1:
        raise ValidationError("spectral_curve expects a one-parameter channel")
    vec = channel.theta_vector(theta)
    if channel.is_kraus_form:
        ck = canonical_kraus(channel, vec, cfg)
        psi = channel.input_state.amplitudes
        vs = ck.operators @ psi
        dvs = ck.derivatives @ psi
        p = ck.weights
        supported = p > SUPPORT_TOL
        # A sub-threshold mode whose weight is visibly moving means the
        # evaluation point is too close to a rank change for a consistent
        # supported/unsupported split.
        skipped_slopes = [
            2.0 * float(np.real(np.vdot(vs[k], dvs[k])))
            for k in range(len(p))
            if not supported[k]
        ]
        if any(abs(s) > CURVE_DERIV_TOL for s in skipped_slopes) or (
            skipped_slopes and abs(sum(skipped_slopes)) > 0.5 * CURVE_DERIV_TOL
        ):
            raise DegeneracyError(
                "an unsupported output eigenvalue has a non-negligible derivative "
                f"({max(skipped_slopes, key=abs):.3e}); theta is too close to a "
                "rank change, perturb it"
            )
        values, vectors, dvalues, dvectors = [], [], [], []
        for k in range(len(p)):
            if not supported[k]:
                continue
            root = np.sqrt(p[k])
            wk = vs[k] / root
            dpk = 2.0 * float(np.real(np.vdot(vs[k], dvs[k])))
            dwk = (dvs[k] - (dpk / (2 * root)) * wk) / root
            values.append(p[k])
            vectors.append(wk)
            dvalues.append(dpk)
            dvectors.append(dwk)
        return _assemble_curve(
            float(vec[0]),
            values,
            np.column_stack(vectors) if vectors else np.zeros((channel.dim, 0)),
            dvalues,
            np.column_stack(dvectors) if dvectors else np.zeros((channel.dim, 0)),
            channel.dim,
            "canonical-kraus",
        )
    channel.require_in_domain(vec)
    data = channel.spectral_at(vec)
    return _assemble_curve(
        float(vec[0]),
        data.values,
        data.vectors,
        data.value_grads[0],
        data.vector_grads[0],
        channel.dim,
        "spectral-form",
    )


# ---------------------------------------------------------------------------
# Information quantities
# ---------------------------------------------------------------------------

def _bound_terms(curve: SpectralCurve) -> tuple[float, float, float, float]:
    """Shared pieces: (classical term, H cross term, C cross term, diagonal C term).

    Cross terms use symmetrized |<w_j'|w_k>|^2 for supported pairs so the gap
    identity holds to round-off by construction.
    """
    p, dp, supp = curve.values, curve.value_derivs, curve.support
    o = curve.overlaps()
    classical = float(np.sum(dp[supp] ** 2 / p[supp])) if supp.any() else 0.0
    h_cross = c_cross = 0.0
    d = curve.dim
    for j in range(d):
        for k in range(j + 1, d):
            tot = p[j] + p[k]
            if tot <= 0:
                continue
            if supp[j] and supp[k]:
                mag2 = 0.5 * (abs(o[j, k]) ** 2 + abs(o[k, j]) ** 2)
            else:
                mag2 = abs(o[j, k]) ** 2
            h_cross += 4 * (p[j] - p[k]) ** 2 / tot * mag2
            c_cross += 4 * tot * mag2
    diag = float(np.sum(p[supp] * np.abs(np.diag(o))[supp] ** 2)) * 4 if supp.any() else 0.0
    return classical, h_cross, c_cross, diag


def sld_score(curve: SpectralCurve, residual_tol: float = 1e-6) -> np.ndarray:
    """The particular self-adjoint SLD solution induced by the spectral curve.

    In the eigenbasis: diagonal entries p_k'/p_k on the support, off-diagonal
    entries 2 (p_j - p_k) <w_j'|w_k> / (p_j + p_k) where p_j + p_k > 0, and
    zeros on the off-support block.  Verified against the defining equation
    rho' = (rho L + L rho) / 2 before returning.
    """
    p, dp, supp = curve.values, curve.value_derivs, curve.support
    o = curve.overlaps()
    d = curve.dim
    lam_frame = np.zeros((d, d), dtype=complex)
    for k in np.flatnonzero(supp):
        lam_frame[k, k] = dp[k] / p[k]
    for j in range(d):
        for k in range(j + 1, d):
            tot = p[j] + p[k]
            if tot <= 0:
                continue
            entry = 2.0 * (p[j] - p[k]) / tot * o[j, k]
            lam_frame[j, k] = entry
            lam_frame[k, j] = np.conj(entry)
    w = curve.vectors
    lam = hermitian_part(w @ lam_frame @ w.conj().T)
    rho = curve.state_matrix()
    drho = curve.state_derivative()
    residual = max_abs(drho - 0.5 * (rho @ lam + lam @ rho))
    if residual > residual_tol:
        raise ConsistencyError(
            f"SLD residual {residual:.3e}: curve data inconsistent with its own state derivative"
        )
    return lam


def sld_information(curve: SpectralCurve) -> float:
    """SLD quantum information H of the output-state family at this point."""
    classical, h_cross, _, _ = _bound_terms(curve)
    value = classical + h_cross
    lam = sld_score(curve)
    rho = curve.state_matrix()
    check = float(np.real(np.trace(rho @ lam @ lam)))
    if abs(check - value) > 1e-6 * max(1.0, abs(value)):
        raise ConsistencyError(
            f"H mismatch: eigendata formula {value!r} vs tr(rho L^2) {check!r}"
        )
    return value


def sm_bound_spectral(curve: SpectralCurve) -> float:
    """Channel bound evaluated purely from the output-state spectral curve."""
    classical, _, c_cross, diag = _bound_terms(curve)
    return classical + c_cross + diag


def sm_bound_kraus(operators, derivatives, rho0: DensityMatrix) -> float:
    """Channel bound 4 sum_k tr(E_k' rho0 E_k'^dag) for any Kraus representation."""
    ops = operators.operators if isinstance(operators, KrausSet) else np.asarray(operators)
    derivs = np.asarray(derivatives, dtype=complex)
    if derivs.shape != np.shape(ops):
        raise ValidationError(
            f"derivative stack shape {derivs.shape} does not match operators {np.shape(ops)}"
        )
    value = np.einsum("kij,jl,kil->", derivs, rho0.matrix, derivs.conj())
    return 4.0 * float(np.real(value))


def bound_gap(curve: SpectralCurve) -> float:
    """Gap 8 sum_{j,k supported} p_j p_k / (p_j + p_k) |<w_j'|w_k>|^2.

    Checked against the difference of the two bounds before returning.
    """
    p, supp = curve.values, curve.support
    o = curve.overlaps()
    gap = 0.0
    idx = np.flatnonzero(supp)
    for j in idx:
        for k in idx:
            gap += 8.0 * p[j] * p[k] / (p[j] + p[k]) * abs(o[j, k]) ** 2
    classical, h_cross, c_cross, diag = _bound_terms(curve)
    direct = (classical + c_cross + diag) - (classical + h_cross)
    scale = max(1.0, classical + c_cross + diag)
    if abs(gap - direct) > 1e-8 * scale:
        raise ConsistencyError(f"gap formula {gap!r} vs bound difference {direct!r}")
    return gap


def attainability_check(curve: SpectralCurve, tol: float = 1e-6) -> tuple[bool, float]:
    """Whether every supported overlap <w_j'|w_k> vanishes; returns (verdict, residual)."""
    o = curve.overlaps()
    idx = np.flatnonzero(curve.support)
    residual = float(np.max(np.abs(o[np.ix_(idx, idx)]))) if idx.size else 0.0
    return residual < tol, residual


def unitary_attainability(
    channel: ParametricChannel, theta, cfg: DiffConfig = DEFAULT_DIFF, tol: float = 1e-6
) -> tuple[complex, bool]:
    """Condition value tr(U rho0 U'^dag) for a single-operator channel.

    The bound is attainable for the unitary family exactly when this vanishes.
    """
    from .channels import kraus_derivative

    if not channel.is_kraus_form:
        raise ValidationError("unitary condition needs a Kraus-form channel")
    ops = channel.kraus_matrices(theta)
    if ops.shape[0] != 1:
        raise ValidationError(f"channel has {ops.shape[0]} Kraus operators; expected 1")
    if channel.input_state is None:
        raise ValidationError("channel needs an input state")
    du = kraus_derivative(channel, theta, 0, cfg)[0]
    rho0 = channel.input_state.density().matrix
    value = complex(np.trace(ops[0] @ rho0 @ du.conj().T))
    return value, abs(value) < tol


def optimal_povm_from_sld(lam: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL) -> POVM:
    """Projectors onto the SLD eigenbasis; degenerate eigenspaces merge."""
    sys = hermitian_eigendecompose(lam)
    elements = []
    start = 0
    vals = sys.eigenvalues
    for i in range(1, len(vals) + 1):
        if i < len(vals) and vals[i] - vals[i - 1] < degeneracy_tol:
            continue
        block = sys.eigenvectors[:, start:i]
        elements.append(block @ block.conj().T)
        start = i
    return POVM(np.array(elements))


def fisher_information(
    channel: ParametricChannel,
    povm: POVM,
    theta,
    cfg: DiffConfig = DEFAULT_DIFF,
    p_floor: float = P_FLOOR,
    dp_floor: float = DP_FLOOR,
) -> float:
    """Classical Fisher information of the POVM outcome distribution at theta."""
    if channel.param_count != 1:
        raise ValidationError("fisher_information expects a one-parameter channel")
    vec = channel.require_in_domain(theta)
    rho = channel.output_matrix(vec)
    drho = channel.output_matrix_partial(vec, 0, cfg)
    probs = np.clip(np.real(np.einsum("ij,mji->m", rho, povm.elements)), 0.0, None)
    dprobs = np.real(np.einsum("ij,mji->m", drho, povm.elements))
    total = 0.0
    for m, (pm, dpm) in enumerate(zip(probs, dprobs)):
        if pm > p_floor:
            total += dpm * dpm / pm
        elif abs(dpm) > dp_floor:
            raise SingularTermError(
                f"outcome {m}: probability {pm:.3e} at the support boundary with "
                f"derivative {dpm:.3e}"
            )
    return total


# ---------------------------------------------------------------------------
# POVM optimality condition checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionElement:
    index: int
    xi: float
    residual: float
    vacuous: bool


@dataclass(frozen=True)
class ConditionReport:
    elements: tuple[ConditionElement, ...]
    satisfied: bool
    tol: float
    note: str = ""

    def max_residual(self) -> float:
        return max((e.residual for e in self.elements if not e.vacuous), default=0.0)


def _fit_real_scale(pairs: list[tuple[np.ndarray, np.ndarray]], tol: float):
    """Least-squares real xi with A_i ~ xi B_i stacked over i."""
    norm_b = sum(float(np.real(np.vdot(b, b))) for _, b in pairs)
    if np.sqrt(norm_b) < tol:
        return 0.0, 0.0, True
    z = sum(complex(np.vdot(b, a)) for a, b in pairs)
    xi = float(np.real(z)) / norm_b
    residual = np.sqrt(sum(float(np.linalg.norm(a - xi * b) ** 2) for a, b in pairs))
    residual += abs(float(np.imag(z))) / norm_b
    return xi, residual, False


def povm_sld_condition_check(
    povm: POVM, lam: np.ndarray, rho: DensityMatrix, tol: float = 1e-6
) -> ConditionReport:
    """Check M^(1/2) L rho^(1/2) = xi_m M^(1/2) rho^(1/2) per POVM element.

    A real xi_m is extracted by least squares; the residual combines the
    misfit norm with the imaginary part of the fitted coefficient.
    """
    root_rho = psd_sqrt(rho.matrix)
    elements = []
    for m, mat in enumerate(povm.elements):
        root_m = psd_sqrt(mat)
        b = root_m @ root_rho
        a = root_m @ lam @ root_rho
        xi, residual, vacuous = _fit_real_scale([(a, b)], tol)
        elements.append(ConditionElement(m, xi, residual, vacuous))
    satisfied = all(e.vacuous or e.residual < tol for e in elements)
    return ConditionReport(tuple(elements), satisfied, tol)


def povm_sm_condition_check(
    povm: POVM,
    operators,
    derivatives,
    rho0: DensityMatrix,
    tol: float = 1e-6,
) -> tuple[ConditionReport, np.ndarray]:
    """Check M^(1/2) Y_k' rho0^(1/2) = xi_m M^(1/2) Y_k rho0^(1/2) for all m, k.

    One real xi_m must serve every k, so xi_m solves the stacked least-squares
    problem.  Returns the per-element report plus the (m, k) residual table.
    The condition is unsatisfiable for channels that fail the attainability
    condition, so a failed check cannot by itself disqualify a measurement
    there.
    """
    ops = operators.operators if isinstance(operators, KrausSet) else np.asarray(operators)
    derivs = np.asarray(derivatives, dtype=complex)
    if abs(rho0.purity() - 1.0) > 1e-9:
        raise ValidationError("condition check requires a pure input state")
    root_rho = psd_sqrt(rho0.matrix)
    elements = []
    table = np.zeros((len(povm), ops.shape[0]))
    for m, mat in enumerate(povm.elements):
        root_m = psd_sqrt(mat)
        pairs = [(root_m @ dk @ root_rho, root_m @ ek @ root_rho) for ek, dk in zip(ops, derivs)]
        xi, residual, vacuous = _fit_real_scale(pairs, tol)
        for k, (a, b) in enumerate(pairs):
            table[m, k] = float(np.linalg.norm(a - xi * b))
        elements.append(ConditionElement(m, xi, residual, vacuous))
    satisfied = all(e.vacuous or e.residual < tol for e in elements)
    note = (
        "unsatisfiable for channels that violate the attainability condition; "
        "a failing check does not certify the measurement as suboptimal there"
    )
    return ConditionReport(tuple(elements), satisfied, tol, note), table


# ---------------------------------------------------------------------------
# Aggregate report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """All one-parameter quantities at a point, with consistency enforced."""

    theta: float
    sld_information: float
    channel_bound: float
    gap: float
    attainable: bool
    attainability_residual: float
    attainability_tol: float
    gauge_source: str
    fisher_information: float | None = None
    representation_bound: float | None = None  # C_E of the family's own Kraus curve
    method_cross_check: float | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        h, c = self.sld_information, self.channel_bound
        if h > c + 1e-8 * max(1.0, c):
            raise ConsistencyError(f"H = {h!r} exceeds the channel bound {c!r}")
        if abs(self.gap - (c - h)) > 1e-8 * max(1.0, c):
            raise ConsistencyError(f"gap {self.gap!r} inconsistent with C - H = {c - h!r}")


def bound_report(
    channel: ParametricChannel,
    theta,
    cfg: DiffConfig = DEFAULT_DIFF,
    povm: POVM | None = None,
    attainability_tol: float = 1e-6,
) -> BoundReport:
    """Compute every one-parameter bound quantity at theta."""
    curve = spectral_curve(channel, theta, cfg)
    h = sld_information(curve)
    c_spec = sm_bound_spectral(curve)
    gap = bound_gap(curve)
    attainable, residual = attainability_check(curve, attainability_tol)
    warnings: list[str] = []
    cross = None
    c_e = None
    if channel.is_kraus_form:
        from .channels import kraus_derivative

        ck = canonical_kraus(channel, theta, cfg)
        rho0 = channel.input_state.density()
        c_kraus = sm_bound_kraus(ck.operators, ck.derivatives, rho0)
        cross = abs(c_spec - c_kraus)
        raw_ops = channel.kraus_matrices(theta)
        raw_derivs = kraus_derivative(channel, theta, 0, cfg)
        c_e = sm_bound_kraus(raw_ops, raw_derivs, rho0)
    if not attainable:
        warnings.append(
            "channel bound not attainable here: the measurement optimality "
            "condition on canonical Kraus derivatives is unsatisfiable"
        )
    f = None
    if povm is not None:
        try:
            f = fisher_information(channel, povm, theta, cfg)
        except SingularTermError as exc:
            warnings.append(f"Fisher information dropped: {exc}")
    return BoundReport(
        theta=float(channel.theta_vector(theta)[0]),
        sld_information=h,
        channel_bound=c_spec,
        gap=gap,
        attainable=attainable,
        attainability_residual=residual,
        attainability_tol=attainability_tol,
        gauge_source=curve.gauge_source,
        fisher_information=f,
        representation_bound=c_e,
        method_cross_check=cross,
        warnings=tuple(warnings),
    )


def remixing_penalty(mixing_grad: np.ndarray, weights: np.ndarray) -> float:
    """Extra bound cost 4 sum_{j,k} p_k |du_jk|^2 of a theta-dependent remixing.

    weights are the canonical Gram eigenvalues indexed like the second
    (canonical) axis of the mixing matrix.
    """
    du = np.asarray(mixing_grad, dtype=complex)
    return 4.0 * float(np.sum(np.abs(du) ** 2 @ np.asarray(weights, dtype=float)))
