"""Multi-parameter matrix bounds.

Fisher, SLD and channel-bound matrices for channels with several parameters,
Loewner-order comparisons, the matrix attainability condition, and the
directional-reduction consistency checks that tie every multi-parameter
quantity back to one-parameter slices.

Every parameter direction uses the gauge of the one-parameter machinery
anchored at the same center point, so the per-parameter eigendata live in a
common frame and no mixed partials are ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import (
    DEGENERACY_TOL,
    DP_FLOOR,
    P_FLOOR,
    SUPPORT_TOL,
    SpectralCurve,
    _align_to_center,
    _assemble_curve,
    _gram,
    canonical_kraus,
    sld_information,
    sld_score,
    sm_bound_spectral,
    spectral_curve,
)
from .channels import ParametricChannel, directional_channel
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
    loewner_leq,
    max_abs,
)
from .quantum import POVM


@dataclass(frozen=True)
class InfoMatrix:
    """Real symmetric PSD information matrix; kind is fisher | sld | sm."""

    entries: np.ndarray
    kind: str

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"information matrix must be square, got {m.shape}")
        asym = max_abs(m - m.T)
        if asym > 1e-9 * max(1.0, max_abs(m)):
            raise ConsistencyError(f"{self.kind} matrix asymmetry {asym:.3e}")
        sym = (m + m.T) / 2
        min_eig = float(np.linalg.eigvalsh(sym)[0])
        if min_eig < -1e-9 * max(1.0, max_abs(m)):
            raise ConsistencyError(f"{self.kind} matrix min eigenvalue {min_eig:.3e}")
        sym.setflags(write=False)
        object.__setattr__(self, "entries", sym)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def pinv_with_rank(info: InfoMatrix, rcond: float = 1e-12) -> tuple[np.ndarray, int]:
    """Pseudo-inverse with the numerical rank, for covariance lower bounds.

    The inverse-information covariance bound presumes an invertible matrix;
    for singular ones we disclose the rank alongside the pseudo-inverse.
    """
    entries = info.entries
    rank = int(np.linalg.matrix_rank(entries, tol=rcond * max(1.0, max_abs(entries))))
    return np.linalg.pinv(entries, rcond=rcond), rank


@dataclass(frozen=True)
class MultiSpectralCurve:
    """Shared output eigensystem with one derivative set per parameter."""

    theta: np.ndarray            # (m,)
    values: np.ndarray           # (d,)
    vectors: np.ndarray          # (d, d)
    value_partials: np.ndarray   # (m, d)
    vector_partials: np.ndarray  # (m, d, d)
    support: np.ndarray          # (d,) bool
    gauge_source: str

    def __post_init__(self):
        for l in range(self.param_count):
            self.slice(l)  # runs the one-parameter invariant checks

    @property
    def param_count(self) -> int:
        return self.value_partials.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def slice(self, index: int) -> SpectralCurve:
        return SpectralCurve(
            theta=float(self.theta[index]),
            values=self.values,
            vectors=self.vectors,
            value_derivs=self.value_partials[index],
            vector_derivs=self.vector_partials[index],
            support=self.support,
            gauge_source=self.gauge_source,
        )

    def directional(self, direction: np.ndarray) -> SpectralCurve:
        """Curve of the one-parameter slice along a direction, by linearity."""
        v = np.asarray(direction, dtype=float)
        return SpectralCurve(
            theta=0.0,
            values=self.values,
            vectors=self.vectors,
            value_derivs=v @ self.value_partials,
            vector_derivs=np.tensordot(v, self.vector_partials, axes=(0, 0)),
            support=self.support,
            gauge_source=self.gauge_source,
        )

    def state_matrix(self) -> np.ndarray:
        w = self.vectors
        return hermitian_part((w * self.values) @ w.conj().T)


@dataclass(frozen=True)
class MultiCanonicalKraus:
    """Canonical operators at a point with one derivative stack per parameter."""

    theta: np.ndarray
    operators: np.ndarray      # (n, d, d)
    partials: np.ndarray       # (m, n, d, d)
    mixing: np.ndarray
    weights: np.ndarray


def canonical_kraus_multi(
    channel: ParametricChannel, theta, cfg: DiffConfig = DEFAULT_DIFF
) -> MultiCanonicalKraus:
    """Canonical decomposition with per-parameter derivatives, one shared gauge.

    Supported degenerate Gram eigenvalues are refused here: a crossing can
    split differently along different axes, which would break the shared
    center frame.
    """
    if not channel.is_kraus_form:
        raise ValidationError(f"channel {channel.name!r} has no Kraus curve")
    if channel.input_state is None:
        raise ValidationError(f"channel {channel.name!r} needs a pure input state")
    vec = channel.require_in_domain(theta, margin=cfg.max_offset)
    psi = channel.input_state.amplitudes

    ops_c = channel.kraus_matrices(vec)
    sys = hermitian_eigendecompose(_gram(ops_c, psi))
    p = np.clip(sys.eigenvalues, 0.0, None)
    boundary = (p > SUPPORT_TOL) & (p <= DEGENERACY_TOL)
    if boundary.any():
        raise DegeneracyError(
            f"Gram eigenvalue {p[boundary][0]:.3e} sits at the support boundary; "
            "the supported/unsupported split is unreliable, perturb theta"
        )
    supported = p > SUPPORT_TOL
    sp = p[supported]
    if sp.size > 1 and float(np.min(np.diff(sp))) < DEGENERACY_TOL:
        raise DegeneracyError(
            "supported Gram eigenvalues are degenerate at the center point; "
            "perturb theta to separate them"
        )
    vectors_c = sys.eigenvectors
    canonical_c = np.tensordot(vectors_c.conj().T, ops_c, axes=(1, 0))

    weights = fd_weights(cfg)
    partials = np.zeros((channel.param_count,) + canonical_c.shape, dtype=complex)
    for l in range(channel.param_count):
        for off, w in weights.items():
            point = vec.copy()
            point[l] += off
            sample = channel.kraus_matrices(point)
            sys_s = hermitian_eigendecompose(_gram(sample, psi))
            aligned = _align_to_center(sys_s.eigenvectors, vectors_c, supported)
            partials[l] += w * np.tensordot(aligned.conj().T, sample, axes=(1, 0))
    return MultiCanonicalKraus(
        theta=vec,
        operators=canonical_c,
        partials=partials,
        mixing=vectors_c.conj().T,
        weights=p,
    )


def multi_spectral_curve(
    channel: ParametricChannel, theta, cfg: DiffConfig = DEFAULT_DIFF
) -> MultiSpectralCurve:
    """Output-state eigensystem with per-parameter derivatives at theta."""
    vec = channel.theta_vector(theta)
    m = channel.param_count
    if channel.is_kraus_form:
        mck = canonical_kraus_multi(channel, vec, cfg)
        psi = channel.input_state.amplitudes
        vs = mck.operators @ psi
        dvs = mck.partials @ psi  # (m, n, d)
        p = mck.weights
        for l in range(m):
            slopes = [
                2.0 * float(np.real(np.vdot(vs[k], dvs[l, k])))
                for k in np.flatnonzero(p <= SUPPORT_TOL)
            ]
            if any(abs(s) > 1e-6 for s in slopes) or (
                slopes and abs(sum(slopes)) > 0.5e-6
            ):
                raise DegeneracyError(
                    "an unsupported output eigenvalue moves along parameter "
                    f"{l}; theta is too close to a rank change, perturb it"
                )
        keep = np.flatnonzero(p > SUPPORT_TOL)
        values = p[keep]
        vectors = np.column_stack([vs[k] / np.sqrt(p[k]) for k in keep])
        value_grads = np.zeros((m, keep.size))
        vector_grads = np.zeros((m, channel.dim, keep.size), dtype=complex)
        for l in range(m):
            for i, k in enumerate(keep):
                root = np.sqrt(p[k])
                dpk = 2.0 * float(np.real(np.vdot(vs[k], dvs[l, k])))
                value_grads[l, i] = dpk
                vector_grads[l, :, i] = (dvs[l, k] - (dpk / (2 * root)) * vectors[:, i]) / root
        gauge = "canonical-kraus"
    else:
        channel.require_in_domain(vec)
        data = channel.spectral_at(vec)
        values, vectors = data.values, data.vectors
        value_grads, vector_grads = data.value_grads, data.vector_grads
        gauge = "spectral-form"

    # Shared ordering and completion via the one-parameter assembler.
    base = _assemble_curve(
        0.0, values, vectors, value_grads[0], vector_grads[0], channel.dim, gauge
    )
    d = channel.dim
    value_partials = np.zeros((m, d))
    vector_partials = np.zeros((m, d, d), dtype=complex)
    # Map assembled supported slots back to input modes by matching vectors.
    overlaps = np.abs(vectors.conj().T @ base.vectors)  # (r, d)
    for slot in np.flatnonzero(base.support):
        src = int(np.argmax(overlaps[:, slot]))
        for l in range(m):
            value_partials[l, slot] = value_grads[l, src]
            vector_partials[l, :, slot] = vector_grads[l, :, src]
    return MultiSpectralCurve(
        theta=vec,
        values=base.values,
        vectors=base.vectors,
        value_partials=value_partials,
        vector_partials=vector_partials,
        support=base.support,
        gauge_source=gauge,
    )


def sld_matrix(curve: MultiSpectralCurve) -> InfoMatrix:
    """SLD information matrix H_jk = Re tr(L_j rho L_k) from per-parameter scores."""
    m = curve.param_count
    rho = curve.state_matrix()
    scores = [sld_score(curve.slice(l)) for l in range(m)]
    entries = np.zeros((m, m))
    for j in range(m):
        for k in range(j, m):
            val = float(np.real(np.trace(scores[j] @ rho @ scores[k])))
            entries[j, k] = entries[k, j] = val
    return InfoMatrix(entries, "sld")


def sm_matrix(
    channel: ParametricChannel, theta, cfg: DiffConfig = DEFAULT_DIFF
) -> InfoMatrix:
    """Channel-bound matrix.

    Kraus-form channels use C_jk = 4 sum_l Re tr(dY_l/dth_j rho0 (dY_l/dth_k)^dag)
    on the canonical operators; spectral-form families assemble the same
    quadratic form from the eigendata by polarization.
    """
    vec = channel.theta_vector(theta)
    m = channel.param_count
    entries = np.zeros((m, m))
    if channel.is_kraus_form:
        mck = canonical_kraus_multi(channel, vec, cfg)
        psi = channel.input_state.amplitudes
        dvs = mck.partials @ psi  # (m, n, d)
        for j in range(m):
            for k in range(j, m):
                val = 4.0 * float(np.real(np.sum(np.conj(dvs[k]) * dvs[j])))
                entries[j, k] = entries[k, j] = val
        return InfoMatrix(entries, "sm")
    curve = multi_spectral_curve(channel, vec, cfg)
    basis = np.eye(m)
    diag = [sm_bound_spectral(curve.directional(basis[l])) for l in range(m)]
    for j in range(m):
        entries[j, j] = diag[j]
        for k in range(j + 1, m):
            mixed = sm_bound_spectral(curve.directional(basis[j] + basis[k]))
            entries[j, k] = entries[k, j] = 0.5 * (mixed - diag[j] - diag[k])
    return InfoMatrix(entries, "sm")


def fisher_matrix(
    channel: ParametricChannel,
    povm: POVM,
    theta,
    cfg: DiffConfig = DEFAULT_DIFF,
    p_floor: float = P_FLOOR,
    dp_floor: float = DP_FLOOR,
) -> InfoMatrix:
    """Classical Fisher information matrix of the POVM outcome distribution."""
    vec = channel.require_in_domain(theta)
    m = channel.param_count
    rho = channel.output_matrix(vec)
    probs = np.clip(np.real(np.einsum("ij,mji->m", rho, povm.elements)), 0.0, None)
    dprobs = np.empty((m, len(povm)))
    for l in range(m):
        drho = channel.output_matrix_partial(vec, l, cfg)
        dprobs[l] = np.real(np.einsum("ij,mji->m", drho, povm.elements))
    entries = np.zeros((m, m))
    for i, pm in enumerate(probs):
        if pm > p_floor:
            entries += np.outer(dprobs[:, i], dprobs[:, i]) / pm
        elif float(np.max(np.abs(dprobs[:, i]))) > dp_floor:
            raise SingularTermError(
                f"outcome {i}: probability {pm:.3e} at the support boundary with a "
                "large derivative"
            )
    return InfoMatrix(entries, "fisher")


@dataclass(frozen=True)
class MultiAttainability:
    attainable: bool
    residual: float
    tol: float
    quasi_classical: bool
    unitary_condition_values: tuple[complex, ...] | None = None


def multi_attainability_check(
    curve: MultiSpectralCurve,
    tol: float = 1e-6,
    channel: ParametricChannel | None = None,
    cfg: DiffConfig = DEFAULT_DIFF,
) -> MultiAttainability:
    """Matrix-bound equality condition: all supported <w_j^(l)|w_k> vanish.

    Also reports the quasi-classical specialization (all eigenvector partials
    vanish) and, when the channel is a single-operator family, the
    per-parameter unitary condition values tr(U rho0 dU^dag).
    """
    idx = np.flatnonzero(curve.support)
    residual = 0.0
    quasi = True
    for l in range(curve.param_count):
        o = curve.slice(l).overlaps()
        if idx.size:
            residual = max(residual, float(np.max(np.abs(o[np.ix_(idx, idx)]))))
        quasi = quasi and max_abs(curve.vector_partials[l][:, curve.support]) < tol
    unitary_values = None
    if channel is not None and channel.is_kraus_form:
        ops = channel.kraus_matrices(curve.theta)
        if ops.shape[0] == 1 and channel.input_state is not None:
            from .channels import kraus_derivative

            rho0 = channel.input_state.density().matrix
            vals = []
            for l in range(channel.param_count):
                du = kraus_derivative(channel, curve.theta, l, cfg)[0]
                vals.append(complex(np.trace(ops[0] @ rho0 @ du.conj().T)))
            unitary_values = tuple(vals)
    return MultiAttainability(residual < tol, residual, tol, quasi, unitary_values)


@dataclass(frozen=True)
class LoewnerVerdict:
    holds: bool
    min_eigenvalue: float


@dataclass(frozen=True)
class LoewnerReport:
    fisher_le_sld: LoewnerVerdict
    sld_le_sm: LoewnerVerdict
    fisher_le_sm: LoewnerVerdict
    tol: float

    @property
    def all_hold(self) -> bool:
        return self.fisher_le_sld.holds and self.sld_le_sm.holds and self.fisher_le_sm.holds


def loewner_report(
    fisher: InfoMatrix, sld: InfoMatrix, sm: InfoMatrix, tol: float | None = None
) -> LoewnerReport:
    """Ordered verdicts F <= H <= C in the Loewner order with min-eigenvalue slack."""
    if not (fisher.size == sld.size == sm.size):
        raise ValidationError("information matrices have mismatched sizes")
    if tol is None:
        tol = 1e-8 * (1.0 + max_abs(sm.entries))
    checks = {}
    for name, (a, b) in {
        "fisher_le_sld": (fisher, sld),
        "sld_le_sm": (sld, sm),
        "fisher_le_sm": (fisher, sm),
    }.items():
        holds, min_eig = loewner_leq(a.entries, b.entries, tol)
        checks[name] = LoewnerVerdict(holds, min_eig)
    return LoewnerReport(tol=tol, **checks)


@dataclass(frozen=True)
class DirectionalCheck:
    """Consistency of one-parameter slices with the multi-parameter data."""

    direction: np.ndarray
    kraus_deriv_mismatch: float | None
    sld_slice: float
    sld_quadratic: float
    sm_slice: float
    sm_quadratic: float
    rel_tol: float

    @property
    def sld_mismatch(self) -> float:
        return abs(self.sld_slice - self.sld_quadratic) / max(1.0, abs(self.sld_quadratic))

    @property
    def sm_mismatch(self) -> float:
        return abs(self.sm_slice - self.sm_quadratic) / max(1.0, abs(self.sm_quadratic))

    @property
    def passed(self) -> bool:
        ok = self.sld_mismatch < self.rel_tol and self.sm_mismatch < self.rel_tol
        if self.kraus_deriv_mismatch is not None:
            ok = ok and self.kraus_deriv_mismatch < self.rel_tol
        return ok


def directional_reduction_check(
    channel: ParametricChannel,
    theta,
    direction,
    cfg: DiffConfig = DEFAULT_DIFF,
    rel_tol: float = 1e-5,
    sld: InfoMatrix | None = None,
    sm: InfoMatrix | None = None,
) -> DirectionalCheck:
    """Compare the one-parameter channel along a direction with the matrix data.

    Checks that the canonical-operator derivative of the slice equals the
    linear combination of per-parameter derivatives (supported operators
    only), and that the slice's scalar informations match v^T H v and
    v^T C v.
    """
    vec = channel.require_in_domain(theta, margin=0.0)
    v = np.asarray(direction, dtype=float)
    slice_ch = directional_channel(channel, vec, v)
    kraus_mismatch = None
    if channel.is_kraus_form:
        mck = canonical_kraus_multi(channel, vec, cfg)
        ck = canonical_kraus(slice_ch, 0.0, cfg)
        combo = np.tensordot(v, mck.partials, axes=(0, 0))
        supported = mck.weights > SUPPORT_TOL
        diff = ck.derivatives[supported] - combo[supported]
        kraus_mismatch = max_abs(diff) / max(1.0, max_abs(combo[supported]))
    slice_curve = spectral_curve(slice_ch, 0.0, cfg)
    h_slice = sld_information(slice_curve)
    c_slice = sm_bound_spectral(slice_curve)
    if sld is None:
        sld = sld_matrix(multi_spectral_curve(channel, vec, cfg))
    if sm is None:
        sm = sm_matrix(channel, vec, cfg)
    return DirectionalCheck(
        direction=v,
        kraus_deriv_mismatch=kraus_mismatch,
        sld_slice=h_slice,
        sld_quadratic=float(v @ sld.entries @ v),
        sm_slice=c_slice,
        sm_quadratic=float(v @ sm.entries @ v),
        rel_tol=rel_tol,
    )
