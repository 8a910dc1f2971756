"""Parametric channel families.

A ParametricChannel is a differentiable family given either as a Kraus curve
theta -> {E_k(theta)} with a pure input state, or directly as a spectral
curve (output eigenvalues and eigenvectors with analytic derivatives).
Built-in families cover the standard qubit channels, the two rank-two
three-level families used throughout the test suite, and seeded random
Kraus curves generated from random Hamiltonians on system + environment.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm, expm_frechet

from .errors import ValidationError
from .linalg import DEFAULT_DIFF, DiffConfig, differentiate_curve, hermitian_part, max_abs
from .quantum import PAULI_Z, PAULIS, DensityMatrix, KrausSet, PureState

SPECTRAL_SUM_TOL = 1e-10


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues/eigenvectors of the output state with analytic partials.

    values: (r,) nonnegative, summing to one.
    vectors: (d, r) orthonormal columns.
    value_grads: (m, r) partial derivatives of the eigenvalues.
    vector_grads: (m, d, r) partial derivatives of the eigenvector columns.
    """

    values: np.ndarray
    vectors: np.ndarray
    value_grads: np.ndarray
    vector_grads: np.ndarray


@dataclass(frozen=True)
class ParametricChannel:
    """A differentiable family of channels over a box-shaped parameter domain."""

    name: str
    dim: int
    param_count: int
    domain: tuple[tuple[float, float], ...]
    input_state: PureState | None = None
    kraus_fn: Callable[[np.ndarray], np.ndarray] | None = None
    kraus_grad_fn: Callable[[np.ndarray, int], np.ndarray] | None = None
    spectral_fn: Callable[[np.ndarray], SpectralData] | None = None

    def __post_init__(self):
        if (self.kraus_fn is None) == (self.spectral_fn is None):
            raise ValidationError("channel needs exactly one of kraus_fn / spectral_fn")
        if len(self.domain) != self.param_count:
            raise ValidationError("domain box must have one interval per parameter")
        if self.input_state is not None and self.input_state.dim != self.dim:
            raise ValidationError("input state dimension does not match channel")

    @property
    def is_kraus_form(self) -> bool:
        return self.kraus_fn is not None

    def theta_vector(self, theta) -> np.ndarray:
        vec = np.atleast_1d(np.asarray(theta, dtype=float))
        if vec.shape != (self.param_count,):
            raise ValidationError(
                f"theta must have {self.param_count} component(s), got shape {vec.shape}"
            )
        return vec

    def in_domain(self, theta, margin: float = 0.0) -> bool:
        vec = self.theta_vector(theta)
        return all(
            lo + margin <= x <= hi - margin for x, (lo, hi) in zip(vec, self.domain)
        )

    def require_in_domain(self, theta, margin: float = 0.0) -> np.ndarray:
        vec = self.theta_vector(theta)
        if not self.in_domain(vec, margin):
            raise ValidationError(
                f"theta {vec.tolist()} outside domain {self.domain}"
                + (f" with stencil margin {margin}" if margin else "")
            )
        return vec

    def kraus_matrices(self, theta) -> np.ndarray:
        """Raw (n, d, d) Kraus stack at theta; element order is fixed across theta."""
        if self.kraus_fn is None:
            raise ValidationError(f"channel {self.name!r} has no Kraus form")
        with np.errstate(invalid="ignore"):
            ops = np.asarray(self.kraus_fn(self.theta_vector(theta)), dtype=complex)
        if not np.all(np.isfinite(ops)):
            raise ValidationError(f"Kraus evaluation at {theta!r} produced non-finite entries")
        return ops

    def kraus_at(self, theta) -> KrausSet:
        return KrausSet(self.kraus_matrices(theta))

    def spectral_at(self, theta) -> SpectralData:
        if self.spectral_fn is None:
            raise ValidationError(f"channel {self.name!r} has no spectral form")
        data = self.spectral_fn(self.theta_vector(theta))
        p, w = data.values, data.vectors
        if abs(float(p.sum()) - 1.0) > SPECTRAL_SUM_TOL:
            raise ValidationError(f"spectral values sum defect {abs(p.sum() - 1.0):.3e}")
        gram = w.conj().T @ w
        defect = max_abs(gram - np.eye(w.shape[1]))
        if defect > SPECTRAL_SUM_TOL:
            raise ValidationError(f"spectral vectors orthonormality defect {defect:.3e}")
        return data

    def with_input_state(self, state: PureState) -> "ParametricChannel":
        return dataclasses.replace(self, input_state=state)

    def output_matrix(self, theta) -> np.ndarray:
        """Raw output density matrix (no wrapper validation)."""
        if self.is_kraus_form:
            if self.input_state is None:
                raise ValidationError(f"channel {self.name!r} has no input state")
            ops = self.kraus_matrices(theta)
            psi = self.input_state.amplitudes
            vs = ops @ psi
            return hermitian_part(np.einsum("ki,kj->ij", vs, vs.conj()))
        data = self.spectral_at(theta)
        w = data.vectors
        return hermitian_part((w * data.values) @ w.conj().T)

    def output_state(self, theta) -> DensityMatrix:
        return DensityMatrix(self.output_matrix(theta))

    def output_matrix_partial(self, theta, index: int = 0, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
        """Partial derivative of the output density matrix along one parameter."""
        vec = self.theta_vector(theta)
        if self.is_kraus_form:
            if self.kraus_grad_fn is not None:
                ops = self.kraus_matrices(vec)
                grads = np.asarray(self.kraus_grad_fn(vec, index), dtype=complex)
                psi = self.input_state.amplitudes
                vs = ops @ psi
                dvs = grads @ psi
                out = np.einsum("ki,kj->ij", dvs, vs.conj())
                return out + out.conj().T
            return differentiate_curve(
                lambda t: self.output_matrix(_axis_point(vec, index, t)), vec[index], cfg
            )
        data = self.spectral_at(vec)
        w, dw = data.vectors, data.vector_grads[index]
        dp = data.value_grads[index]
        out = (w * dp) @ w.conj().T + (dw * data.values) @ w.conj().T
        cross = (w * data.values) @ dw.conj().T
        return out + cross


def _axis_point(theta: np.ndarray, index: int, value: float) -> np.ndarray:
    out = theta.copy()
    out[index] = value
    return out


def kraus_derivative(
    channel: ParametricChannel, theta, index: int = 0, cfg: DiffConfig = DEFAULT_DIFF
) -> np.ndarray:
    """Partial derivative of the Kraus stack along parameter `index`.

    Uses the analytic derivative when the family provides one, otherwise a
    central difference with the element ordering held fixed across the
    stencil.
    """
    if not channel.is_kraus_form:
        raise ValidationError(f"channel {channel.name!r} has no Kraus curve to differentiate")
    vec = channel.require_in_domain(theta, margin=0.0)
    if channel.kraus_grad_fn is not None:
        return np.asarray(channel.kraus_grad_fn(vec, index), dtype=complex)
    channel.require_in_domain(vec, margin=0.0)
    lo, hi = channel.domain[index]
    if not (lo <= vec[index] - cfg.max_offset and vec[index] + cfg.max_offset <= hi):
        raise ValidationError(
            f"finite-difference stencil leaves the domain at theta={vec.tolist()}"
        )
    return differentiate_curve(
        lambda t: channel.kraus_matrices(_axis_point(vec, index, t)), vec[index], cfg
    )


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------

_KET0 = PureState(np.array([1.0, 0.0]))
_PLUS = PureState(np.array([1.0, 1.0]) / np.sqrt(2.0))


def _dephasing_kraus(theta: np.ndarray) -> np.ndarray:
    (t,) = theta
    return np.array([np.sqrt(1 - t) * np.eye(2), np.sqrt(t) * PAULI_Z], dtype=complex)


def _dephasing_grad(theta: np.ndarray, index: int) -> np.ndarray:
    (t,) = theta
    return np.array(
        [-0.5 / np.sqrt(1 - t) * np.eye(2), 0.5 / np.sqrt(t) * PAULI_Z], dtype=complex
    )


def dephasing(input_state: PureState = _PLUS) -> ParametricChannel:
    """Qubit dephasing {sqrt(1-theta) I, sqrt(theta) Z}; quasi-classical on |+>."""
    return ParametricChannel(
        name="dephasing",
        dim=2,
        param_count=1,
        domain=((0.0, 1.0),),
        input_state=input_state,
        kraus_fn=_dephasing_kraus,
        kraus_grad_fn=_dephasing_grad,
    )


def rotation(axis: str = "z", input_state: PureState = _KET0) -> ParametricChannel:
    """Unitary rotation exp(-i theta sigma_axis / 2); a single Kraus operator."""
    if axis not in PAULIS:
        raise ValidationError(f"unknown rotation axis {axis!r}; expected one of x, y, z")
    sigma = PAULIS[axis]

    def kraus(theta: np.ndarray) -> np.ndarray:
        (t,) = theta
        u = np.cos(t / 2) * np.eye(2) - 1j * np.sin(t / 2) * sigma
        return u[np.newaxis]

    def grad(theta: np.ndarray, index: int) -> np.ndarray:
        return -0.5j * sigma @ kraus(theta)[0][np.newaxis]

    return ParametricChannel(
        name=f"rotation-{axis}",
        dim=2,
        param_count=1,
        domain=((-2 * np.pi, 2 * np.pi),),
        input_state=input_state,
        kraus_fn=kraus,
        kraus_grad_fn=grad,
    )


def _amplitude_damping_kraus(theta: np.ndarray) -> np.ndarray:
    (t,) = theta
    e0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - t)]], dtype=complex)
    e1 = np.array([[0.0, np.sqrt(t)], [0.0, 0.0]], dtype=complex)
    return np.array([e0, e1])


def _amplitude_damping_grad(theta: np.ndarray, index: int) -> np.ndarray:
    (t,) = theta
    d0 = np.array([[0.0, 0.0], [0.0, -0.5 / np.sqrt(1 - t)]], dtype=complex)
    d1 = np.array([[0.0, 0.5 / np.sqrt(t)], [0.0, 0.0]], dtype=complex)
    return np.array([d0, d1])


def amplitude_damping(input_state: PureState = _PLUS) -> ParametricChannel:
    """Qubit amplitude damping with decay probability theta."""
    return ParametricChannel(
        name="amplitude-damping",
        dim=2,
        param_count=1,
        domain=((0.0, 1.0),),
        input_state=input_state,
        kraus_fn=_amplitude_damping_kraus,
        kraus_grad_fn=_amplitude_damping_grad,
    )


def depolarizing(input_state: PureState = _KET0) -> ParametricChannel:
    """Qubit depolarizing in the four-element form {sqrt(1-3t/4) I, sqrt(t/4) sigma}."""
    sigmas = [np.eye(2, dtype=complex), PAULIS["x"], PAULIS["y"], PAULIS["z"]]

    def kraus(theta: np.ndarray) -> np.ndarray:
        (t,) = theta
        coeffs = [np.sqrt(1 - 3 * t / 4)] + [np.sqrt(t / 4)] * 3
        return np.array([c * s for c, s in zip(coeffs, sigmas)])

    def grad(theta: np.ndarray, index: int) -> np.ndarray:
        (t,) = theta
        coeffs = [-3 / (8 * np.sqrt(1 - 3 * t / 4))] + [1 / (8 * np.sqrt(t / 4))] * 3
        return np.array([c * s for c, s in zip(coeffs, sigmas)])

    return ParametricChannel(
        name="depolarizing",
        dim=2,
        param_count=1,
        domain=((0.0, 1.0),),
        input_state=input_state,
        kraus_fn=kraus,
        kraus_grad_fn=grad,
    )


def example1() -> ParametricChannel:
    """Rank-two three-level family with rotating support but vanishing supported overlaps.

    Output eigenvalues (t^2, 1-t^2) on unit vectors (t, sqrt(1-t^2), 0) and
    (0, 0, 1): not quasi-classical, not unitary, yet the SLD information
    equals the canonical channel bound everywhere.
    """

    def spectral(theta: np.ndarray) -> SpectralData:
        (t,) = theta
        s = np.sqrt(1 - t * t)
        values = np.array([t * t, 1 - t * t])
        vectors = np.array([[t, 0.0], [s, 0.0], [0.0, 1.0]], dtype=complex)
        value_grads = np.array([[2 * t, -2 * t]])
        vector_grads = np.zeros((1, 3, 2), dtype=complex)
        vector_grads[0, :, 0] = [1.0, -t / s, 0.0]
        return SpectralData(values, vectors, value_grads, vector_grads)

    return ParametricChannel(
        name="example1",
        dim=3,
        param_count=1,
        domain=((1e-3, 1 - 1e-3),),
        spectral_fn=spectral,
    )


def example2(
    f_coeffs: Sequence[float] = (0.0, 1.0, 0.0),
    g_coeffs: Sequence[float] = (0.0, 0.0, 1.0),
    domain: tuple[tuple[float, float], ...] = ((0.05, 0.95), (0.05, 0.95)),
) -> ParametricChannel:
    """Two-parameter rank-two three-level family driven by affine maps f, g.

    Output eigenvalues (f^2, 1-f^2) on unit vectors (g, sqrt(1-g^2), 0) and
    (0, 0, 1), with f = f0 + f1 theta1 + f2 theta2 and likewise g.  Both maps
    must stay inside [0, 1] over the domain box.
    """
    fc = np.asarray(f_coeffs, dtype=float)
    gc = np.asarray(g_coeffs, dtype=float)
    if fc.shape != (3,) or gc.shape != (3,):
        raise ValidationError("f_coeffs and g_coeffs need exactly 3 entries (const, th1, th2)")
    corners = [
        np.array([a, b]) for a in domain[0] for b in domain[1]
    ]
    for corner in corners:
        for label, coeffs in (("f", fc), ("g", gc)):
            val = coeffs[0] + coeffs[1] * corner[0] + coeffs[2] * corner[1]
            if not 0.0 <= val <= 1.0:
                raise ValidationError(
                    f"{label}(theta) = {val:.6g} leaves [0, 1] at corner {corner.tolist()}"
                )

    def spectral(theta: np.ndarray) -> SpectralData:
        f = float(np.clip(fc[0] + fc[1] * theta[0] + fc[2] * theta[1], 0.0, 1.0))
        g = float(np.clip(gc[0] + gc[1] * theta[0] + gc[2] * theta[1], 0.0, 1.0))
        s = np.sqrt(1 - g * g)
        values = np.array([f * f, 1 - f * f])
        vectors = np.array([[g, 0.0], [s, 0.0], [0.0, 1.0]], dtype=complex)
        value_grads = np.array(
            [[2 * f * fc[1], -2 * f * fc[1]], [2 * f * fc[2], -2 * f * fc[2]]]
        )
        vector_grads = np.zeros((2, 3, 2), dtype=complex)
        for l, gl in enumerate(gc[1:]):
            vector_grads[l, :, 0] = [gl, -g * gl / s, 0.0]
        return SpectralData(values, vectors, value_grads, vector_grads)

    return ParametricChannel(
        name="example2",
        dim=3,
        param_count=2,
        domain=tuple(domain),
        spectral_fn=spectral,
    )


def dephasing_two_param(input_state: PureState = _PLUS) -> ParametricChannel:
    """Two-parameter dephasing with flip weight theta1 * theta2; quasi-classical on |+>."""

    def kraus(theta: np.ndarray) -> np.ndarray:
        q = theta[0] * theta[1]
        return np.array([np.sqrt(1 - q) * np.eye(2), np.sqrt(q) * PAULI_Z], dtype=complex)

    def grad(theta: np.ndarray, index: int) -> np.ndarray:
        q = theta[0] * theta[1]
        dq = theta[1] if index == 0 else theta[0]
        return np.array(
            [-0.5 * dq / np.sqrt(1 - q) * np.eye(2), 0.5 * dq / np.sqrt(q) * PAULI_Z],
            dtype=complex,
        )

    return ParametricChannel(
        name="dephasing-2p",
        dim=2,
        param_count=2,
        domain=((0.0, 1.0), (0.0, 1.0)),
        input_state=input_state,
        kraus_fn=kraus,
        kraus_grad_fn=grad,
    )


def rotation_two_param(input_state: PureState = _KET0) -> ParametricChannel:
    """Two-parameter unitary exp(-i (theta1 X + theta2 Y) / 2)."""
    gens = [PAULIS["x"] / 2, PAULIS["y"] / 2]

    def ham(theta: np.ndarray) -> np.ndarray:
        return -1j * (theta[0] * gens[0] + theta[1] * gens[1])

    def kraus(theta: np.ndarray) -> np.ndarray:
        return expm(ham(theta))[np.newaxis]

    def grad(theta: np.ndarray, index: int) -> np.ndarray:
        return expm_frechet(ham(theta), -1j * gens[index])[1][np.newaxis]

    return ParametricChannel(
        name="rotation-2p",
        dim=2,
        param_count=2,
        domain=((-2.0, 2.0), (-2.0, 2.0)),
        input_state=input_state,
        kraus_fn=kraus,
        kraus_grad_fn=grad,
    )


def damped_rotation(input_state: PureState = _PLUS) -> ParametricChannel:
    """Amplitude damping (theta1) followed by a z rotation (theta2)."""

    def unitary(t: float) -> np.ndarray:
        return np.cos(t / 2) * np.eye(2) - 1j * np.sin(t / 2) * PAULI_Z

    def kraus(theta: np.ndarray) -> np.ndarray:
        u = unitary(theta[1])
        return np.array([u @ e for e in _amplitude_damping_kraus(theta[:1])])

    def grad(theta: np.ndarray, index: int) -> np.ndarray:
        u = unitary(theta[1])
        if index == 0:
            return np.array([u @ e for e in _amplitude_damping_grad(theta[:1], 0)])
        du = -0.5j * PAULI_Z @ u
        return np.array([du @ e for e in _amplitude_damping_kraus(theta[:1])])

    return ParametricChannel(
        name="damped-rotation",
        dim=2,
        param_count=2,
        domain=((0.0, 1.0), (-2.0, 2.0)),
        input_state=input_state,
        kraus_fn=kraus,
        kraus_grad_fn=grad,
    )


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return hermitian_part(a) * scale / np.sqrt(dim)


def random_pure_state(dim: int, rng: np.random.Generator) -> PureState:
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(amps / np.linalg.norm(amps))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus_channel(
    dim: int = 2,
    env: int = 2,
    param_count: int = 1,
    seed: int = 0,
    scale: float = 1.0,
    input_state: PureState | None = None,
) -> ParametricChannel:
    """Seeded random Kraus curve from a Hamiltonian on system x environment.

    E_k(theta) = (I x <k|) exp(-i sum_l theta_l G_l) (I x |0>), which is
    complete for every theta and smooth in theta.  env controls the number
    of Kraus operators.
    """
    if env < 1 or dim < 2:
        raise ValidationError("need dim >= 2 and env >= 1")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    total = dim * env
    gens = [random_hermitian(total, rng, scale) for _ in range(param_count)]
    if input_state is None:
        input_state = random_pure_state(dim, rng)

    def ham(theta: np.ndarray) -> np.ndarray:
        acc = np.zeros((total, total), dtype=complex)
        for t, g in zip(theta, gens):
            acc += -1j * t * g
        return acc

    def extract(v: np.ndarray) -> np.ndarray:
        # E_k[i, j] = <i, k| V |j, 0> with composite index i*env + k.
        blocks = v.reshape(dim, env, dim, env)
        return np.ascontiguousarray(np.transpose(blocks[:, :, :, 0], (1, 0, 2)))

    def kraus(theta: np.ndarray) -> np.ndarray:
        return extract(expm(ham(theta)))

    def grad(theta: np.ndarray, index: int) -> np.ndarray:
        return extract(expm_frechet(ham(theta), -1j * gens[index])[1])

    return ParametricChannel(
        name=f"random-kraus-{seed}",
        dim=dim,
        param_count=param_count,
        domain=tuple((-1.0, 1.0) for _ in range(param_count)),
        input_state=input_state,
        kraus_fn=kraus,
        kraus_grad_fn=grad,
    )


def custom_spectral(
    vectors: np.ndarray,
    value_coeffs: np.ndarray,
    domain: tuple[tuple[float, float], ...],
    name: str = "custom-spectral",
) -> ParametricChannel:
    """Quasi-classical family with fixed eigenvectors and affine eigenvalues.

    value_coeffs[k] = (c0, c1, ..., cm) gives p_k(theta) = c0 + sum_l cl theta_l.
    The constant terms must sum to one and each slope column to zero, and
    every eigenvalue must stay nonnegative over the domain box.
    """
    w = np.asarray(vectors, dtype=complex)
    coeffs = np.asarray(value_coeffs, dtype=float)
    m = len(domain)
    if w.ndim != 2 or coeffs.shape != (w.shape[1], m + 1):
        raise ValidationError(
            f"need vectors (d, r) and value_coeffs (r, {m + 1}); got {w.shape}, {coeffs.shape}"
        )
    gram_defect = max_abs(w.conj().T @ w - np.eye(w.shape[1]))
    if gram_defect > SPECTRAL_SUM_TOL:
        raise ValidationError(f"eigenvectors not orthonormal: defect {gram_defect:.3e}")
    if abs(coeffs[:, 0].sum() - 1.0) > SPECTRAL_SUM_TOL or max_abs(coeffs[:, 1:].sum(axis=0)) > SPECTRAL_SUM_TOL:
        raise ValidationError("eigenvalue coefficients do not keep the values summing to one")
    corners = np.array(np.meshgrid(*domain)).T.reshape(-1, m)
    for corner in corners:
        vals = coeffs[:, 0] + coeffs[:, 1:] @ corner
        if np.min(vals) < -SPECTRAL_SUM_TOL:
            raise ValidationError(
                f"eigenvalue becomes negative ({np.min(vals):.3e}) at corner {corner.tolist()}"
            )

    def spectral(theta: np.ndarray) -> SpectralData:
        values = np.clip(coeffs[:, 0] + coeffs[:, 1:] @ theta, 0.0, None)
        return SpectralData(
            values=values,
            vectors=w,
            value_grads=coeffs[:, 1:].T.copy(),
            vector_grads=np.zeros((m, w.shape[0], w.shape[1]), dtype=complex),
        )

    return ParametricChannel(
        name=name,
        dim=w.shape[0],
        param_count=m,
        domain=tuple(domain),
        spectral_fn=spectral,
    )


def remix_channel(
    channel: ParametricChannel,
    mixing_fn: Callable[[np.ndarray], np.ndarray],
    mixing_grad_fn: Callable[[np.ndarray, int], np.ndarray] | None = None,
    name: str | None = None,
) -> ParametricChannel:
    """Remix a Kraus curve: F_j(theta) = sum_k u_jk(theta) E_k(theta).

    The mixing matrix must be unitary at every theta (rows may exceed the
    original operator count if u is a rectangular isometry is not supported;
    u must be square).  Analytic derivatives survive when both the family
    and the mixing supply them.
    """
    if not channel.is_kraus_form:
        raise ValidationError("only Kraus-form channels can be remixed")

    def kraus(theta: np.ndarray) -> np.ndarray:
        u = np.asarray(mixing_fn(theta), dtype=complex)
        return np.tensordot(u, channel.kraus_matrices(theta), axes=(1, 0))

    grad = None
    if mixing_grad_fn is not None and channel.kraus_grad_fn is not None:
        def grad(theta: np.ndarray, index: int) -> np.ndarray:
            u = np.asarray(mixing_fn(theta), dtype=complex)
            du = np.asarray(mixing_grad_fn(theta, index), dtype=complex)
            ops = channel.kraus_matrices(theta)
            dops = np.asarray(channel.kraus_grad_fn(theta, index), dtype=complex)
            return np.tensordot(du, ops, axes=(1, 0)) + np.tensordot(u, dops, axes=(1, 0))

    return dataclasses.replace(
        channel,
        name=name or f"{channel.name}-remixed",
        kraus_fn=kraus,
        kraus_grad_fn=grad,
    )


def directional_channel(
    channel: ParametricChannel, theta, direction: np.ndarray, name: str | None = None
) -> ParametricChannel:
    """One-parameter slice t -> channel(theta + t * direction)."""
    center = channel.require_in_domain(theta)
    v = np.asarray(direction, dtype=float)
    if v.shape != (channel.param_count,):
        raise ValidationError(f"direction must have {channel.param_count} components")
    # Largest |t| keeping theta + t v inside the box.
    t_max = np.inf
    for x, vl, (lo, hi) in zip(center, v, channel.domain):
        if vl > 0:
            t_max = min(t_max, (hi - x) / vl, (x - lo) / vl)
        elif vl < 0:
            t_max = min(t_max, (x - lo) / (-vl), (hi - x) / (-vl))
    if not np.isfinite(t_max) or t_max <= 0:
        raise ValidationError("direction leaves the domain immediately")

    kraus = spectral = grad = None
    if channel.is_kraus_form:
        def kraus(tvec: np.ndarray) -> np.ndarray:
            return channel.kraus_matrices(center + tvec[0] * v)

        if channel.kraus_grad_fn is not None:
            def grad(tvec: np.ndarray, index: int) -> np.ndarray:
                point = center + tvec[0] * v
                acc = None
                for l, vl in enumerate(v):
                    if vl == 0.0:
                        continue
                    term = vl * np.asarray(channel.kraus_grad_fn(point, l), dtype=complex)
                    acc = term if acc is None else acc + term
                if acc is None:
                    acc = np.zeros_like(channel.kraus_matrices(point))
                return acc
    else:
        def spectral(tvec: np.ndarray) -> SpectralData:
            data = channel.spectral_at(center + tvec[0] * v)
            return SpectralData(
                values=data.values,
                vectors=data.vectors,
                value_grads=(v @ data.value_grads)[np.newaxis],
                vector_grads=np.tensordot(v, data.vector_grads, axes=(0, 0))[np.newaxis],
            )

    return ParametricChannel(
        name=name or f"{channel.name}-slice",
        dim=channel.dim,
        param_count=1,
        domain=((-t_max, t_max),),
        input_state=channel.input_state,
        kraus_fn=kraus,
        kraus_grad_fn=grad,
        spectral_fn=spectral,
    )


BUILTIN_FAMILIES: dict[str, Callable[..., ParametricChannel]] = {
    "dephasing": dephasing,
    "rotation": rotation,
    "amplitude-damping": amplitude_damping,
    "depolarizing": depolarizing,
    "example1": example1,
    "example2": example2,
    "dephasing-2p": dephasing_two_param,
    "rotation-2p": rotation_two_param,
    "damped-rotation": damped_rotation,
    "random-kraus": random_kraus_channel,
}


def builtin(family: str, **options) -> ParametricChannel:
    """Construct a built-in family by name."""
    key = family.strip().lower().replace("_", "-")
    factory = BUILTIN_FAMILIES.get(key)
    if factory is None:
        known = ", ".join(sorted(BUILTIN_FAMILIES))
        raise ValidationError(f"unknown family {family!r}; known families: {known}")
    try:
        return factory(**options)
    except TypeError as exc:
        raise ValidationError(f"bad options for family {family!r}: {exc}") from None
