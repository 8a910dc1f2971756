"""Dense complex-matrix kernel.

Hermitian eigendecomposition with a deterministic gauge, positive-semidefinite
square roots, Loewner-order tests, and finite-difference differentiation of
matrix-valued curves.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError

HERMITICITY_TOL = 1e-10
CLUSTER_TOL = 1e-8


def max_abs(a: np.ndarray) -> float:
    """Max-entry norm, the norm used by most tolerance checks."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference settings for matrix-valued curves.

    step is in parameter units; scheme is "central-2" or "central-4";
    richardson enables one extrapolation level on top of the base scheme.
    """

    step: float = 1e-4
    scheme: str = "central-4"
    richardson: bool = False

    def __post_init__(self):
        if self.step <= 0:
            raise ValidationError(f"finite-difference step must be positive, got {self.step}")
        if self.scheme not in ("central-2", "central-4"):
            raise ValidationError(f"unknown scheme {self.scheme!r}")

    @property
    def max_offset(self) -> float:
        """Largest |offset| from the expansion point that will be evaluated."""
        return 2 * self.step if self.scheme == "central-4" else self.step


DEFAULT_DIFF = DiffConfig()


def _central_weights(h: float, scheme: str) -> dict[float, float]:
    if scheme == "central-2":
        return {-h: -0.5 / h, h: 0.5 / h}
    return {-2 * h: 1 / (12 * h), -h: -8 / (12 * h), h: 8 / (12 * h), 2 * h: -1 / (12 * h)}


def fd_weights(cfg: DiffConfig) -> dict[float, float]:
    """Offsets and weights realizing d/dtheta under cfg as one linear combination."""
    base = _central_weights(cfg.step, cfg.scheme)
    if not cfg.richardson:
        return base
    fine = _central_weights(cfg.step / 2, cfg.scheme)
    # Error orders h^2 / h^4 give extrapolation factors 4 / 16.
    fac = 4.0 if cfg.scheme == "central-2" else 16.0
    combined: dict[float, float] = {}
    for off, w in fine.items():
        combined[off] = combined.get(off, 0.0) + fac * w / (fac - 1.0)
    for off, w in base.items():
        combined[off] = combined.get(off, 0.0) - w / (fac - 1.0)
    return combined


def differentiate_curve(
    curve: Callable[[float], np.ndarray], theta: float, cfg: DiffConfig = DEFAULT_DIFF
) -> np.ndarray:
    """Finite-difference derivative of an array-valued curve at theta."""
    out = None
    for off, w in fd_weights(cfg).items():
        sample = np.asarray(curve(theta + off), dtype=complex)
        out = w * sample if out is None else out + w * sample
    return out


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _normalize_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column real positive."""
    out = vecs.copy()
    for i in range(out.shape[1]):
        col = out[:, i]
        j = int(np.argmax(np.abs(col)))
        z = col[j]
        if np.abs(z) > 0:
            out[:, i] = col * (np.conj(z) / np.abs(z))
    return out


def _cluster_slices(values: np.ndarray, tol: float):
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            yield slice(start, i)
            start = i


def hermitian_eigendecompose(
    a: np.ndarray, herm_tol: float = HERMITICITY_TOL, cluster_tol: float = CLUSTER_TOL
) -> EigenSystem:
    """Eigendecompose a Hermitian matrix with a reproducible gauge.

    Eigenvalues come back ascending.  Each eigenvector has its
    largest-magnitude entry made real positive, and columns inside a
    degenerate cluster are ordered lexicographically by (Re, Im) entries so
    repeated calls on equal inputs give identical output.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    asym = max_abs(a - a.conj().T)
    if asym >= herm_tol:
        raise ValidationError(f"matrix is not Hermitian: max asymmetry {asym:.3e}")
    values, vectors = np.linalg.eigh(hermitian_part(a))
    vectors = _normalize_phases(vectors)
    for sl in _cluster_slices(values, cluster_tol):
        if sl.stop - sl.start > 1:
            block = vectors[:, sl]
            keys = [
                tuple(x for e in block[:, i] for x in (round(e.real, 10), round(e.imag, 10)))
                for i in range(block.shape[1])
            ]
            order = sorted(range(block.shape[1]), key=keys.__getitem__)
            vectors[:, sl] = block[:, order]
    return EigenSystem(values, vectors)


def psd_sqrt(a: np.ndarray, neg_tol: float = 1e-8) -> np.ndarray:
    """Hermitian square root of a positive-semidefinite matrix.

    Eigenvalues in (-neg_tol, 0) are clamped to zero; anything more negative
    is rejected.
    """
    sys = hermitian_eigendecompose(a)
    lo = float(sys.eigenvalues[0]) if sys.eigenvalues.size else 0.0
    if lo < -neg_tol:
        raise ValidationError(f"matrix is not PSD: min eigenvalue {lo:.3e}")
    roots = np.sqrt(np.clip(sys.eigenvalues, 0.0, None))
    v = sys.eigenvectors
    return hermitian_part((v * roots) @ v.conj().T)


def loewner_leq(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> tuple[bool, float]:
    """Test A <= B in the Loewner order; returns (verdict, min eigenvalue of B - A)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = hermitian_part(b - a)
    min_eig = float(np.linalg.eigvalsh(diff)[0])
    return min_eig >= -tol, min_eig
