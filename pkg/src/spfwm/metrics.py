"""Schmidt decomposition, heralded purity and two-source visibility."""

from __future__ import annotations

import numpy as np

from .jointstate import JointAmplitude

TRUNCATION = 1e-14


def _matrix(ja):
    return ja.values if isinstance(ja, JointAmplitude) else np.asarray(ja)


def _weight(ja):
    return np.sqrt(abs(ja.d_s * ja.d_i)) if isinstance(ja, JointAmplitude) else 1.0


def schmidt_spectrum(ja) -> np.ndarray:
    """Singular values of the quadrature-weighted amplitude, descending.

    With the grid weight included, the squared values sum to the pair
    generation probability.
    """
    a = _matrix(ja)
    if not np.all(np.isfinite(a)):
        raise ValueError("amplitude has non-finite entries")
    return np.linalg.svd(a, compute_uv=False) * _weight(ja)


def purity(ja) -> float:
    """Heralded single-photon purity ``sum(l^4) / sum(l^2)^2``."""
    lam = schmidt_spectrum(ja)
    if lam.size == 0 or lam[0] == 0:
        raise ValueError("purity undefined for a zero amplitude")
    lam = lam[lam >= TRUNCATION * lam[0]]
    l2 = lam * lam
    return float(np.sum(l2 * l2) / np.sum(l2) ** 2)


def visibility(ja1, ja2) -> float:
    """Hong-Ou-Mandel visibility between heralded photons of two sources.

    Equals ``Tr(rho_1 rho_2)`` of the normalized reduced signal states; both
    amplitudes must share one grid.
    """
    if isinstance(ja1, JointAmplitude) and isinstance(ja2, JointAmplitude):
        if not ja1.same_grid(ja2):
            raise ValueError("visibility needs both amplitudes on the identical grid")
    a1, a2 = _matrix(ja1), _matrix(ja2)
    if a1.shape != a2.shape:
        raise ValueError("amplitude shapes differ")
    n1, n2 = np.vdot(a1, a1).real, np.vdot(a2, a2).real
    if n1 == 0 or n2 == 0:
        raise ValueError("visibility undefined for a zero amplitude")
    # Tr(A1 A1^H A2 A2^H) = ||A1^H A2||_F^2
    cross = a1.conj().T @ a2
    return float(np.vdot(cross, cross).real / (n1 * n2))
