import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spfwm.jointstate import JointAmplitude, jta_to_jsa
from spfwm.metrics import purity, schmidt_spectrum, visibility

T = np.linspace(-8, 8, 128)


def _random(seed, n=64):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def _density_purity(a):
    # reduced signal state by direct matrix products
    rho = a @ a.conj().T
    rho = rho / np.trace(rho)
    return float(np.trace(rho @ rho).real)


def _ja(values):
    return JointAmplitude(values, T[: values.shape[0]], T[: values.shape[1]])


def test_rank_one_spectrum():
    a = np.outer(np.exp(-T**2), np.cos(T) + 2j)
    s = schmidt_spectrum(a)
    assert s[0] > 0 and np.all(s[1:] < 1e-12 * s[0])
    assert purity(a) == pytest.approx(1.0, abs=1e-12)


def test_spectrum_matches_eigen_oracle():
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32)))
    lam = np.linspace(3, 0.1, 32)
    h = q @ np.diag(lam) @ q.conj().T
    s = schmidt_spectrum(h)
    eig = np.sqrt(np.sort(np.linalg.eigvalsh(h @ h.conj().T))[::-1])
    assert np.allclose(s, eig, atol=1e-10)
    assert np.allclose(s, lam, atol=1e-10)
    assert np.all(np.diff(s) <= 0)


def test_quadrature_weight_gives_generation_probability():
    ja = _ja(_random(2, 128))
    s = schmidt_spectrum(ja)
    r = np.sum(np.abs(ja.values) ** 2) * ja.d_s * ja.d_i
    assert np.sum(s**2) == pytest.approx(r, rel=1e-12)


def test_spectrum_invariant_under_fourier_transform():
    ja = _ja(_random(3, 128))
    assert np.allclose(schmidt_spectrum(ja.values), schmidt_spectrum(jta_to_jsa(ja).values), atol=1e-8)


def test_factorable_gaussian_pure():
    a = np.outer(np.exp(-T**2 / 2), np.exp(-(T - 1) ** 2 / 3))
    assert purity(a) >= 1 - 1e-6


def test_correlated_gaussian_against_density_matrix():
    ts, ti = np.meshgrid(T, T, indexing="ij")
    a = np.exp(-(ts**2 + ti**2 - 2 * 0.5 * ts * ti) / 2)
    p = purity(a)
    assert p == pytest.approx(_density_purity(a), abs=1e-8)
    # continuum value sqrt(1 - rho^2)
    assert p == pytest.approx(np.sqrt(1 - 0.25), abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_purity_equals_density_matrix_oracle(seed):
    a = _random(seed)
    assert purity(a) == pytest.approx(_density_purity(a), abs=1e-8)


def test_self_visibility_is_purity():
    a = _random(7)
    assert visibility(a, a) == pytest.approx(purity(a), abs=1e-10)


def test_identical_factorable_states():
    a = np.outer(np.exp(-T**2 / 2), np.exp(-T**2 / 4))
    assert visibility(a, 3j * a) == pytest.approx(1.0, abs=1e-12)


def test_displaced_spectra_are_distinguishable():
    tau, shift = 1.0, 5.0
    g = np.exp(-T**2 / 4)
    f1 = np.exp(-T**2 / (2 * tau**2))
    f2 = f1 * np.exp(1j * shift * T)
    v = visibility(np.outer(f1, g), np.outer(f2, g))
    assert v == pytest.approx(np.exp(-(shift * tau) ** 2 / 2), rel=1e-6)
    assert v < 1e-3


def test_grid_and_zero_checks():
    a = _ja(_random(8, 16))
    b = JointAmplitude(a.values, a.axis_s + 1.0, a.axis_i)
    with pytest.raises(ValueError):
        visibility(a, b)
    with pytest.raises(ValueError):
        purity(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        visibility(np.zeros((4, 4)), np.ones((4, 4)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 24))
def test_bounds_symmetry_and_cauchy_schwarz(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    pa, pb = purity(a), purity(b)
    v = visibility(a, b)
    assert -1e-10 <= pa <= 1 + 1e-10 and -1e-10 <= v <= 1 + 1e-10
    assert abs(v - visibility(b, a)) < 1e-12
    assert v <= np.sqrt(pa * pb) + 1e-10
