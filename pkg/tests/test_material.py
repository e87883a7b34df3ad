import numpy as np
import pytest
from hypothesis import given, strategies as st

from spfwm.material import (
    BAND_UM,
    BandError,
    GlassComposition,
    index_contrast,
    load_coefficients,
    parse_coefficients,
    refractive_index,
    sellmeier_for_composition,
)


def test_fused_silica_reference_index():
    # widely tabulated fused-silica value at 1064 nm
    n = refractive_index(sellmeier_for_composition(GlassComposition(0.0)), 1.064)
    assert n == pytest.approx(1.44963, abs=2e-5)


def test_index_contrast_at_design_doping():
    assert index_contrast(GlassComposition(0.067), 1.064) == pytest.approx(9.9e-3, abs=2e-4)


def test_literature_coefficients_give_similar_contrast():
    dn = index_contrast(GlassComposition(0.067), 1.064, endpoints=load_coefficients("fleming"))
    assert dn == pytest.approx(9.9e-3, abs=2e-4)


def test_band_is_enforced():
    model = sellmeier_for_composition(GlassComposition(0.05))
    with pytest.raises(BandError):
        refractive_index(model, 1.55)
    with pytest.raises(BandError):
        refractive_index(model, [0.9, 0.8])
    assert np.isfinite(refractive_index(model, 1.55, extrapolate=True))


def test_composition_range():
    with pytest.raises(ValueError):
        GlassComposition(-0.01)
    with pytest.raises(ValueError):
        GlassComposition(0.2)


def test_parse_rejects_incomplete_file():
    with pytest.raises(ValueError, match="missing coefficient"):
        parse_coefficients("silica.A1 = 1.0\n")
    with pytest.raises(ValueError, match="key = value"):
        parse_coefficients("nonsense\n")


def test_shipped_files_round_trip(tmp_path):
    ep = load_coefficients("calibrated")
    lines = [f"name = copy"]
    for glass in ("silica", "germania"):
        m = getattr(ep, glass)
        for k in range(3):
            lines.append(f"{glass}.A{k + 1} = {m.strengths[k]!r}")
            lines.append(f"{glass}.l{k + 1} = {m.resonances_um[k]!r}")
    path = tmp_path / "coeffs.txt"
    path.write_text("\n".join(lines))
    other = load_coefficients(str(path))
    assert other.silica == ep.silica and other.germania == ep.germania


@given(
    x=st.floats(0.0, 0.1),
    lam=st.floats(BAND_UM[0], BAND_UM[1]),
)
def test_contrast_grows_with_doping(x, lam):
    dn = index_contrast(GlassComposition(x), lam)
    assert dn >= -1e-15
    assert index_contrast(GlassComposition(min(x + 0.01, 0.1)), lam) >= dn - 1e-15


@given(x=st.floats(0.0, 0.1))
def test_normal_dispersion_in_band(x):
    lam = np.linspace(*BAND_UM, 50)
    n = refractive_index(sellmeier_for_composition(GlassComposition(x)), lam)
    assert np.all(np.diff(n) < 0)
