"""Sellmeier refractive indices of GeO2-doped silica core and silica cladding."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

BAND_UM = (0.85, 1.40)
MAX_GE_FRACTION = 0.10
DEFAULT_COEFFICIENTS = "calibrated"


class BandError(ValueError):
    """Wavelength outside the validated Sellmeier band."""


@dataclass(frozen=True)
class GlassComposition:
    """GeO2 mole fraction of a binary GeO2-SiO2 glass (0 is pure silica)."""

    ge_mole_fraction: float

    def __post_init__(self):
        x = self.ge_mole_fraction
        if not (0.0 <= x <= MAX_GE_FRACTION):
            raise ValueError(
                f"ge_mole_fraction={x} outside validated range [0, {MAX_GE_FRACTION}]"
            )


CLADDING = GlassComposition(0.0)


@dataclass(frozen=True)
class SellmeierModel:
    """Three-term Sellmeier model; resonances in micrometres."""

    strengths: tuple[float, float, float]
    resonances_um: tuple[float, float, float]

    def __post_init__(self):
        if len(self.strengths) != 3 or len(self.resonances_um) != 3:
            raise ValueError("a Sellmeier model needs exactly three terms")
        if any(l <= 0 for l in self.resonances_um):
            raise ValueError("resonance wavelengths must be positive")


@dataclass(frozen=True)
class SellmeierEndpoints:
    name: str
    silica: SellmeierModel
    germania: SellmeierModel


def parse_coefficients(text: str) -> SellmeierEndpoints:
    """Parse the plain-text ``key = value`` coefficient format.

    Keys are ``name`` plus ``<glass>.A1..A3`` and ``<glass>.l1..l3`` for the
    glasses ``silica`` and ``germania``. ``#`` starts a comment.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value

    def model(glass):
        try:
            a = tuple(float(values[f"{glass}.A{k}"]) for k in (1, 2, 3))
            l = tuple(float(values[f"{glass}.l{k}"]) for k in (1, 2, 3))
        except KeyError as exc:
            raise ValueError(f"missing coefficient {exc.args[0]}") from None
        return SellmeierModel(a, l)

    return SellmeierEndpoints(values.get("name", "custom"), model("silica"), model("germania"))


@lru_cache(maxsize=None)
def load_coefficients(source: str | Path = DEFAULT_COEFFICIENTS) -> SellmeierEndpoints:
    """Load endpoint coefficients by shipped name (``calibrated``, ``fleming``) or path."""
    path = Path(source)
    if path.suffix == "" and not path.exists():
        text = resources.files("spfwm.data").joinpath(f"sellmeier_{source}.txt").read_text()
    else:
        text = path.read_text()
    return parse_coefficients(text)


def sellmeier_for_composition(
    composition: GlassComposition, endpoints: SellmeierEndpoints | None = None
) -> SellmeierModel:
    """Linear interpolation of all six coefficients between silica and germania."""
    ep = endpoints or load_coefficients()
    x = composition.ge_mole_fraction
    a = tuple(s + x * (g - s) for s, g in zip(ep.silica.strengths, ep.germania.strengths))
    l = tuple(s + x * (g - s) for s, g in zip(ep.silica.resonances_um, ep.germania.resonances_um))
    return SellmeierModel(a, l)


def refractive_index(model: SellmeierModel, wavelength_um, *, extrapolate: bool = False):
    """Evaluate n(lambda) for scalar or array wavelengths in micrometres.

    Raises BandError outside 0.85-1.40 um unless ``extrapolate`` is set; the
    LP11 cutoff search is the one caller that needs that.
    """
    lam = np.asarray(wavelength_um, dtype=float)
    if not extrapolate and (np.any(lam < BAND_UM[0]) or np.any(lam > BAND_UM[1])):
        raise BandError(f"wavelength {wavelength_um} um outside band {BAND_UM}")
    lam2 = lam * lam
    n2 = np.ones_like(lam)
    for a, l in zip(model.strengths, model.resonances_um):
        denom = lam2 - l * l
        if np.any(denom == 0.0):
            raise ValueError(f"wavelength hits the Sellmeier pole at {l} um")
        n2 = n2 + a * lam2 / denom
    n = np.sqrt(n2)
    return float(n) if n.ndim == 0 else n


def core_cladding_indices(
    composition: GlassComposition,
    wavelength_um,
    *,
    endpoints: SellmeierEndpoints | None = None,
    extrapolate: bool = False,
):
    """Return ``(n_core, n_clad)``; the cladding is always pure silica."""
    core = sellmeier_for_composition(composition, endpoints)
    clad = sellmeier_for_composition(CLADDING, endpoints)
    return (
        refractive_index(core, wavelength_um, extrapolate=extrapolate),
        refractive_index(clad, wavelength_um, extrapolate=extrapolate),
    )


def index_contrast(composition: GlassComposition, wavelength_um, **kwargs):
    n1, n2 = core_cladding_indices(composition, wavelength_um, **kwargs)
    return n1 - n2
