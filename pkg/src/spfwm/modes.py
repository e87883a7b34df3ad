"""Scalar LP01/LP11 modes of a weakly guiding step-index fiber."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import integrate, optimize, special

from .constants import C
from .material import (
    DEFAULT_COEFFICIENTS,
    GlassComposition,
    core_cladding_indices,
    load_coefficients,
)

# first zeros of J0 and J1
J0_ZERO = 2.404825557695773
J1_ZERO = 3.831705970207512

RADIUS_RANGE_UM = (3.0, 7.5)
RADIUS_SLACK = 0.10


class ModeCutoffError(ValueError):
    """The requested mode is not guided at this wavelength."""


class RootBracketError(RuntimeError):
    pass


@dataclass(frozen=True)
class FiberGeometry:
    """Step-index fiber: core radius (um), core composition, coefficient set name."""

    core_radius_um: float
    composition: GlassComposition
    coefficients: str = DEFAULT_COEFFICIENTS

    def __post_init__(self):
        lo, hi = RADIUS_RANGE_UM
        a = self.core_radius_um
        if not (lo * (1 - RADIUS_SLACK) <= a <= hi * (1 + RADIUS_SLACK)):
            raise ValueError(f"core radius {a} um outside [{lo}, {hi}] um (+-10%)")

    def with_radius(self, a_um: float) -> "FiberGeometry":
        return FiberGeometry(a_um, self.composition, self.coefficients)

    def indices(self, wavelength_um, extrapolate=False):
        return core_cladding_indices(
            self.composition,
            wavelength_um,
            endpoints=load_coefficients(self.coefficients),
            extrapolate=extrapolate,
        )


@dataclass(frozen=True)
class LPMode:
    m: int
    l: int

    def __post_init__(self):
        if (self.m, self.l) not in ((0, 1), (1, 1)):
            raise ValueError(f"LP{self.m}{self.l} is not supported (LP01, LP11 only)")

    def __str__(self):
        return f"LP{self.m}{self.l}"

    @classmethod
    def parse(cls, text: str) -> "LPMode":
        t = text.strip().upper().removeprefix("LP")
        if len(t) != 2 or not t.isdigit():
            raise ValueError(f"cannot parse mode {text!r}")
        return cls(int(t[0]), int(t[1]))


LP01 = LPMode(0, 1)
LP11 = LPMode(1, 1)


@dataclass(frozen=True)
class ModeSolution:
    mode: LPMode
    geometry: FiberGeometry
    wavelength_um: float
    beta: float  # rad/m
    n_eff: float
    u: float
    w: float
    v: float

    def radial_profile(self, r_um):
        """Unnormalized radial field, equal to 1 at the core boundary."""
        r = np.asarray(r_um, dtype=float)
        a, m = self.geometry.core_radius_um, self.mode.m
        rho = r / a
        inside = special.jv(m, self.u * rho) / special.jv(m, self.u)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            # scaled K avoids underflow far into the cladding
            outside = (
                special.kve(m, self.w * rho) / special.kve(m, self.w) * np.exp(-self.w * (rho - 1))
            )
        return np.where(rho <= 1.0, inside, outside)


def v_number(geom: FiberGeometry, wavelength_um, *, extrapolate=False):
    n1, n2 = geom.indices(wavelength_um, extrapolate=extrapolate)
    return 2 * np.pi / np.asarray(wavelength_um) * geom.core_radius_um * np.sqrt(n1 * n1 - n2 * n2)


def _characteristic(m, u, v):
    # pole-free form of u J_{m-1}(u)/J_m(u) = -w K_{m-1}(w)/K_m(w); exponential K scaling cancels
    w = np.sqrt(max(v * v - u * u, 0.0))
    if m == 0:
        return w * special.k1e(w) * special.j0(u) - u * special.j1(u) * special.k0e(w)
    return u * special.j0(u) * special.k1e(w) + w * special.k0e(w) * special.j1(u)


def characteristic_residual(m: int, u: float, v: float) -> float:
    """Residual of the ratio form of the LP characteristic equation."""
    w = np.sqrt(v * v - u * u)
    if m == 0:
        return -u * special.j1(u) / special.j0(u) + w * special.k1e(w) / special.k0e(w)
    return u * special.j0(u) / special.j1(u) + w * special.k0e(w) / special.k1e(w)


def solve_u(mode: LPMode, v: float) -> float:
    """Transverse core parameter u of the fundamental radial solution."""
    if v <= 0:
        raise ModeCutoffError("V must be positive")
    if mode.m == 0:
        lo, hi = 0.0, min(J0_ZERO, v)
    else:
        if v <= J0_ZERO:
            raise ModeCutoffError(f"LP11 below cutoff (V={v:.4f} <= {J0_ZERO:.4f})")
        lo, hi = J0_ZERO, min(J1_ZERO, v)
    # stay off the exact end points where a Bessel factor or w vanishes
    eps = 1e-13 * v
    lo, hi = lo + eps, hi - eps
    f = lambda u: _characteristic(mode.m, u, v)
    flo, fhi = f(lo), f(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise RootBracketError(f"no sign change for {mode} at V={v}")
    return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)


def solve_mode(geom: FiberGeometry, mode: LPMode, wavelength_um: float) -> ModeSolution:
    lam = float(wavelength_um)
    n1, n2 = geom.indices(lam)
    k = 2 * np.pi / lam
    v = k * geom.core_radius_um * np.sqrt(n1 * n1 - n2 * n2)
    u = solve_u(mode, v)
    w = np.sqrt(v * v - u * u)
    b = (w / v) ** 2
    n_eff = np.sqrt(n2 * n2 + b * (n1 * n1 - n2 * n2))
    return ModeSolution(mode, geom, lam, k * n_eff * 1e6, n_eff, u, w, v)


def propagation_constant(geom: FiberGeometry, mode: LPMode, omega: float) -> float:
    """beta (rad/m) at angular frequency omega (rad/s)."""
    return solve_mode(geom, mode, 2 * np.pi * C / omega * 1e6).beta


def cutoff_wavelength(geom: FiberGeometry, mode: LPMode, window_um=(0.5, 5.0)) -> float:
    """Longest wavelength (um) at which ``mode`` is guided.

    Uses the Sellmeier model outside its validated band.
    """
    if mode.m == 0:
        raise ValueError("LP01 has no cutoff")
    g = lambda lam: v_number(geom, lam, extrapolate=True) - J0_ZERO
    lo, hi = window_um
    if g(lo) * g(hi) > 0:
        raise ValueError(f"no {mode} cutoff in window {window_um} um")
    return optimize.brentq(g, lo, hi, xtol=1e-8)


def _azimuthal_integral(ms):
    k = sum(1 for m in ms if m == 1)
    if k % 2:
        return 0.0
    return 2 * np.pi * comb(k, k // 2) / 2**k


def _radial_integral(func, a):
    inner = integrate.quad(func, 0.0, a, epsabs=0, epsrel=1e-12, limit=200)[0]
    outer = integrate.quad(func, a, np.inf, epsabs=0, epsrel=1e-12, limit=200)[0]
    return inner + outer


def mode_normalization(sol: ModeSolution) -> float:
    """Integral of the squared unnormalized field over the cross-section (um^2)."""
    a = sol.geometry.core_radius_um
    radial = _radial_integral(lambda r: sol.radial_profile(r) ** 2 * r, a)
    return radial * _azimuthal_integral([sol.mode.m] * 2)


def nonlinear_overlap(p: ModeSolution, s: ModeSolution, q: ModeSolution, i: ModeSolution) -> float:
    """Overlap of the four unit-power mode profiles, in 1/m^2.

    LP11 fields share one orientation (cos phi); the azimuthal factor is
    evaluated analytically.
    """
    sols = (p, s, q, i)
    radii = {x.geometry.core_radius_um for x in sols}
    if len(radii) != 1:
        raise ValueError("all four fields must share one geometry")
    a = radii.pop()
    ang = _azimuthal_integral([x.mode.m for x in sols])
    if ang == 0.0:
        return 0.0
    radial = _radial_integral(
        lambda r: np.prod([x.radial_profile(r) for x in sols], axis=0) * r, a
    )
    norm = np.sqrt(np.prod([mode_normalization(x) for x in sols]))
    return radial * ang / norm * 1e12
