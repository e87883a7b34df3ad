"""Phase matching of the LP01/LP11 pump pair and design-space diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .constants import C, RAMAN_EDGE_HZ
from .material import BAND_UM, GlassComposition
from .modes import LP01, LP11, FiberGeometry, LPMode, ModeCutoffError, solve_mode

ROLES = ("p", "q", "s", "i")

# red-shifted signal in LP11, blue-shifted idler in LP01: the only pairing with a
# nontrivial root for normal-dispersion silica
DEFAULT_MODES = (LP01, LP11, LP11, LP01)
# literal pairing of the four-field mismatch formula (signal LP01, idler LP11)
LITERAL_MODES = (LP01, LP11, LP01, LP11)

OMEGA_MIN = 2 * np.pi * 1e12
OMEGA_MAX = 2 * np.pi * 60e12
FD_STEP = 2 * np.pi * 50e9


class NonConvergenceError(RuntimeError):
    pass


def omega_from_um(wavelength_um):
    return 2 * np.pi * C / (np.asarray(wavelength_um) * 1e-6)


def um_from_omega(omega):
    return 2 * np.pi * C / np.asarray(omega) * 1e6


@dataclass(frozen=True)
class FieldAssignment:
    """Central frequencies (rad/s) and modes of pumps p, q, signal s and idler i.

    Both pumps sit at ``omega_p``; the idler frequency follows from energy
    conservation, so ``2 omega_p - omega_s - omega_i`` vanishes by construction.
    """

    omega_p: float
    omega_s: float
    modes: tuple[LPMode, LPMode, LPMode, LPMode] = DEFAULT_MODES

    def __post_init__(self):
        if len(self.modes) != 4:
            raise ValueError("need one mode per role (p, q, s, i)")
        if self.modes[0] == self.modes[1]:
            raise ValueError("the two pumps must occupy different modes")
        if not (0 < self.omega_s <= self.omega_p):
            raise ValueError("signal must not be blue of the pump")

    @classmethod
    def from_wavelengths(cls, pump_um, signal_um, modes=DEFAULT_MODES):
        return cls(float(omega_from_um(pump_um)), float(omega_from_um(signal_um)), tuple(modes))

    @property
    def omega_i(self) -> float:
        return 2 * self.omega_p - self.omega_s

    @property
    def detuning(self) -> float:
        """Pump-idler separation omega_i - omega_p (rad/s)."""
        return self.omega_p - self.omega_s

    def omega(self, role: str) -> float:
        return {"p": self.omega_p, "q": self.omega_p, "s": self.omega_s, "i": self.omega_i}[role]

    def mode(self, role: str) -> LPMode:
        return self.modes[ROLES.index(role)]

    def wavelength_um(self, role: str) -> float:
        return float(um_from_omega(self.omega(role)))

    def with_signal(self, omega_s: float) -> "FieldAssignment":
        return FieldAssignment(self.omega_p, omega_s, self.modes)


@dataclass(frozen=True)
class DispersionCoefficients:
    beta0: float  # rad/m
    beta1: float  # s/m
    beta2: float  # s^2/m


def _beta(geom, mode, omega):
    return solve_mode(geom, mode, float(um_from_omega(omega))).beta


def dispersion_coefficients(
    geom: FiberGeometry,
    mode: LPMode,
    omega: float,
    order: int = 2,
    h: float = FD_STEP,
    rtol: float = 1e-6,
) -> DispersionCoefficients:
    """beta0 and central-difference beta1, beta2 with Richardson extrapolation.

    beta1 is refined by halving the step. beta2 is limited by root-solver
    noise rather than truncation, so its step is doubled instead. With
    ``order=1`` beta2 is skipped and returned as NaN.
    """
    b0 = _beta(geom, mode, omega)
    cache = {0.0: b0}

    def b(dw):
        if dw not in cache:
            cache[dw] = _beta(geom, mode, omega + dw)
        return cache[dw]

    def d1(step):
        return (b(step) - b(-step)) / (2 * step)

    def d2(step):
        return (b(step) - 2 * b0 + b(-step)) / step**2

    def converge(deriv, factor):
        step = h
        prev = deriv(step)
        for _ in range(4):
            step = step * factor
            cur = deriv(step)
            if abs(cur - prev) <= rtol * abs(cur):
                if factor < 1:
                    return (4 * cur - prev) / 3
                return (4 * prev - cur) / 3
            prev = cur
        raise NonConvergenceError(f"finite differences did not converge for {mode} at {omega:.6g}")

    b1 = converge(d1, 0.5)
    b2 = converge(d2, 2.0) if order >= 2 else float("nan")
    return DispersionCoefficients(b0, b1, b2)


def group_delays(geom: FiberGeometry, assignment: FieldAssignment) -> dict[str, float]:
    """Inverse group velocity beta1 (s/m) of every role at its central frequency."""
    return {
        r: dispersion_coefficients(geom, assignment.mode(r), assignment.omega(r), order=1).beta1
        for r in ROLES
    }


def phase_mismatch(geom: FiberGeometry, assignment: FieldAssignment) -> float:
    """beta_p + beta_q - beta_s - beta_i (rad/m), full propagation constants."""
    a = assignment
    return (
        _beta(geom, a.mode("p"), a.omega_p)
        + _beta(geom, a.mode("q"), a.omega_p)
        - _beta(geom, a.mode("s"), a.omega_s)
        - _beta(geom, a.mode("i"), a.omega_i)
    )


def phase_mismatch_parabolic(beta1_diff: float, beta2_pair, detuning):
    """Second-order Taylor mismatch ``(dbeta1 + mean(beta2) * Omega) * Omega``.

    ``beta1_diff`` is beta1(LP01) - beta1(LP11) at the pump. With the default
    pairing this is the full mismatch with the opposite overall sign; the
    roots coincide.
    """
    b2 = 0.5 * (beta2_pair[0] + beta2_pair[1])
    omega = np.asarray(detuning, dtype=float)
    return (beta1_diff + b2 * omega) * omega


@dataclass(frozen=True)
class PhaseMatch:
    """Result of the sideband search; ``found`` is False when no root exists."""

    found: bool
    detuning: float = float("nan")
    signal_um: float = float("nan")
    idler_um: float = float("nan")
    residual: float = float("nan")
    assignment: FieldAssignment | None = field(default=None, compare=False)
    reason: str = ""


def _search_band(omega_p, omega_min, omega_max):
    # both sidebands stay inside the Sellmeier band
    lim = min(omega_p - omega_from_um(BAND_UM[1]), omega_from_um(BAND_UM[0]) - omega_p)
    return omega_min, min(omega_max, float(lim) * (1 - 1e-12))


def solve_phase_matched_signal(
    geom: FiberGeometry,
    pump_um: float,
    modes=DEFAULT_MODES,
    *,
    omega_min: float = OMEGA_MIN,
    omega_max: float = OMEGA_MAX,
    n_scan: int = 120,
    tol: float = 1e-3,
) -> PhaseMatch:
    """Largest nontrivial detuning with zero phase mismatch."""
    omega_p = float(omega_from_um(pump_um))
    template = FieldAssignment(omega_p, omega_p, tuple(modes))
    lo, hi = _search_band(omega_p, omega_min, omega_max)
    grid = np.linspace(lo, hi, n_scan)

    def mismatch(detuning):
        return phase_mismatch(geom, template.with_signal(omega_p - detuning))

    values = np.empty(n_scan)
    for k, om in enumerate(grid):
        try:
            values[k] = mismatch(om)
        except ModeCutoffError:
            values[k] = np.nan
    sign_change = np.flatnonzero(values[:-1] * values[1:] < 0)
    if sign_change.size == 0:
        return PhaseMatch(False, reason="no phase-matched root in search band")
    k = sign_change[-1]
    root = optimize.brentq(mismatch, grid[k], grid[k + 1], xtol=1.0, rtol=1e-15)
    res = mismatch(root)
    if abs(res) > tol:
        return PhaseMatch(False, reason=f"root residual {res:.3g} rad/m above tolerance")
    assignment = template.with_signal(omega_p - root)
    return PhaseMatch(
        True,
        root,
        assignment.wavelength_um("s"),
        assignment.wavelength_um("i"),
        res,
        assignment,
    )


def phase_matched_signal_um(geom, pump_um, modes=DEFAULT_MODES) -> float:
    pm = solve_phase_matched_signal(geom, pump_um, modes)
    return pm.signal_um if pm.found else float("nan")


@dataclass(frozen=True)
class StableRadius:
    radius_um: float
    signal_um: float
    slope_nm_per_step: float  # |d lambda/da| * 0.01 um


def find_stable_radius(
    composition: GlassComposition,
    pump_um: float = 1.064,
    *,
    coefficients: str | None = None,
    radius_range=(3.0, 7.5),
    coarse_step: float = 0.1,
    tol: float = 1e-3,
    modes=DEFAULT_MODES,
) -> StableRadius:
    """Core radius maximising the phase-matched signal wavelength.

    A coarse scan brackets the maximum, golden-section search refines it.
    """
    kw = {} if coefficients is None else {"coefficients": coefficients}

    def lam(a):
        return phase_matched_signal_um(FiberGeometry(a, composition, **kw), pump_um, modes)

    radii = np.arange(radius_range[0], radius_range[1] + 1e-9, coarse_step)
    values = np.array([lam(a) for a in radii])
    if not np.isfinite(values).any():
        raise ValueError("no phase-matched solution anywhere in the radius range")
    k = int(np.nanargmax(values))
    if k == 0 or k == len(radii) - 1:
        raise ValueError(f"signal-wavelength maximum on the boundary (a = {radii[k]:.2f} um)")
    a_star = _golden_max(lambda a: np.nan_to_num(lam(a), nan=-np.inf), radii[k - 1], radii[k + 1], tol)
    d = 0.01
    slope = abs(lam(a_star + d) - lam(a_star - d)) / 2 * 1e3
    return StableRadius(a_star, lam(a_star), slope)


def _golden_max(f, lo, hi, tol):
    g = (np.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def factorability_residual(t_p, t_q, beta1) -> float:
    """Zero when the joint state of a full collision is factorable (units s^4/m^2)."""
    bp, bq, bs, bi = (beta1[r] for r in ROLES)
    return t_q**2 * (bp - bi) * (bp - bs) + t_p**2 * (bq - bi) * (bq - bs)


def raman_window_check(pump_um: float, sideband_um: float) -> bool:
    """True when the sideband lies strictly more than 32 THz from the pump."""
    sep = abs(C / (pump_um * 1e-6) - C / (sideband_um * 1e-6))
    return bool(sep > RAMAN_EDGE_HZ)


def stability_ratio(
    geom: FiberGeometry,
    sigma_a_um: float,
    t_p: float,
    pump_um: float = 1.064,
    step_um: float = 0.01,
    modes=DEFAULT_MODES,
) -> float:
    """Phase-matching wander over joint-state bandwidth, to second order in sigma_a.

    Derivatives of the phase-matched detuning (rad/s) with respect to the core
    radius are taken by central differences.
    """
    if sigma_a_um == 0:
        return 0.0
    vals = []
    for a in (geom.core_radius_um - step_um, geom.core_radius_um, geom.core_radius_um + step_um):
        pm = solve_phase_matched_signal(geom.with_radius(a), pump_um, modes)
        if not pm.found:
            raise ValueError(f"phase matching lost at a = {a:.4f} um")
        vals.append(pm.detuning)
    lo, mid, hi = vals
    d1 = (hi - lo) / (2 * step_um)
    d2 = (hi - 2 * mid + lo) / step_um**2
    return d1 * sigma_a_um * t_p + 0.5 * d2 * sigma_a_um**2 * t_p


def collision_length(t_p: float, beta1_p: float, beta1_q: float) -> float:
    """Pump-pump collision length T_p / |beta1_p - beta1_q| (m)."""
    walk = abs(beta1_p - beta1_q)
    if walk == 0:
        raise ValueError("pumps have identical group velocities")
    return t_p / walk
