"""Correlated core-radius fluctuations and their dispersion along the fiber."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import lfilter

from .modes import FiberGeometry, ModeCutoffError, RootBracketError
from .phasematch import ROLES, FieldAssignment, group_delays, phase_mismatch

DEFAULT_NODES = 41
WINDOW_SIGMAS = 8.0  # covers +-6 sigma with margin for long, finely sampled profiles


class WindowError(ValueError):
    """A sampled radius falls outside the tabulated lookup window."""


@dataclass(frozen=True)
class FluctuationSpec:
    """Ornstein-Uhlenbeck core-radius noise.

    Parameters
    ----------
    sigma_um : float
        Standard deviation of the radius (um).
    l_corr_m : float
        Correlation length (m).
    dz_m : float, optional
        Sampling step (m). Defaults to ``min(l_corr/10, L/400)`` at sampling time.
    seed : int
        Base seed; each realization draws from its own counter-based stream.
    strict : bool
        Enforce the resolution guard ``dz <= l_corr/4``.
    """

    sigma_um: float
    l_corr_m: float
    dz_m: float | None = None
    seed: int = 0
    strict: bool = True

    def __post_init__(self):
        if self.sigma_um < 0:
            raise ValueError("sigma must be non-negative")
        if self.l_corr_m <= 0:
            raise ValueError("correlation length must be positive")
        if self.dz_m is not None:
            if self.dz_m <= 0:
                raise ValueError("dz must be positive")
            if self.strict and self.dz_m > self.l_corr_m / 4:
                raise ValueError(f"dz={self.dz_m} m does not resolve l_corr={self.l_corr_m} m")

    @classmethod
    def relative(cls, fraction: float, a0_um: float, l_corr_m: float, **kwargs):
        """Build from a relative deviation ``sigma/a0``."""
        return cls(fraction * a0_um, l_corr_m, **kwargs)

    def step_for(self, length_m: float) -> float:
        return self.dz_m if self.dz_m is not None else min(self.l_corr_m / 10, length_m / 400)


@dataclass(frozen=True)
class RadiusProfile:
    z_m: np.ndarray
    radius_um: np.ndarray

    def __post_init__(self):
        if len(self.z_m) < 2 or len(self.z_m) != len(self.radius_um):
            raise ValueError("profile needs at least two matching samples")
        if np.any(self.radius_um <= 0):
            raise ValueError("radius must stay positive")

    @property
    def length_m(self) -> float:
        return float(self.z_m[-1])

    @property
    def dz_m(self) -> float:
        return float(self.z_m[1] - self.z_m[0])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["z_m", "a_um"])
            for z, a in zip(self.z_m, self.radius_um):
                w.writerow([repr(float(z)), repr(float(a))])

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, comments="#", ndmin=2)
        return cls(data[:, 0], data[:, 1])


def realization_rng(seed: int, realization: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, realization); draws are counted by step.

    ``stream`` selects an independent counter block for auxiliary draws.
    """
    key = ((int(seed) & (2**64 - 1)) << 64) | (int(realization) & (2**64 - 1))
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, int(stream)]))


def sample_profile(
    spec: FluctuationSpec, a0_um: float, length_m: float, realization: int = 0
) -> RadiusProfile:
    """Draw one AR(1) radius profile on a uniform grid from 0 to ``length_m``.

    The first sample comes from the stationary distribution, so the marginal
    variance is ``sigma**2`` at every position.
    """
    dz = spec.step_for(length_m)
    n = max(int(np.ceil(length_m / dz - 1e-9)), 1)
    z = np.linspace(0.0, length_m, n + 1)
    if spec.sigma_um == 0:
        return RadiusProfile(z, np.full(n + 1, float(a0_um)))
    alpha = np.exp(-(length_m / n) / spec.l_corr_m)
    xi = realization_rng(spec.seed, realization).standard_normal(n + 1)
    drive = spec.sigma_um * xi
    drive[1:] *= np.sqrt(1 - alpha * alpha)
    da = lfilter([1.0], [1.0, -alpha], drive)
    return RadiusProfile(z, a0_um + da)


@dataclass(frozen=True)
class DispersionRecord:
    """beta1 per role (s/m) and aggregate mismatch (rad/m) on a uniform z grid."""

    z_m: np.ndarray
    beta1: dict[str, np.ndarray]
    dbeta0: np.ndarray

    @property
    def length_m(self) -> float:
        return float(self.z_m[-1])

    @classmethod
    def uniform(cls, beta1: dict[str, float], dbeta0: float, length_m: float, n: int = 2):
        z = np.linspace(0.0, length_m, n)
        return cls(z, {r: np.full(n, float(beta1[r])) for r in ROLES}, np.full(n, float(dbeta0)))


@dataclass(frozen=True)
class DispersionLookup:
    """Cubic interpolants of beta1 per role and of the mismatch over a radius window."""

    radius_um: np.ndarray
    beta1: dict[str, np.ndarray]
    dbeta0: np.ndarray
    assignment: FieldAssignment

    def __post_init__(self):
        object.__setattr__(
            self, "_splines", {r: CubicSpline(self.radius_um, self.beta1[r]) for r in ROLES}
        )
        object.__setattr__(self, "_dbeta0", CubicSpline(self.radius_um, self.dbeta0))

    @property
    def window(self) -> tuple[float, float]:
        return float(self.radius_um[0]), float(self.radius_um[-1])

    def _check(self, a):
        lo, hi = self.window
        if np.any(a < lo) or np.any(a > hi):
            raise WindowError(
                f"radius {np.min(a):.4f}..{np.max(a):.4f} um outside lookup window [{lo:.4f}, {hi:.4f}]"
            )

    def beta1_at(self, role: str, a_um):
        a = np.asarray(a_um, dtype=float)
        self._check(a)
        return self._splines[role](a)

    def dbeta0_at(self, a_um):
        a = np.asarray(a_um, dtype=float)
        self._check(a)
        return self._dbeta0(a)


def build_lookup(
    geom: FiberGeometry,
    assignment: FieldAssignment,
    half_width_um: float,
    n_nodes: int = DEFAULT_NODES,
) -> DispersionLookup:
    """Tabulate dispersion on ``n_nodes`` radii spanning ``a0 +- half_width_um``.

    The mismatch is stored as one difference per node rather than as four
    propagation constants of order 1e7 rad/m.
    """
    if half_width_um <= 0:
        raise ValueError("window half-width must be positive")
    if n_nodes < 4:
        raise ValueError("cubic interpolation needs at least four nodes")
    a0 = geom.core_radius_um
    radii = np.linspace(a0 - half_width_um, a0 + half_width_um, n_nodes)
    b1 = {r: np.empty(n_nodes) for r in ROLES}
    db0 = np.empty(n_nodes)
    for k, a in enumerate(radii):
        g = geom.with_radius(float(a))
        try:
            delays = group_delays(g, assignment)
            db0[k] = phase_mismatch(g, assignment)
        except (ModeCutoffError, RootBracketError) as exc:
            raise ModeCutoffError(f"mode lost at a={a:.4f} um inside lookup window: {exc}") from exc
        for r in ROLES:
            b1[r][k] = delays[r]
    return DispersionLookup(radii, b1, db0, assignment)


def profile_to_dispersion(profile: RadiusProfile, lookup: DispersionLookup) -> DispersionRecord:
    a = profile.radius_um
    return DispersionRecord(
        profile.z_m,
        {r: lookup.beta1_at(r, a) for r in ROLES},
        lookup.dbeta0_at(a),
    )


def save_profile(profile: RadiusProfile, path) -> Path:
    path = Path(path)
    profile.to_csv(path)
    return path
