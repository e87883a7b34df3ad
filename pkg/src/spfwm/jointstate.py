"""Joint temporal and spectral amplitudes of pairs created by colliding pump pulses."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .phasematch import ROLES
from .stochastic import DispersionRecord

ENVELOPE_PAD = 6.0  # pulse durations kept on each side of the support


class CollisionError(ValueError):
    """beta1_s - beta1_i changes sign inside the fiber."""


@dataclass(frozen=True)
class PumpConfig:
    """Gaussian pumps ``sqrt(P) exp(-(t - dt)^2 / (2 T^2))`` at the fiber input."""

    t_p: float
    t_q: float
    power_p: float = 1.0
    power_q: float = 1.0
    delay_p: float = 0.0
    delay_q: float = 0.0

    def __post_init__(self):
        if self.t_p <= 0 or self.t_q <= 0:
            raise ValueError("pulse durations must be positive")
        if self.power_p < 0 or self.power_q < 0:
            raise ValueError("pump powers must be non-negative")

    @classmethod
    def full_collision(cls, beta1_p, beta1_q, t_p, t_q=None, power_p=1.0, power_q=1.0):
        """Pumps that are well separated at both fiber ends and meet at the middle."""
        t_q = t_p if t_q is None else t_q
        sep, _ = standard_collision_setup(beta1_p, beta1_q, t_p, t_q)
        # the slower pump (larger beta1) is launched first
        sign = 1.0 if beta1_p < beta1_q else -1.0
        return cls(t_p, t_q, power_p, power_q, sign * sep / 2, -sign * sep / 2)

    def envelope(self, role: str, t):
        if role == "p":
            return np.sqrt(self.power_p) * np.exp(-((t - self.delay_p) ** 2) / (2 * self.t_p**2))
        return np.sqrt(self.power_q) * np.exp(-((t - self.delay_q) ** 2) / (2 * self.t_q**2))

    def collision_report(self, beta1_p, beta1_q, length_m) -> dict[str, float]:
        """Walk-off, launch separation and pulse width entering the full-collision condition."""
        return {
            "walkoff_s": abs(beta1_p - beta1_q) * length_m,
            "separation_s": abs(self.delay_p - self.delay_q),
            "width_s": float(np.hypot(self.t_p, self.t_q)),
        }


def standard_collision_setup(beta1_p, beta1_q, t_p, t_q=None) -> tuple[float, float]:
    """Launch separation ``4 sqrt(T_p^2 + T_q^2)`` and the length ``2 dt / |dbeta1|``."""
    t_q = t_p if t_q is None else t_q
    walk = abs(beta1_p - beta1_q)
    if walk == 0:
        raise ValueError("pumps have identical group velocities")
    sep = 4 * np.hypot(t_p, t_q)
    return float(sep), float(2 * sep / walk)


@dataclass(frozen=True)
class TimeGrid:
    """Square N x N grid over (t_s, t_i).

    ``frame_beta1`` (s/m) is subtracted from every group delay, so times are
    measured in a frame moving at that group velocity.
    """

    n: int
    center_s: float
    center_i: float
    span: float
    frame_beta1: float = 0.0

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"N={self.n} is not a power of two")
        if self.span <= 0:
            raise ValueError("grid span must be positive")

    @property
    def dt(self) -> float:
        return self.span / self.n

    def axis(self, which: str) -> np.ndarray:
        c = self.center_s if which == "s" else self.center_i
        return c + (np.arange(self.n) - self.n // 2) * self.dt

    @classmethod
    def for_collision(
        cls, pumps: PumpConfig, beta1: dict[str, float], length_m: float, n: int = 512, frame_beta1=None
    ) -> "TimeGrid":
        """Grid centred on the pair born at the midpoint collision.

        The span covers the walk-off window ``D(0)`` plus ``ENVELOPE_PAD``
        pulse durations on each side.
        """
        fb = beta1["p"] if frame_beta1 is None else frame_beta1
        b = {r: beta1[r] - fb for r in ROLES}
        half = length_m / 2
        t_c = 0.5 * (pumps.delay_p + b["p"] * half + pumps.delay_q + b["q"] * half)
        ts = t_c + b["s"] * half
        ti = t_c + b["i"] * half
        walk = abs(beta1["s"] - beta1["i"]) * length_m
        span = walk + 2 * ENVELOPE_PAD * max(pumps.t_p, pumps.t_q)
        return cls(n, ts, ti, span, fb)


@dataclass(frozen=True)
class JointAmplitude:
    """Complex amplitude, rows indexed by the signal axis and columns by the idler axis.

    Frequency-domain axes are angular detunings (rad/s) from ``omega0``.
    """

    values: np.ndarray
    axis_s: np.ndarray
    axis_i: np.ndarray
    domain: str = "time"
    omega0: tuple[float, float] = (0.0, 0.0)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.domain not in ("time", "frequency"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.values.shape != (len(self.axis_s), len(self.axis_i)):
            raise ValueError("value matrix does not match the axes")

    @property
    def d_s(self) -> float:
        return float(self.axis_s[1] - self.axis_s[0])

    @property
    def d_i(self) -> float:
        return float(self.axis_i[1] - self.axis_i[0])

    def same_grid(self, other: "JointAmplitude") -> bool:
        return (
            self.domain == other.domain
            and np.array_equal(self.axis_s, other.axis_s)
            and np.array_equal(self.axis_i, other.axis_i)
        )


@dataclass(frozen=True)
class CumulativeDelays:
    """Running integrals of beta1 per role and of the mismatch, with the node slopes."""

    z_m: np.ndarray
    beta1: dict[str, np.ndarray]
    dbeta0: np.ndarray
    delay: dict[str, np.ndarray]
    phase: np.ndarray

    @property
    def length_m(self) -> float:
        return float(self.z_m[-1])


def cumulative_delays(record: DispersionRecord, frame_beta1: float = 0.0) -> CumulativeDelays:
    """``B_j(z) = int_0^z (beta1_j - frame) dz'`` and ``Phi(z) = int_0^z dbeta0 dz'``."""
    z = record.z_m
    b1 = {r: np.asarray(record.beta1[r], dtype=float) - frame_beta1 for r in ROLES}
    db0 = np.asarray(record.dbeta0, dtype=float)
    delay = {r: cumulative_trapezoid(b1[r], z, initial=0.0) for r in ROLES}
    phase = cumulative_trapezoid(db0, z, initial=0.0)
    return CumulativeDelays(z, b1, db0, delay, phase)


def _segment_value(cum, slope_nodes, z, k, s):
    # integral of a linear integrand from z_k to z_k + s
    g0 = slope_nodes[k]
    m = (slope_nodes[k + 1] - g0) / (z[k + 1] - z[k])
    return cum[k] + g0 * s + 0.5 * m * s * s


def collision_coordinates(t_s, t_i, delays: CumulativeDelays):
    """Creation position and time of a pair detected at (t_s, t_i).

    Returns ``(z_c, t_c, inside)``; entries outside the fiber are NaN and
    ``inside`` is False there. With piecewise-linear beta1 the walk-off
    ``D(z)`` is piecewise quadratic and is inverted exactly per segment.
    """
    z = delays.z_m
    g = delays.beta1["s"] - delays.beta1["i"]
    if np.any(g == 0) or not (np.all(g > 0) or np.all(g < 0)):
        raise CollisionError("signal-idler walk-off changes sign inside the fiber")
    bs, bi = delays.delay["s"], delays.delay["i"]
    cum_g = bs - bi
    big_d = cum_g[-1] - cum_g  # D(z_k), monotone
    d = np.asarray(t_s, dtype=float) - np.asarray(t_i, dtype=float)
    d_lo, d_hi = min(big_d[0], big_d[-1]), max(big_d[0], big_d[-1])
    inside = (d >= d_lo) & (d <= d_hi)

    # cum_g is monotone in z in the direction of sign(g)
    target = cum_g[-1] - np.where(inside, d, d_lo)
    if g[0] > 0:
        k = np.searchsorted(cum_g, target, side="right") - 1
    else:
        k = np.searchsorted(-cum_g, -target, side="right") - 1
    k = np.clip(k, 0, len(z) - 2)
    c = target - cum_g[k]
    g0 = g[k]
    m = (g[k + 1] - g0) / (z[k + 1] - z[k])
    disc = np.sqrt(np.maximum(g0 * g0 + 2 * m * c, 0.0))
    s = 2 * c / (g0 + np.sign(g0) * disc)
    s = np.clip(s, 0.0, z[k + 1] - z[k])
    z_c = z[k] + s
    t_c = np.asarray(t_s, dtype=float) - (bs[-1] - _segment_value(bs, delays.beta1["s"], z, k, s))
    z_c = np.where(inside, z_c, np.nan)
    t_c = np.where(inside, t_c, np.nan)
    return z_c, t_c, inside


def _grid_axes(grid: TimeGrid):
    return grid.axis("s"), grid.axis("i")


def build_jta(
    pumps: PumpConfig,
    record: DispersionRecord,
    grid: TimeGrid,
    gamma: float = 1.0,
) -> JointAmplitude:
    """Joint temporal amplitude for position-dependent dispersion.

    Each grid point is traced back to its unique creation event; points
    whose creation would lie outside the fiber are zero.
    """
    delays = cumulative_delays(record, grid.frame_beta1)
    ts, ti = _grid_axes(grid)
    tt_s, tt_i = np.meshgrid(ts, ti, indexing="ij")
    z_c, t_c, inside = collision_coordinates(tt_s, tt_i, delays)

    values = np.zeros(tt_s.shape, dtype=complex)
    zi, tc = z_c[inside], t_c[inside]
    z = delays.z_m
    k = np.clip(np.searchsorted(z, zi, side="right") - 1, 0, len(z) - 2)
    s = zi - z[k]
    bp = _segment_value(delays.delay["p"], delays.beta1["p"], z, k, s)
    bq = _segment_value(delays.delay["q"], delays.beta1["q"], z, k, s)
    phi = _segment_value(delays.phase, delays.dbeta0, z, k, s)
    values[inside] = (
        2j * gamma * pumps.envelope("p", tc - bp) * pumps.envelope("q", tc - bq) * np.exp(1j * phi)
    )
    return JointAmplitude(values, ts, ti, "time")


def build_jta_uniform(
    pumps: PumpConfig,
    beta1: dict[str, float],
    dbeta0: float,
    length_m: float,
    grid: TimeGrid,
    gamma: float = 1.0,
) -> JointAmplitude:
    """Closed-form joint temporal amplitude of a uniform fiber."""
    b = {r: beta1[r] - grid.frame_beta1 for r in ROLES}
    ts, ti = _grid_axes(grid)
    tt_s, tt_i = np.meshgrid(ts, ti, indexing="ij")
    ds = b["s"] - b["i"]
    if ds == 0:
        raise CollisionError("signal and idler have equal group velocities")
    z_c = length_m - (tt_s - tt_i) / ds
    t_c = (b["s"] * tt_i - b["i"] * tt_s) / ds
    inside = (z_c >= 0) & (z_c <= length_m)
    amp = (
        2j
        * gamma
        * pumps.envelope("p", t_c - b["p"] * z_c)
        * pumps.envelope("q", t_c - b["q"] * z_c)
        * np.exp(1j * dbeta0 * z_c)
    )
    return JointAmplitude(np.where(inside, amp, 0.0), ts, ti, "time")


def jta_to_jsa(ja: JointAmplitude, omega0=(0.0, 0.0)) -> JointAmplitude:
    """Unitary 2D Fourier transform to angular-frequency detunings."""
    if ja.domain != "time":
        raise ValueError("input must be a time-domain amplitude")
    n_s, n_i = ja.values.shape
    spec = np.fft.fftshift(np.fft.ifft2(ja.values, norm="ortho"))
    ws = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n_s, ja.d_s))
    wi = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n_i, ja.d_i))
    return JointAmplitude(spec, ws, wi, "frequency", tuple(omega0))


def generation_probability(ja: JointAmplitude) -> float:
    return float(np.sum(np.abs(ja.values) ** 2) * ja.d_s * ja.d_i)


_LAYOUT = "row-major, signal axis along rows, interleaved (re, im) float64"


def _floats_text(values):
    return ",".join(repr(float(x)) for x in values)


def write_grid(ja: JointAmplitude, path, fmt: str = "csv") -> Path:
    """Write an amplitude as a ``# key = value`` header followed by the data.

    The header carries both axes in full and ends with ``# end``. ``csv``
    data has one grid row per line with 2N values ``re, im, re, im, ...``;
    ``bin`` data is the same sequence as raw little-endian float64.
    """
    if fmt not in ("csv", "bin"):
        raise ValueError(f"unknown grid format {fmt!r}")
    path = Path(path)
    n_s, n_i = ja.values.shape
    header = {
        "domain": ja.domain,
        "format": fmt,
        "layout": _LAYOUT,
        "n_s": n_s,
        "n_i": n_i,
        "omega0": _floats_text(ja.omega0),
        "axis_s": _floats_text(ja.axis_s),
        "axis_i": _floats_text(ja.axis_i),
    }
    head = "".join(f"# {k} = {v}\n" for k, v in header.items()) + "# end\n"
    inter = np.empty((n_s, 2 * n_i))
    inter[:, 0::2] = ja.values.real
    inter[:, 1::2] = ja.values.imag
    if fmt == "csv":
        body = "\n".join(_floats_text(row) for row in inter) + "\n"
        path.write_text(head + body)
    else:
        with open(path, "wb") as fh:
            fh.write(head.encode("ascii"))
            fh.write(inter.astype("<f8").tobytes())
    return path


def read_grid(path) -> JointAmplitude:
    raw = Path(path).read_bytes()
    header, pos = {}, 0
    while True:
        end = raw.index(b"\n", pos)
        line = raw[pos:end].decode("ascii")
        pos = end + 1
        if line.strip() == "# end":
            break
        key, value = line.lstrip("# ").split("=", 1)
        header[key.strip()] = value.strip()
    n_s, n_i = int(header["n_s"]), int(header["n_i"])
    if header["format"] == "csv":
        inter = np.loadtxt(io.StringIO(raw[pos:].decode("ascii")), delimiter=",", ndmin=2)
    else:
        inter = np.frombuffer(raw[pos:], dtype="<f8").reshape(n_s, 2 * n_i)
    values = inter[:, 0::2] + 1j * inter[:, 1::2]
    axis_s = np.array([float(x) for x in header["axis_s"].split(",")])
    axis_i = np.array([float(x) for x in header["axis_i"].split(",")])
    omega0 = tuple(float(x) for x in header["omega0"].split(","))
    return JointAmplitude(values.reshape(n_s, n_i), axis_s, axis_i, header["domain"], omega0)
