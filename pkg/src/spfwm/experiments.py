"""Config-driven Monte-Carlo experiments over fiber designs and fluctuation models.

Config files are flat ``key = value`` text; ``#`` starts a comment. Keys:

kind                 jsa-realizations | purity-vs-radius | purity-vs-duration |
                     correlation-length | design-sweep | stable-radius
doping               GeO2 mole fraction of the core
radius_um            mean core radius
pump_um              pump wavelength
pulse_ps             pump duration T_p (both pumps)
sigma_rel            comma list of relative radius deviations sigma_a/a0
l_corr_m             fluctuation correlation length
dz_m                 profile step, or ``auto`` for min(l_corr/10, L/400)
samples              realizations per sweep point or per sigma level
seed                 base seed
grid_n               time-grid points per axis (power of two)
workers              worker processes (results do not depend on it)
coefficients         Sellmeier set name or path
radius_range_um      start:stop:step; grid for design-sweep, bounds and
                     window centres for purity-vs-radius
doping_list          comma list of dopings for design-sweep
radii_um             comma list of radii for purity-vs-duration and
                     correlation-length
duration_range_ps    start:stop:step; bounds and window centres for
                     purity-vs-duration
corr_ratio_log10     start:stop:step of log10(l_coll/l_corr)
window_um            sliding-window width over radius
window_ps            sliding-window width over pump duration
min_window           minimum samples per window before a point is flagged
grid_format          csv | bin for exported amplitude grids
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .jointstate import (
    JointAmplitude,
    PumpConfig,
    TimeGrid,
    build_jta,
    build_jta_uniform,
    jta_to_jsa,
    standard_collision_setup,
    write_grid,
)
from .material import DEFAULT_COEFFICIENTS, GlassComposition
from .metrics import purity, visibility
from .modes import LP11, RADIUS_RANGE_UM, FiberGeometry, cutoff_wavelength, v_number
from .phasematch import (
    DEFAULT_MODES,
    FieldAssignment,
    collision_length,
    find_stable_radius,
    group_delays,
    raman_window_check,
    solve_phase_matched_signal,
)
from .stochastic import (
    WINDOW_SIGMAS,
    DispersionLookup,
    FluctuationSpec,
    build_lookup,
    profile_to_dispersion,
    realization_rng,
    sample_profile,
)

KINDS = (
    "jsa-realizations",
    "purity-vs-radius",
    "purity-vs-duration",
    "correlation-length",
    "design-sweep",
    "stable-radius",
)

PARAMETER_STREAM = 1  # Philox counter word for per-sample design parameters


class NoPhaseMatchError(ValueError):
    pass


class RealizationError(RuntimeError):
    """A single realization failed; carries the seed and index for reproduction."""

    def __init__(self, seed, index, cause):
        super().__init__(f"realization {index} (seed {seed}) failed: {cause}")
        self.seed = seed
        self.index = index


@dataclass(frozen=True)
class Range:
    start: float
    stop: float
    step: float

    @classmethod
    def parse(cls, text: str) -> "Range":
        parts = [p.strip() for p in str(text).split(":")]
        if len(parts) != 3:
            raise ValueError(f"range {text!r} is not start:stop:step")
        start, stop, step = map(float, parts)
        if step <= 0 or stop < start:
            raise ValueError(f"range {text!r} needs step > 0 and stop >= start")
        return cls(start, stop, step)

    def __post_init__(self):
        for name in ("start", "stop", "step"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def values(self) -> np.ndarray:
        n = int(np.floor((self.stop - self.start) / self.step + 1e-9))
        return self.start + self.step * np.arange(n + 1)

    def __str__(self):
        return f"{self.start:g}:{self.stop:g}:{self.step:g}"


def _floats(text) -> tuple[float, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).split(",") if x.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "jsa-realizations"
    doping: float = 0.067
    radius_um: float = 4.0
    pump_um: float = 1.064
    pulse_ps: float = 1.0
    sigma_rel: tuple[float, ...] = (0.0, 0.0025, 0.005, 0.01)
    l_corr_m: float = 1.0
    dz_m: float | None = None
    samples: int = 1000
    seed: int = 0
    grid_n: int = 512
    workers: int = 1
    coefficients: str = DEFAULT_COEFFICIENTS
    radius_range_um: Range = Range(3.0, 7.5, 0.05)
    doping_list: tuple[float, ...] = (0.051, 0.060, 0.067)
    radii_um: tuple[float, ...] = (4.0, 4.65)
    duration_range_ps: Range = Range(0.1, 5.0, 0.1)
    corr_ratio_log10: Range = Range(-1.5, 3.0, 0.25)
    window_um: float = 0.05
    window_ps: float = 0.2
    min_window: int = 20
    grid_format: str = "csv"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.grid_n < 2 or self.grid_n & (self.grid_n - 1):
            raise ValueError("grid_n must be a power of two")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if any(s < 0 for s in self.sigma_rel):
            raise ValueError("sigma_rel entries must be non-negative")
        if self.pulse_ps <= 0 or self.l_corr_m <= 0:
            raise ValueError("pulse duration and correlation length must be positive")
        if self.grid_format not in ("csv", "bin"):
            raise ValueError("grid_format must be csv or bin")
        GlassComposition(self.doping)

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        kinds = {f.name: f for f in fields(cls)}
        out = {}
        for key, raw in values.items():
            if key not in kinds:
                raise ValueError(f"unknown config key {key!r}")
            out[key] = _coerce(key, raw)
        return cls(**out)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key] = value
        return cls.from_mapping(values)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text())

    def updated(self, **overrides) -> "ExperimentConfig":
        return replace(self, **{k: _coerce(k, v) for k, v in overrides.items() if v is not None})

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(f"{x:g}" for x in v)
            elif v is None:
                v = "auto"
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @property
    def pulse_s(self) -> float:
        return self.pulse_ps * 1e-12

    def geometry(self, radius_um=None) -> FiberGeometry:
        a = self.radius_um if radius_um is None else radius_um
        return FiberGeometry(float(a), GlassComposition(self.doping), self.coefficients)


_INT_KEYS = {"samples", "seed", "grid_n", "workers", "min_window"}
_RANGE_KEYS = {"radius_range_um", "duration_range_ps", "corr_ratio_log10"}
_LIST_KEYS = {"sigma_rel", "doping_list", "radii_um"}
_STR_KEYS = {"kind", "coefficients", "grid_format"}


def _coerce(key, raw):
    if key in _STR_KEYS:
        return str(raw).strip()
    if key in _INT_KEYS:
        return int(raw)
    if key in _RANGE_KEYS:
        return raw if isinstance(raw, Range) else Range.parse(raw)
    if key in _LIST_KEYS:
        return _floats(raw)
    if key == "dz_m":
        if raw is None or str(raw).strip().lower() in ("", "auto", "none"):
            return None
        return float(raw)
    return float(raw)


# -- sources -----------------------------------------------------------------


@dataclass(frozen=True)
class Source:
    """A phase-matched fiber with a full-collision pump configuration and its time grid."""

    geometry: FiberGeometry
    assignment: FieldAssignment
    beta1: dict
    dbeta0: float
    pumps: PumpConfig
    length_m: float
    grid: TimeGrid

    @classmethod
    def design(
        cls,
        geometry: FiberGeometry,
        pump_um: float = 1.064,
        pulse_s: float = 1e-12,
        grid_n: int = 512,
        modes=DEFAULT_MODES,
    ) -> "Source":
        pm = solve_phase_matched_signal(geometry, pump_um, modes)
        if not pm.found:
            raise NoPhaseMatchError(f"a = {geometry.core_radius_um:.4f} um: {pm.reason}")
        beta1 = group_delays(geometry, pm.assignment)
        pumps = PumpConfig.full_collision(beta1["p"], beta1["q"], pulse_s)
        _, length = standard_collision_setup(beta1["p"], beta1["q"], pulse_s)
        grid = TimeGrid.for_collision(pumps, beta1, length, grid_n)
        return cls(geometry, pm.assignment, beta1, pm.residual, pumps, length, grid)

    @property
    def collision_length_m(self) -> float:
        return collision_length(self.pumps.t_p, self.beta1["p"], self.beta1["q"])

    def lookup(self, sigma_um: float) -> DispersionLookup:
        return build_lookup(self.geometry, self.assignment, WINDOW_SIGMAS * sigma_um)

    def unperturbed(self) -> JointAmplitude:
        return build_jta_uniform(self.pumps, self.beta1, self.dbeta0, self.length_m, self.grid)

    def realize(self, spec: FluctuationSpec, lookup: DispersionLookup | None, index: int):
        """One fluctuating fiber: its radius profile and joint temporal amplitude."""
        a0 = self.geometry.core_radius_um
        profile = sample_profile(spec, a0, self.length_m, index)
        if spec.sigma_um == 0:
            return profile, self.unperturbed()
        record = profile_to_dispersion(profile, lookup)
        return profile, build_jta(self.pumps, record, self.grid)


def _realize_purity(args):
    source, spec, lookup, index = args
    try:
        return purity(source.realize(spec, lookup, index)[1])
    except Exception as exc:
        raise RealizationError(spec.seed, index, exc) from exc


def _realize_pair(args):
    source, spec, lookup, k = args
    try:
        j1 = source.realize(spec, lookup, 2 * k)[1]
        j2 = source.realize(spec, lookup, 2 * k + 1)[1]
    except Exception as exc:
        raise RealizationError(spec.seed, 2 * k, exc) from exc
    return purity(j1), purity(j2), visibility(j1, j2)


def parallel_map(fn, tasks, workers: int = 1):
    """Ordered map; results are gathered by task index whatever the worker count."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


# -- statistics --------------------------------------------------------------


@dataclass(frozen=True)
class McStats:
    """Median and quartiles of a sample per sweep point; ``flagged`` marks thin windows."""

    x: np.ndarray
    median: np.ndarray
    q25: np.ndarray
    q75: np.ndarray
    count: np.ndarray
    flagged: np.ndarray

    def rows(self):
        for k in range(len(self.x)):
            yield self.x[k], self.median[k], self.q25[k], self.q75[k], int(self.count[k]), bool(self.flagged[k])


def group_stats(x, samples, min_samples: int = 20) -> McStats:
    """Statistics of one sample list per sweep point."""
    med, lo, hi, cnt = [], [], [], []
    for s in samples:
        s = np.asarray(s, dtype=float)
        cnt.append(s.size)
        if s.size:
            lo_, med_, hi_ = np.percentile(s, [25, 50, 75])
        else:
            lo_ = med_ = hi_ = np.nan
        med.append(med_)
        lo.append(lo_)
        hi.append(hi_)
    cnt = np.array(cnt)
    return McStats(np.asarray(x, float), np.array(med), np.array(lo), np.array(hi), cnt, cnt < min_samples)


def sliding_window_stats(x, y, centers, width: float, min_samples: int = 20) -> McStats:
    """Running median and quartiles of ``y`` over windows of ``width`` in ``x``."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    groups = [y[np.abs(x - c) <= width / 2] for c in centers]
    return group_stats(centers, groups, min_samples)


# -- output ------------------------------------------------------------------


def _header(cfg: ExperimentConfig, extra: dict | None = None) -> str:
    text = cfg.to_text()
    if extra:
        text += "".join(f"{k} = {v}\n" for k, v in extra.items())
    return "".join(f"# {line}\n" for line in text.splitlines())


def _fmt(v):
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def write_table(path, cfg: ExperimentConfig, columns, rows, extra=None) -> Path:
    """CSV with the resolved configuration as a ``#`` comment block."""
    buf = io.StringIO()
    buf.write(_header(cfg, extra))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path = Path(path)
    path.write_text(buf.getvalue())
    return path


def read_table(path):
    """Column names and rows (as strings) of a table written by ``write_table``."""
    lines = [l for l in Path(path).read_text().splitlines() if not l.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def _stats_rows(label, stats: McStats, **fixed):
    for x, med, lo, hi, n, flag in stats.rows():
        yield [*fixed.values(), x, med, lo, hi, n, flag]


STATS_COLUMNS = ["median", "q25", "q75", "count", "flagged"]


@dataclass
class RunResult:
    tables: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _prepare(out_dir, cfg):
    if out_dir is None:
        return None
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(cfg.to_text())
    return out


# -- experiments -------------------------------------------------------------


def run_jsa_realizations(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    """Purity of ``samples`` seeded realizations per sigma level.

    Realization 0 of each level has its radius profile and ``|JSA|`` exported.
    """
    out = _prepare(out_dir, cfg)
    source = Source.design(cfg.geometry(), cfg.pump_um, cfg.pulse_s, cfg.grid_n)
    a0 = source.geometry.core_radius_um
    res = RunResult()
    rows = []
    per_sigma = {}
    for frac in cfg.sigma_rel:
        spec = FluctuationSpec.relative(frac, a0, cfg.l_corr_m, dz_m=cfg.dz_m, seed=cfg.seed)
        lookup = source.lookup(spec.sigma_um) if frac > 0 else None
        n = 1 if frac == 0 else cfg.samples
        values = np.array(parallel_map(_realize_purity, [(source, spec, lookup, k) for k in range(n)], cfg.workers))
        per_sigma[frac] = values
        lo, med, hi = np.percentile(values, [25, 50, 75])
        rows.append([frac, values[0], med, lo, hi, n])
        if out is not None:
            profile, ja = source.realize(spec, lookup, 0)
            tag = f"sigma{frac:g}"
            profile.to_csv(out / f"profile_{tag}.csv")
            jsa = jta_to_jsa(ja, (source.assignment.omega_s, source.assignment.omega_i))
            grid_dir = out / "grids"
            grid_dir.mkdir(exist_ok=True)
            norm = np.abs(jsa.values) / np.abs(jsa.values).max()
            mag = JointAmplitude(norm.astype(complex), jsa.axis_s, jsa.axis_i, "frequency", jsa.omega0)
            res.files.append(write_grid(mag, grid_dir / f"jsa_{tag}.{cfg.grid_format}", cfg.grid_format))
    cols = ["sigma_rel", "purity_first", "median", "q25", "q75", "count"]
    res.tables["purity"] = (cols, rows)
    res.summary = {"length_m": source.length_m, "purities": per_sigma}
    if out is not None:
        extra = {"fiber_length_m": f"{source.length_m:.6g}"}
        res.files.append(write_table(out / "purity.csv", cfg, cols, rows, extra))
    return res


def _sample_uniform(cfg, lo, hi, index):
    return float(realization_rng(cfg.seed, index, PARAMETER_STREAM).uniform(lo, hi))


def _radius_task(args):
    cfg, index = args
    a0 = _sample_uniform(cfg, cfg.radius_range_um.start, cfg.radius_range_um.stop, index)
    try:
        source = Source.design(cfg.geometry(a0), cfg.pump_um, cfg.pulse_s, cfg.grid_n)
    except NoPhaseMatchError:
        return a0, [np.nan] * len(cfg.sigma_rel)
    smax = max(cfg.sigma_rel) * a0
    lookup = source.lookup(smax) if smax > 0 else None
    out = []
    for frac in cfg.sigma_rel:
        spec = FluctuationSpec.relative(frac, a0, cfg.l_corr_m, dz_m=cfg.dz_m, seed=cfg.seed)
        try:
            out.append(purity(source.realize(spec, lookup, index)[1]))
        except Exception as exc:
            raise RealizationError(cfg.seed, index, exc) from exc
    return a0, out


def run_purity_vs_radius(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    """Purity of one fiber per uniformly drawn mean radius and sigma level, windowed in radius."""
    out = _prepare(out_dir, cfg)
    results = parallel_map(_radius_task, [(cfg, k) for k in range(cfg.samples)], cfg.workers)
    radii = np.array([r[0] for r in results])
    values = np.array([r[1] for r in results])
    centers = cfg.radius_range_um.values()
    res = RunResult()
    rows = []
    for j, frac in enumerate(cfg.sigma_rel):
        ok = np.isfinite(values[:, j])
        st = sliding_window_stats(radii[ok], values[ok, j], centers, cfg.window_um, cfg.min_window)
        res.summary[frac] = st
        rows.extend(_stats_rows("radius", st, sigma_rel=frac))
    cols = ["sigma_rel", "radius_um", *STATS_COLUMNS]
    res.tables["stats"] = (cols, rows)
    raw_cols = ["index", "radius_um", *[f"purity_sigma{f:g}" for f in cfg.sigma_rel]]
    raw = [[k, radii[k], *values[k]] for k in range(len(radii))]
    res.tables["samples"] = (raw_cols, raw)
    if out is not None:
        res.files.append(write_table(out / "purity_vs_radius.csv", cfg, cols, rows))
        res.files.append(write_table(out / "samples.csv", cfg, raw_cols, raw))
    return res


def _duration_task(args):
    cfg, a0, frac, index, lookup, base = args
    t_ps = _sample_uniform(cfg, cfg.duration_range_ps.start, cfg.duration_range_ps.stop, index)
    t = t_ps * 1e-12
    pumps = PumpConfig.full_collision(base.beta1["p"], base.beta1["q"], t)
    _, length = standard_collision_setup(base.beta1["p"], base.beta1["q"], t)
    grid = TimeGrid.for_collision(pumps, base.beta1, length, cfg.grid_n)
    source = replace(base, pumps=pumps, length_m=length, grid=grid)
    spec = FluctuationSpec.relative(frac, a0, cfg.l_corr_m, dz_m=cfg.dz_m, seed=cfg.seed)
    try:
        return t_ps, length, purity(source.realize(spec, lookup, index)[1])
    except Exception as exc:
        raise RealizationError(cfg.seed, index, exc) from exc


def run_purity_vs_duration(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    """Purity against pump duration; the fiber length follows each duration."""
    out = _prepare(out_dir, cfg)
    centers = cfg.duration_range_ps.values()
    res = RunResult()
    rows, raw = [], []
    for a0 in cfg.radii_um:
        base = Source.design(cfg.geometry(a0), cfg.pump_um, cfg.pulse_s, cfg.grid_n)
        for frac in cfg.sigma_rel:
            lookup = base.lookup(frac * a0) if frac > 0 else None
            tasks = [(cfg, a0, frac, k, lookup, base) for k in range(cfg.samples)]
            results = np.array(parallel_map(_duration_task, tasks, cfg.workers))
            st = sliding_window_stats(results[:, 0], results[:, 2], centers, cfg.window_ps, cfg.min_window)
            res.summary[(a0, frac)] = st
            rows.extend(_stats_rows("duration", st, radius_um=a0, sigma_rel=frac))
            raw.extend([a0, frac, k, *results[k]] for k in range(len(results)))
    cols = ["radius_um", "sigma_rel", "pulse_ps", *STATS_COLUMNS]
    raw_cols = ["radius_um", "sigma_rel", "index", "pulse_ps", "length_m", "purity"]
    res.tables["stats"] = (cols, rows)
    res.tables["samples"] = (raw_cols, raw)
    if out is not None:
        res.files.append(write_table(out / "purity_vs_duration.csv", cfg, cols, rows))
        res.files.append(write_table(out / "samples.csv", cfg, raw_cols, raw))
    return res


def worst_ratio(ratios, medians) -> float:
    """Location of the median-purity minimum, refined by a parabola in log ratio."""
    ratios, medians = np.asarray(ratios, float), np.asarray(medians, float)
    k = int(np.nanargmin(medians))
    if k == 0 or k == len(ratios) - 1:
        return float(ratios[k])
    x = np.log10(ratios[k - 1 : k + 2])
    c = np.polyfit(x, medians[k - 1 : k + 2], 2)
    if c[0] <= 0:
        return float(ratios[k])
    return float(10 ** np.clip(-c[1] / (2 * c[0]), x[0], x[-1]))


def run_correlation_length(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    """Purity and two-source visibility against l_coll/l_corr.

    Visibility pairs realizations (2k, 2k+1), so ``samples`` fibers give
    ``samples // 2`` visibility values.
    """
    out = _prepare(out_dir, cfg)
    ratios = 10 ** cfg.corr_ratio_log10.values()
    frac = max(cfg.sigma_rel)
    res = RunResult()
    rows = []
    for a0 in cfg.radii_um:
        source = Source.design(cfg.geometry(a0), cfg.pump_um, cfg.pulse_s, cfg.grid_n)
        lookup = source.lookup(frac * a0) if frac > 0 else None
        pur, vis = [], []
        for rt in ratios:
            spec = FluctuationSpec.relative(frac, a0, source.collision_length_m / rt, seed=cfg.seed)
            tasks = [(source, spec, lookup, k) for k in range(max(cfg.samples // 2, 1))]
            r = np.array(parallel_map(_realize_pair, tasks, cfg.workers))
            pur.append(r[:, :2].ravel())
            vis.append(r[:, 2])
        ps = group_stats(ratios, pur, cfg.min_window)
        vs = group_stats(ratios, vis, cfg.min_window)
        worst = worst_ratio(ratios, ps.median)
        res.summary[a0] = {"purity": ps, "visibility": vs, "worst_ratio": worst, "length_m": source.length_m}
        for k, rt in enumerate(ratios):
            rows.append(
                [a0, rt, source.collision_length_m / rt, ps.median[k], ps.q25[k], ps.q75[k],
                 vs.median[k], vs.q25[k], vs.q75[k], ps.count[k], vs.count[k]]
            )
    cols = ["radius_um", "lcoll_over_lcorr", "l_corr_m", "purity_median", "purity_q25", "purity_q75",
            "visibility_median", "visibility_q25", "visibility_q75", "purity_count", "visibility_count"]
    res.tables["stats"] = (cols, rows)
    if out is not None:
        extra = {f"worst_ratio_a{a0:g}": f"{res.summary[a0]['worst_ratio']:.4g}" for a0 in cfg.radii_um}
        res.files.append(write_table(out / "correlation_length.csv", cfg, cols, rows, extra))
    return res


def _sweep_cell(args):
    cfg, doping, a = args
    c = replace(cfg, doping=doping)
    try:
        source = Source.design(c.geometry(a), cfg.pump_um, cfg.pulse_s, cfg.grid_n)
    except NoPhaseMatchError:
        return [doping, a, None, None, None, None]
    s_um = source.assignment.wavelength_um("s")
    i_um = source.assignment.wavelength_um("i")
    return [doping, a, s_um * 1e3, i_um * 1e3, purity(source.unperturbed()), raman_window_check(cfg.pump_um, s_um)]


def _ridge_row(cfg, doping):
    # the ridge is searched over the full radius band, not just the sweep grid
    c = replace(cfg, doping=doping)
    comp = GlassComposition(doping)
    try:
        st = find_stable_radius(comp, cfg.pump_um, coefficients=cfg.coefficients, radius_range=RADIUS_RANGE_UM)
    except ValueError:
        return [doping] + [None] * 8
    geom = c.geometry(st.radius_um)
    source = Source.design(geom, cfg.pump_um, cfg.pulse_s, cfg.grid_n)
    return [
        doping,
        st.radius_um,
        st.signal_um * 1e3,
        source.assignment.wavelength_um("i") * 1e3,
        purity(source.unperturbed()),
        raman_window_check(cfg.pump_um, st.signal_um),
        float(v_number(geom, cfg.pump_um)),
        cutoff_wavelength(geom, LP11) * 1e3,
        source.length_m,
    ]


def run_design_sweep(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    """Phase-matched wavelengths and unperturbed purity over doping and radius.

    Cells without a phase-matched solution are kept with empty values.
    """
    out = _prepare(out_dir, cfg)
    tasks = [(cfg, d, float(a)) for d in cfg.doping_list for a in cfg.radius_range_um.values()]
    rows = parallel_map(_sweep_cell, tasks, cfg.workers)
    ridge = [_ridge_row(cfg, d) for d in cfg.doping_list]
    cols = ["doping", "radius_um", "lambda_s_nm", "lambda_i_nm", "purity", "raman_ok"]
    rcols = ["doping", "radius_um", "lambda_s_nm", "lambda_i_nm", "purity", "raman_ok", "v_number",
             "lp11_cutoff_nm", "length_m"]
    res = RunResult(tables={"sweep": (cols, rows), "ridge": (rcols, ridge)})
    if out is not None:
        res.files.append(write_table(out / "sweep.csv", cfg, cols, rows))
        res.files.append(write_table(out / "ridge.csv", cfg, rcols, ridge))
    return res


def run_stable_radius(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    out = _prepare(out_dir, cfg)
    lo, hi = cfg.radius_range_um.start, cfg.radius_range_um.stop
    st = find_stable_radius(GlassComposition(cfg.doping), cfg.pump_um, coefficients=cfg.coefficients, radius_range=(lo, hi))
    geom = cfg.geometry(st.radius_um)
    row = [cfg.doping, st.radius_um, st.signal_um * 1e3, st.slope_nm_per_step, float(v_number(geom, cfg.pump_um)),
           cutoff_wavelength(geom, LP11) * 1e3]
    cols = ["doping", "radius_um", "lambda_s_nm", "slope_nm_per_0.01um", "v_number", "lp11_cutoff_nm"]
    res = RunResult(tables={"stable": (cols, [row])}, summary={"stable": st})
    if out is not None:
        res.files.append(write_table(out / "stable_radius.csv", cfg, cols, [row]))
    return res


RUNNERS = {
    "jsa-realizations": run_jsa_realizations,
    "purity-vs-radius": run_purity_vs_radius,
    "purity-vs-duration": run_purity_vs_duration,
    "correlation-length": run_correlation_length,
    "design-sweep": run_design_sweep,
    "stable-radius": run_stable_radius,
}


def run(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    return RUNNERS[cfg.kind](cfg, out_dir)
