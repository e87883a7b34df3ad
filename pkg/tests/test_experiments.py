import numpy as np
import pytest

from spfwm.cli import main
from spfwm.experiments import (
    ExperimentConfig,
    Range,
    _sweep_cell,
    group_stats,
    read_table,
    run_correlation_length,
    run_jsa_realizations,
    run_purity_vs_duration,
    run_purity_vs_radius,
    sliding_window_stats,
    worst_ratio,
)

SMALL = dict(grid_n=128, samples=4)


def _body(path):
    return "".join(l for l in path.read_text().splitlines(True) if not l.startswith("#"))


def test_config_text_round_trip():
    cfg = ExperimentConfig(kind="design-sweep", sigma_rel=(0.0, 0.01), dz_m=0.01, radius_range_um=Range(4, 5, 0.5))
    again = ExperimentConfig.from_text(cfg.to_text())
    assert again == cfg


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nkind = correlation-length\nradii_um = 4.0, 4.65\nsamples = 20  # trailing\n")
    cfg = ExperimentConfig.from_file(path)
    assert cfg.radii_um == (4.0, 4.65) and cfg.samples == 20
    assert cfg.updated(samples="7", seed=None).samples == 7


@pytest.mark.parametrize(
    "text",
    ["kind = nope\n", "samples = 0\n", "grid_n = 100\n", "bogus = 1\n", "doping = 0.5\n", "radius_range_um = 1:2\n"],
)
def test_invalid_config(text):
    with pytest.raises(ValueError):
        ExperimentConfig.from_text(text)


def test_range_values():
    assert np.allclose(Range.parse("3.0:7.5:0.05").values()[[0, -1]], [3.0, 7.5])
    assert len(Range(0, 1, 0.25).values()) == 5
    with pytest.raises(ValueError):
        Range.parse("1:0:0.1")


def test_sliding_window_stats_and_flags():
    x = np.linspace(0, 1, 101)
    y = x.copy()
    st = sliding_window_stats(x, y, [0.5, 0.0], width=0.2, min_samples=20)
    assert st.median[0] == pytest.approx(0.5)
    assert st.q25[0] <= st.median[0] <= st.q75[0]
    assert st.count[0] == 21 and not st.flagged[0]
    assert st.count[1] == 11 and st.flagged[1]
    empty = group_stats([1.0], [[]])
    assert np.isnan(empty.median[0]) and empty.flagged[0]


def test_worst_ratio_parabola():
    r = 10 ** np.linspace(-1, 2, 13)
    med = (np.log10(r) - np.log10(2.55)) ** 2
    assert worst_ratio(r, med) == pytest.approx(2.55, rel=1e-6)
    assert worst_ratio(r, -np.log10(r)) == r[-1]


def test_realizations_deterministic_across_workers(tmp_path):
    cfg = ExperimentConfig(sigma_rel=(0.0, 0.01), **SMALL)
    run_jsa_realizations(cfg, tmp_path / "a")
    run_jsa_realizations(cfg.updated(workers=2), tmp_path / "b")
    body_a, body_b = _body(tmp_path / "a" / "purity.csv"), _body(tmp_path / "b" / "purity.csv")
    assert body_a == body_b
    assert (tmp_path / "a" / "grids" / "jsa_sigma0.01.csv").exists()
    assert (tmp_path / "a" / "profile_sigma0.01.csv").exists()
    assert (tmp_path / "a" / "config.txt").read_text() == cfg.to_text()


def test_radius_sweep_zero_sigma_is_deterministic_curve():
    cfg = ExperimentConfig(kind="purity-vs-radius", sigma_rel=(0.0, 0.005), radius_range_um=Range(4.0, 4.5, 0.25),
                           window_um=0.5, min_window=2, **SMALL)
    res = run_purity_vs_radius(cfg)
    cols, rows = res.tables["samples"]
    for row in rows:
        a = row[1]
        ref = _sweep_cell((cfg, cfg.doping, a))[4]
        assert row[2] == pytest.approx(ref, abs=1e-12)
    assert all(4.0 <= r[1] <= 4.5 for r in rows)


def test_duration_sweep_reports_lengths():
    cfg = ExperimentConfig(kind="purity-vs-duration", radii_um=(4.65,), sigma_rel=(0.01,),
                           duration_range_ps=Range(0.5, 2.0, 0.5), window_ps=1.0, min_window=1, **SMALL)
    res = run_purity_vs_duration(cfg)
    cols, rows = res.tables["samples"]
    t, length = np.array([r[3] for r in rows]), np.array([r[4] for r in rows])
    assert np.allclose(length / t, (length / t)[0])


def test_correlation_length_table():
    cfg = ExperimentConfig(kind="correlation-length", radii_um=(4.0,), sigma_rel=(0.01,),
                           corr_ratio_log10=Range(-1, 1, 1), min_window=1, **SMALL)
    res = run_correlation_length(cfg)
    s = res.summary[4.0]
    assert len(s["purity"].x) == 3
    assert np.all(s["visibility"].count == 2) and np.all(s["purity"].count == 4)


def test_cli_sweep(tmp_path, capsys):
    out = tmp_path / "sweep"
    assert main(["sweep", "--doping", "0.067", "--radius", "4.0:4.3:0.1", "--grid-n", "128", "--out", str(out)]) == 0
    cols, rows = read_table(out / "sweep.csv")
    radius = [float(r[cols.index("radius_um")]) for r in rows]
    assert radius == sorted(radius) and len(radius) == 4
    cols, rows = read_table(out / "ridge.csv")
    assert float(rows[0][cols.index("radius_um")]) == pytest.approx(4.65, abs=0.05)
    assert (out / "sweep.csv").read_text().startswith("# kind = design-sweep")


def test_cli_stable_radius(tmp_path, capsys):
    assert main(["stable-radius", "--doping", "0.067", "--out", str(tmp_path)]) == 0
    line = capsys.readouterr().out.splitlines()[0]
    a = float(line.split("=")[1].split()[0])
    assert a == pytest.approx(4.65, abs=0.05)


def test_cli_rerun_is_byte_identical(tmp_path):
    args = ["jsa", "--samples", "3", "--grid-n", "128", "--sigma", "0.005", "--seed", "42"]
    assert main(args + ["--out", str(tmp_path / "1")]) == 0
    assert main(args + ["--out", str(tmp_path / "2")]) == 0
    assert (tmp_path / "1" / "purity.csv").read_bytes() == (tmp_path / "2" / "purity.csv").read_bytes()


def test_cli_invalid_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("samples = -3\n")
    assert main(["jsa", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "invalid configuration" in capsys.readouterr().err
    assert main(["jsa", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_cli_reports_failing_realization(tmp_path, capsys):
    # a fluctuation far beyond the lookup range loses LP11 guidance
    code = main(["jsa", "--sigma", "0.2", "--samples", "1", "--grid-n", "128", "--out", str(tmp_path)])
    assert code != 0
    assert "spfwm:" in capsys.readouterr().err


@pytest.fixture(scope="module")
def ridges():
    from spfwm.experiments import _ridge_row

    cfg = ExperimentConfig(grid_n=512)
    return {d: _ridge_row(cfg, d) for d in (0.051, 0.060, 0.067)}


def test_ridge_at_design_doping(ridges):
    row = ridges[0.067]
    assert row[1] == pytest.approx(4.65, abs=0.05)
    assert row[2] == pytest.approx(1235, abs=3)
    assert row[5]


def test_ridge_purity_low_doping(ridges):
    assert ridges[0.051][4] == pytest.approx(0.98, abs=0.01)


def test_ridge_purity_intermediate_doping(ridges):
    assert ridges[0.060][4] < 0.97
