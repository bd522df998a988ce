import xml.etree.ElementTree as ET

import numpy as np
import pytest

from tomobell.cli import (
    CSV_HEADER,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
    SweepConfig,
    SweepRecord,
    emit_plot,
    main,
    read_sweep_csv,
    run_sweep,
    write_sweep_csv,
)
from tomobell.optimizer import OptimizerConfig
from tomobell.plotting import build_sweep_figure, save_figure
from tomobell.states import save_density_matrix, werner_state

TSIRELSON = 2.0 * np.sqrt(2.0)


def small_cfg(**kw):
    defaults = dict(
        family="isotropic",
        dim=2,
        functional="chsh",
        param_min=0.0,
        param_max=1.0,
        steps=3,
        optimizer=OptimizerConfig(restarts=6, seed=0),
        out_path="",
    )
    defaults.update(kw)
    return SweepConfig(**defaults)


def make_records(n):
    rng = np.random.default_rng(101)
    return [
        SweepRecord(
            param=float(i) / max(n - 1, 1),
            bell_max=float(rng.uniform(0, 2.8)),
            classical_bound=2.0,
            purity=float(rng.uniform(0.1, 1.0)),
            angles=rng.uniform(0, np.pi, size=8),
            partition_1="01|2",
            partition_2="0|12",
            separable_flag=bool(i % 2),
        )
        for i in range(n)
    ]


def test_sweep_config_validation():
    with pytest.raises(ValueError, match="domain"):
        small_cfg(param_min=-0.5)
    with pytest.raises(ValueError, match="dim 3"):
        small_cfg(functional="i3", dim=2)
    with pytest.raises(ValueError, match="steps"):
        small_cfg(steps=0)


def test_csv_round_trip_full_precision(tmp_path):
    records = make_records(5)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(path, "werner", records)
    text = path.read_text().splitlines()
    assert text[0] == "# family=werner param=phi"
    assert text[1] == CSV_HEADER
    loaded, meta = read_sweep_csv(path)
    assert meta["param"] == "phi"
    assert len(loaded) == len(records)
    for got, want in zip(loaded, records):
        assert got.param == want.param
        assert got.bell_max == want.bell_max
        assert got.purity == want.purity
        assert np.array_equal(got.angles, want.angles)
        assert got.partition_1 == want.partition_1
        assert got.separable_flag == want.separable_flag


def test_read_sweep_csv_reports_line_numbers(tmp_path):
    path = tmp_path / "broken.csv"
    path.write_text("# family=isotropic param=p\n" + CSV_HEADER + "\n1,2,3\n")
    with pytest.raises(ValueError, match="line 3"):
        read_sweep_csv(path)
    path.write_text("param,nope\n")
    with pytest.raises(ValueError, match="header"):
        read_sweep_csv(path)


def test_run_sweep_isotropic_qubits(tmp_path):
    out = tmp_path / "iso.csv"
    cfg = small_cfg(
        steps=11,
        optimizer=OptimizerConfig(restarts=16, seed=0),
        out_path=str(out),
    )
    records = run_sweep(cfg)
    assert [r.param for r in records] == pytest.approx(list(np.linspace(0, 1, 11)))
    assert records[-1].bell_max == pytest.approx(TSIRELSON, abs=1e-3)
    # separability annotation flips at p = 1/2
    assert records[5].separable_flag and not records[6].separable_flag
    loaded, meta = read_sweep_csv(out)
    assert meta == {"family": "isotropic", "param": "p"}
    assert len(loaded) == 11


def test_run_sweep_purity_of_maximally_mixed_point(tmp_path, monkeypatch):
    monkeypatch.setenv("TOMOBELL_THREADS", "1")
    out = tmp_path / "mixed.csv"
    plot = tmp_path / "mixed.svg"
    cfg = small_cfg(
        family="isotropic",
        dim=3,
        param_min=1.0 / 9.0,
        param_max=1.0 / 9.0,
        steps=1,
        optimizer=OptimizerConfig(restarts=2, seed=0),
        out_path=str(out),
        plot_path=str(plot),
    )
    records = run_sweep(cfg)
    assert plot.exists()
    assert records[0].purity == pytest.approx(1.0 / 9.0, abs=1e-12)
    # portrait observables on a qutrit have trace +-1, so every correlation
    # of the maximally mixed state equals s1 s2 / 9 and B = 2/9 exactly
    assert records[0].bell_max == pytest.approx(2.0 / 9.0, abs=1e-9)


def test_cli_eval_violation_and_exit_codes(tmp_path, capsys):
    singlet_path = tmp_path / "singlet.txt"
    save_density_matrix(singlet_path, werner_state(2, -1.0), (2, 2))
    code = main(
        ["eval", "--state-file", str(singlet_path), "--restarts", "16", "--seed", "0"]
    )
    out = capsys.readouterr().out
    assert code == EXIT_VIOLATION
    assert "violation: yes" in out
    value = float([ln for ln in out.splitlines() if ln.startswith("bell value:")][0].split(":")[1])
    assert value == pytest.approx(TSIRELSON, abs=1e-3)

    mixed_path = tmp_path / "mixed.txt"
    save_density_matrix(mixed_path, np.eye(4) / 4.0, (2, 2))
    code = main(["eval", "--state-file", str(mixed_path), "--restarts", "4"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "violation: no" in out


def test_cli_eval_invalid_state_file(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    save_density_matrix(bad, np.eye(4) * 0.225, (2, 2))  # trace 0.9
    code = main(["eval", "--state-file", str(bad)])
    assert code == EXIT_IO
    assert "unit trace" in capsys.readouterr().err

    missing = tmp_path / "missing.txt"
    assert main(["eval", "--state-file", str(missing)]) == EXIT_IO


def test_cli_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--family", "ghz", "--dim", "2", "--out", "x.csv"])
    assert exc.value.code == EXIT_USAGE
    # valid flags, invalid value: handled as usage error without traceback
    code = main(
        [
            "sweep",
            "--family",
            "isotropic",
            "--dim",
            "2",
            "--param-min",
            "-2",
            "--steps",
            "2",
            "--out",
            str(tmp_path / "x.csv"),
        ]
    )
    assert code == EXIT_USAGE


def test_cli_sweep_io_error(tmp_path):
    code = main(
        [
            "sweep",
            "--family",
            "isotropic",
            "--dim",
            "2",
            "--steps",
            "1",
            "--param-min",
            "0",
            "--param-max",
            "0",
            "--restarts",
            "2",
            "--out",
            str(tmp_path / "no-such-dir" / "x.csv"),
        ]
    )
    assert code == EXIT_IO


def test_cli_threshold_werner_qubits(tmp_path, capsys):
    out = tmp_path / "threshold.csv"
    code = main(
        [
            "threshold",
            "--family",
            "werner",
            "--dim",
            "2",
            "--functional",
            "chsh",
            "--restarts",
            "8",
            "--tol",
            "5e-3",
            "--out",
            str(out),
        ]
    )
    assert code == EXIT_OK
    printed = capsys.readouterr().out
    assert "threshold phi" in printed
    f_star = float(printed.split("=")[1].split()[0])
    assert f_star == pytest.approx((1.0 - 3.0 / np.sqrt(2.0)) / 2.0, abs=2e-2)
    lines = out.read_text().splitlines()
    assert lines[0] == "family,dim,functional,param,singlet_fraction"
    assert lines[1].startswith("werner,2,chsh,")


def test_cli_threshold_bad_bracket(capsys):
    code = main(
        [
            "threshold",
            "--family",
            "isotropic",
            "--dim",
            "2",
            "--param-min",
            "0.0",
            "--param-max",
            "0.2",
            "--restarts",
            "4",
            "--tol",
            "0.05",
        ]
    )
    assert code == EXIT_USAGE
    assert "straddle" in capsys.readouterr().err


def test_emit_plot_creates_svg(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    write_sweep_csv(csv_path, "isotropic", make_records(2))
    svg_path = tmp_path / "fig.svg"
    emit_plot(csv_path, svg_path)
    root = ET.parse(svg_path).getroot()
    assert root.tag.endswith("svg")


def test_plot_polyline_matches_row_count():
    records = make_records(2)
    fig = build_sweep_figure(
        [r.param for r in records],
        [r.bell_max for r in records],
        [r.purity for r in records],
    )
    ax_bell, ax_purity = fig.axes
    assert len(ax_bell.lines[0].get_xdata()) == 2
    assert len(ax_purity.lines[0].get_xdata()) == 2


def test_plot_constant_at_bound_coincides_with_bound_line():
    params = [0.0, 0.5, 1.0]
    fig = build_sweep_figure(params, [2.0, 2.0, 2.0], [0.5, 0.6, 0.7], bound=2.0)
    ax_bell = fig.axes[0]
    data_line, bound_line = ax_bell.lines[0], ax_bell.lines[1]
    assert np.all(np.asarray(data_line.get_ydata()) == 2.0)
    assert np.all(np.asarray(bound_line.get_ydata()) == 2.0)


def test_plot_deterministic_bytes(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    write_sweep_csv(csv_path, "werner", make_records(4))
    first = tmp_path / "a.svg"
    second = tmp_path / "b.svg"
    emit_plot(csv_path, first)
    emit_plot(csv_path, second)
    assert first.read_bytes() == second.read_bytes()


def test_cli_plot_subcommand(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    write_sweep_csv(csv_path, "isotropic", make_records(3))
    svg_path = tmp_path / "out.svg"
    assert main(["plot", "--out", str(csv_path), "--plot", str(svg_path)]) == EXIT_OK
    assert svg_path.exists()
    missing = tmp_path / "nope.csv"
    assert main(["plot", "--out", str(missing), "--plot", str(svg_path)]) == EXIT_IO


def test_save_figure_png_extension(tmp_path):
    fig = build_sweep_figure([0.0, 1.0], [1.0, 2.0], [0.5, 1.0])
    path = tmp_path / "fig.png"
    save_figure(fig, path)
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
