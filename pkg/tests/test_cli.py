"""End-to-end checks of the command line driver.

Each run is driven by a JSON config and writes CSV/JSON artifacts plus a
sha256 manifest.  The invariants pinned here: exit code 2 for config-phase
failures, 3 for numerical ones, byte-identical reruns for fixed seeds, and
manifest hashes that actually match the files on disk.
"""

import hashlib
import json

import numpy as np
from click.testing import CliRunner

from branchedq.cli import emit_dispersion_curve, main


def _write_config(path, payload):
    path.write_text(json.dumps(payload, indent=2))
    return str(path)


def _invoke(args):
    runner = CliRunner()
    return runner.invoke(main, args, catch_exceptions=False)


def _classical_config(**overrides):
    cfg = {
        "version": 1,
        "mode": "classical",
        "seed": 42,
        "dispersion": {"kappa": 3.0},
        "potential": {"form": "quadratic", "alpha": 1.0},
        "classical": {
            "x": 0.0,
            "xdot": 2.0,
            "t_end": 10.0,
            "policy": "random-branch",
            "samples": 101,
        },
    }
    cfg.update(overrides)
    return cfg


def test_classical_rerun_is_byte_identical(tmp_path):
    cfg = _write_config(tmp_path / "c.json", _classical_config())
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert _invoke(["run", "--config", cfg, "--out", str(out_a)]).exit_code == 0
    first = {
        name: (out_a / name).read_bytes()
        for name in ("trajectory.csv", "summary.json", "manifest.json")
    }
    # Same destination: every artifact, manifest included, must reproduce.
    assert _invoke(["run", "--config", cfg, "--out", str(out_a)]).exit_code == 0
    for name, payload in first.items():
        assert (out_a / name).read_bytes() == payload, f"{name} not reproducible"
    # Different destination: the resolved config records the out dir, so
    # only the data artifacts are expected to match byte for byte.
    assert _invoke(["run", "--config", cfg, "--out", str(out_b)]).exit_code == 0
    for name in ("trajectory.csv", "summary.json"):
        assert (out_b / name).read_bytes() == first[name], f"{name} depends on out dir"


def test_manifest_hashes_match_files(tmp_path):
    cfg = _write_config(tmp_path / "c.json", _classical_config())
    out = tmp_path / "out"
    assert _invoke(["run", "--config", cfg, "--out", str(out)]).exit_code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["mode"] == "classical"
    assert manifest["outputs"], "manifest lists no outputs"
    for name, digest in manifest["outputs"].items():
        actual = hashlib.sha256((out / name).read_bytes()).hexdigest()
        assert actual == digest, f"manifest hash stale for {name}"


def test_classical_trajectory_columns(tmp_path):
    cfg = _write_config(tmp_path / "c.json", _classical_config())
    out = tmp_path / "out"
    assert _invoke(["run", "--config", cfg, "--out", str(out)]).exit_code == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,x,xdot,p,E,branch,event"
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and float(first[2]) == 2.0
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) == {"status", "events", "energy_drift"}
    # A branch hop legally adds the 6.75 kinetic gap, so energy_drift is
    # only small when no events fired.
    if summary["events"] == 0:
        assert summary["energy_drift"] < 1e-6


def test_spectrum_mode_outputs(tmp_path):
    cfg = _write_config(
        tmp_path / "s.json",
        {
            "version": 1,
            "mode": "spectrum",
            "dispersion": {"kappa": 3.0},
            "potential": {"form": "quadratic", "alpha": 1.0},
            "grid": {"kind": "folded", "n_inner": 16, "n_arm": 24},
            "solver": {"k": 3, "assembly": "folded"},
        },
    )
    out = tmp_path / "out"
    assert _invoke(["spectrum", "--config", cfg, "--out", str(out)]).exit_code == 0
    lines = (out / "eigenvalues.csv").read_text().splitlines()
    assert lines[0] == "index,energy,residual"
    assert len(lines) == 4
    energies = [float(row.split(",")[1]) for row in lines[1:]]
    assert energies == sorted(energies)
    residuals = [float(row.split(",")[2]) for row in lines[1:]]
    assert max(residuals) < 1e-10
    for i in range(3):
        state = (out / f"state_{i:03d}.csv").read_text().splitlines()
        assert state[0] == "coordinate,branch,re,im"
        assert len(state) == 1 + (2 * 24 + 16 - 1)


def test_evolve_mode_outputs(tmp_path):
    cfg = _write_config(
        tmp_path / "e.json",
        {
            "version": 1,
            "mode": "evolve",
            "dispersion": {"kappa": 3.0},
            "potential": {"form": "quadratic", "alpha": 0.5},
            "grid": {"kind": "folded", "n_inner": 12, "n_arm": 20},
            "evolution": {
                "dt": 1e-3,
                "steps": 6,
                "snapshot_every": 3,
                "packet": {"center": -4.0, "width": 1.0, "boost": 0.5},
            },
        },
    )
    out = tmp_path / "out"
    assert _invoke(["evolve", "--config", cfg, "--out", str(out)]).exit_code == 0
    report = (out / "report.csv").read_text().splitlines()
    assert report[0] == "time,norm,energy,flux_plus,flux_minus"
    assert len(report) == 8
    snaps = (out / "snapshots.csv").read_text().splitlines()
    assert snaps[0] == "time,coordinate,branch,re,im,rho,current"
    times = sorted({float(row.split(",")[0]) for row in snaps[1:]})
    assert times == [0.0, 0.003, 0.006]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["final_time"] == 0.006
    assert summary["norm_drift"] < 1e-12


def test_graph_mode_counting_and_spectrum(tmp_path):
    cfg = _write_config(
        tmp_path / "g.json",
        {
            "version": 1,
            "mode": "graph",
            "graph": {"name": "compton", "resolution": 40, "truncation": 6.0, "k": 5},
        },
    )
    out = tmp_path / "out"
    assert _invoke(["graph", "--config", cfg, "--out", str(out)]).exit_code == 0
    counting = json.loads((out / "counting.json").read_text())
    assert counting == {
        "node_conditions": 6,
        "infinity_conditions": 4,
        "total_conditions": 10,
        "disposable_constants": 10,
    }
    lines = (out / "eigenvalues.csv").read_text().splitlines()
    assert lines[0] == "index,energy,wavenumber"
    assert len(lines) == 6


def test_kernel_mode_hermitian(tmp_path):
    cfg = _write_config(
        tmp_path / "k.json",
        {
            "version": 1,
            "mode": "kernel",
            "dispersion": {"kappa": 3.0},
            "potential": {
                "form": "gaussian",
                "amplitude": 2.0,
                "width": 1.0,
                "center": 1.5,
            },
            "grid": {"kind": "line", "x_min": -12.0, "x_max": 12.0, "n": 160},
            "kernel": {"mode": "hermitian"},
        },
    )
    out = tmp_path / "out"
    assert _invoke(["kernel", "--config", cfg, "--out", str(out)]).exit_code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mode"] == "hermitian"
    assert summary["hermiticity_defect"] < 1e-12
    lines = (out / "kernel.csv").read_text().splitlines()
    assert lines[0] == "offset,re,im"
    # One row per Toeplitz offset (i - j)h, so 2n - 1 of them.
    assert len(lines) == 1 + (2 * 160 - 1)
    offsets = np.array([float(row.split(",")[0]) for row in lines[1:]])
    np.testing.assert_allclose(offsets, -offsets[::-1], atol=1e-12)


def test_kernel_mode_rejects_polynomial_potential(tmp_path):
    cfg = _write_config(
        tmp_path / "k.json",
        {
            "version": 1,
            "mode": "kernel",
            "potential": {"form": "quadratic", "alpha": 1.0},
            "grid": {"kind": "line", "x_min": -5.0, "x_max": 5.0, "n": 50},
        },
    )
    result = _invoke(["kernel", "--config", cfg, "--out", str(tmp_path / "out")])
    assert result.exit_code == 2
    assert "config error" in result.output


def test_schema_violation_exits_two(tmp_path):
    cfg = _write_config(
        tmp_path / "bad.json",
        {"version": 1, "mode": "spectrum", "grid": {"kind": "hexagonal"}},
    )
    result = _invoke(["run", "--config", cfg])
    assert result.exit_code == 2
    assert "config error" in result.output
    assert "grid.kind" in result.output


def test_malformed_json_exits_two(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"version": 1,')
    result = _invoke(["run", "--config", str(path)])
    assert result.exit_code == 2
    assert "config error" in result.output


def test_missing_config_exits_two():
    result = _invoke(["run"])
    assert result.exit_code == 2


def test_numerical_failure_exits_three(tmp_path):
    # Naive quadrature of an off-center Gaussian builds a visibly
    # non-Hermitian matrix, which the eigensolver must refuse.
    cfg = _write_config(
        tmp_path / "nh.json",
        {
            "version": 1,
            "mode": "spectrum",
            "dispersion": {"kappa": 3.0},
            "potential": {
                "form": "gaussian",
                "amplitude": 2.0,
                "width": 1.0,
                "center": 1.5,
            },
            "grid": {"kind": "line", "x_min": -12.0, "x_max": 12.0, "n": 160},
            "solver": {"k": 3, "assembly": "convolution", "kernel_mode": "naive"},
        },
    )
    result = _invoke(["spectrum", "--config", cfg, "--out", str(tmp_path / "out")])
    assert result.exit_code == 3
    assert "numerical failure" in result.output


def test_verify_single_criterion(tmp_path):
    cfg = _write_config(
        tmp_path / "v.json", {"version": 1, "mode": "verify", "criteria": ["C6"]}
    )
    out = tmp_path / "out"
    result = _invoke(["verify", "--config", cfg, "--out", str(out)])
    assert result.exit_code == 0
    assert "C6 PASS" in result.output
    assert "C6 PASS" in (out / "acceptance.txt").read_text()
    assert json.loads((out / "summary.json").read_text()) == {"C6": True}


def test_sweep_fans_out(tmp_path):
    cfg = _write_config(
        tmp_path / "sweep.json",
        _classical_config(
            classical={"x": 0.0, "xdot": 2.0, "t_end": 2.0, "samples": 21},
            sweep={"parameter": "classical.xdot", "values": [1.5, 2.0]},
        ),
    )
    out = tmp_path / "out"
    result = _invoke(["run", "--config", cfg, "--out", str(out), "--jobs", "2"])
    assert result.exit_code == 0
    for i, xdot in enumerate([1.5, 2.0]):
        sub = out / f"sweep-{i:03d}"
        resolved = json.loads((sub / "config.resolved.json").read_text())
        assert resolved["classical"]["xdot"] == xdot
        assert "sweep" not in resolved
        assert (sub / "manifest.json").exists()


def test_dispersion_command_csv(tmp_path):
    out = tmp_path / "disp.csv"
    result = _invoke(
        [
            "dispersion",
            "--kappa",
            "3.0",
            "--samples",
            "13",
            "--v-min",
            "-3",
            "--v-max",
            "3",
            "--out",
            str(out),
        ]
    )
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "xdot,p,E,branch"
    rows = np.array([[float(v) for v in row.split(",")] for row in lines[1:]])
    assert rows.shape == (13, 4)
    # Row at xdot = 1 sits on the upper cusp: p = -2, E = -3/4, middle branch.
    cusp = rows[np.isclose(rows[:, 0], 1.0)][0]
    assert np.allclose(cusp, [1.0, -2.0, -0.75, 2.0], atol=1e-12)
    np.testing.assert_allclose(
        rows[:, 1], rows[:, 0] ** 3 - 3.0 * rows[:, 0], atol=1e-12
    )


def test_dispersion_command_allows_flat_law(tmp_path):
    out = tmp_path / "flat.csv"
    result = _invoke(["dispersion", "--kappa", "0", "--samples", "5", "--out", str(out)])
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 6


def test_emit_dispersion_curve_direct(tmp_path):
    out = tmp_path / "curve.csv"
    emit_dispersion_curve(3.0, 7, v_min=-1.5, v_max=1.5, path=str(out))
    lines = out.read_text().splitlines()
    assert len(lines) == 8
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == -1.5
