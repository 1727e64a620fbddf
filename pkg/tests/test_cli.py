"""Configuration schema, presets, persistence, and the five subcommands."""

import json
import math
import os

import numpy as np
import pytest

from ksapprox.cli import main
from ksapprox.config import (build_kernel, build_model, build_sim_config,
                             load_config, resolve_config)
from ksapprox.errors import ConfigError
from ksapprox.kernels import LinearSum, MexicanHat
from ksapprox.pde_core import read_snapshot
from ksapprox.presets import PRESET_NOTES, preset, preset_names
from ksapprox.solvers import KellerSegel, NonlocalFP
from ksapprox.storage import json_safe
from ksapprox.svgplot import line_plot
from ksapprox.validate import run_battery


# ---------------------------------------------------------------------------
# schema validation


def _minimal_doc(**overrides):
    doc = {
        "grid": {"L": 1.0, "N": 64},
        "kernel": {"family": "mexican_hat", "d1": 0.1, "d2": 3.0},
        "model": {"type": "nonlocal_fp", "mu": 1.0},
        "init": {"kind": "cosine_mode", "base": 1.0, "amplitude": 0.1, "mode": 1},
        "time": {"t_end": 0.01, "dt": 1e-4, "save_every": 10},
    }
    doc.update(overrides)
    return doc


def test_unknown_section_and_key_name_dotted_paths():
    with pytest.raises(ConfigError, match="gird"):
        resolve_config({"gird": {"L": 1.0}})
    with pytest.raises(ConfigError, match="grid.M"):
        resolve_config(_minimal_doc(grid={"L": 1.0, "N": 64, "M": 3}))
    with pytest.raises(ConfigError, match="model.epsilon"):
        doc = _minimal_doc()
        doc["model"]["epsilon"] = 0.1
        resolve_config(doc)
    with pytest.raises(ConfigError, match="kernel.R0"):
        doc = _minimal_doc()
        doc["kernel"] = {"family": "mexican_hat", "d1": 0.1, "d2": 3.0, "R0": 1.0}
        resolve_config(doc)


def test_negative_eps_names_field():
    doc = _minimal_doc()
    doc["model"] = {"type": "keller_segel", "mu": 1.0, "eps": -1e-3,
                    "a": [1.0], "d": [1.0]}
    with pytest.raises(ConfigError, match="model.eps"):
        resolve_config(doc)


def test_model_validation_rules():
    # keller_segel needs eps
    doc = _minimal_doc()
    doc["model"] = {"type": "keller_segel", "a": [1.0], "d": [1.0]}
    with pytest.raises(ConfigError, match="model.eps"):
        resolve_config(doc)
    # explicit tables and expansion degree are mutually exclusive
    doc["model"] = {"type": "keller_segel", "eps": 1e-2, "a": [1.0], "d": [1.0], "n": 3}
    with pytest.raises(ConfigError, match="model.n"):
        resolve_config(doc)
    # M consistency against the channel count
    doc["model"] = {"type": "keller_segel", "eps": 1e-2, "a": [1.0, -1.0],
                    "d": [0.1, 3.0], "M": 5}
    with pytest.raises(ConfigError, match="model.M"):
        resolve_config(doc)
    # fp model rejects chemotaxis-only keys
    doc["model"] = {"type": "nonlocal_fp", "mu": 1.0, "eps": 1e-2}
    with pytest.raises(ConfigError, match="model.eps"):
        resolve_config(doc)


def test_defaults_are_materialized():
    cfg = resolve_config(_minimal_doc())
    assert cfg["output"] == {"directory": "out", "formats": ["csv"]}
    assert cfg["stability"] == {"n_max": 64}
    assert cfg["time"]["save_every"] == 10
    cfg2 = resolve_config({"grid": {"L": 1.0, "N": 64}})
    assert cfg2["init"]["kind"] == "perturbed_constant"
    assert cfg2["init"]["seed"] == 0
    assert cfg2["init"]["amplitude"] == 1e-3


def test_build_kernel_families():
    doc = _minimal_doc()
    assert isinstance(build_kernel(resolve_config(doc)), MexicanHat)
    doc["kernel"] = {"family": "linear_sum", "a": [1.0, 0.5], "d": [1.0, math.inf]}
    kernel = build_kernel(resolve_config(doc))
    assert isinstance(kernel, LinearSum)
    assert kernel.terms[1][1] == math.inf
    doc["kernel"] = {"family": "sampled", "values": [0.0, 1.0, 2.0, 3.0]}
    with pytest.raises(ConfigError, match="not even"):
        build_kernel(resolve_config(doc))


def test_build_model_expansion_channels():
    doc = _minimal_doc()
    doc["kernel"] = {"family": "bessel_fund", "d": 1.0}
    doc["model"] = {"type": "keller_segel", "mu": 2.0, "eps": 1e-2, "n": 3,
                    "d1_mode": "exact"}
    model = build_model(resolve_config(doc))
    assert isinstance(model, KellerSegel)
    assert model.params.M == 4
    assert math.isinf(model.params.d[0])
    assert model.params.mu == 2.0
    # the degree-n expansion of k_1 is nearly the pure j = 1 channel
    assert abs(model.params.d[1] - 1.0) < 1e-12


def test_build_sim_config_roundtrip():
    sim = build_sim_config(resolve_config(_minimal_doc()))
    assert isinstance(sim.model, NonlocalFP)
    assert sim.grid.N == 64
    assert sim.dt == 1e-4


# ---------------------------------------------------------------------------
# presets


def test_presets_exist_and_validate():
    assert set(preset_names()) >= {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"}
    for name in preset_names():
        cfg = resolve_config(preset(name))
        assert name in PRESET_NOTES
        if "time" in cfg:  # simulate-style presets build end to end
            build_sim_config(cfg)
        else:  # expand/stability-style presets at least build their kernel
            build_kernel(cfg)


def test_preset_returns_independent_copies():
    a = preset("fig3")
    a["model"]["mu"] = 99.0
    assert preset("fig3")["model"]["mu"] == 5.0


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        preset("fig99")


# ---------------------------------------------------------------------------
# svg writer and json sanitation


def test_line_plot_writes_polylines(tmp_path):
    path = tmp_path / "plot.svg"
    x = np.linspace(0.0, 1.0, 32)
    line_plot(path, x, [np.sin(x), np.cos(x)], labels=["s", "c"],
              title="demo", xlabel="x", ylabel="y")
    text = path.read_text()
    assert text.count("<polyline") == 2
    assert text.startswith("<svg ")
    assert "demo" in text and "</svg>" in text


def test_line_plot_rejects_bad_input(tmp_path):
    x = np.linspace(0.0, 1.0, 8)
    with pytest.raises(ConfigError):
        line_plot(tmp_path / "a.svg", x, [np.ones(7)])
    with pytest.raises(ConfigError):
        line_plot(tmp_path / "b.svg", x, [np.full(8, np.nan)])
    with pytest.raises(ConfigError):
        line_plot(tmp_path / "c.svg", x, [np.ones(8)], labels=["a", "b"])


def test_json_safe_replaces_nonfinite():
    out = json_safe({"d": [1.0, math.inf], "x": -math.inf, "ok": 2})
    assert out == {"d": [1.0, "inf"], "x": "-inf", "ok": 2}


# ---------------------------------------------------------------------------
# validate battery


def test_battery_passes_clean():
    results = run_battery()
    assert all(r.passed for r in results)
    names = [r.name for r in results]
    assert "kernel_unit_mass" in names and "basis_identities" in names


def test_battery_reports_measured_mass_value():
    mass_check = [r for r in run_battery() if r.name == "kernel_unit_mass"][0]
    assert "measured integral" in mass_check.detail
    assert "1.000000" in mass_check.detail


def test_battery_corrupt_hook_fails_named_check():
    results = run_battery(corrupt=True)
    failed = [r.name for r in results if not r.passed]
    assert failed == ["basis_identities"]


def test_cli_validate_exit_codes(capsys):
    assert main(["validate", "--quiet"]) == 0
    assert main(["validate", "--corrupt"]) == 1
    out = capsys.readouterr().out
    assert "FAIL basis_identities" in out


# ---------------------------------------------------------------------------
# CLI end to end


def test_cli_requires_exactly_one_source(tmp_path, capsys):
    assert main(["simulate", "--quiet"]) == 2
    cfg = tmp_path / "c.toml"
    cfg.write_text("[grid]\nL = 1.0\nN = 64\n")
    assert main(["simulate", "--config", str(cfg), "--preset", "heat", "--quiet"]) == 2
    err = capsys.readouterr().err
    assert "exactly one" in err


def test_cli_config_error_reports_field(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(
        "[grid]\nL = 1.0\nN = 64\n"
        "[model]\ntype = \"keller_segel\"\nmu = 1.0\neps = -1e-3\n"
        "a = [1.0]\nd = [1.0]\n"
    )
    assert main(["simulate", "--config", str(cfg), "--quiet"]) == 2
    assert "model.eps" in capsys.readouterr().err


def test_cli_heat_preset_constant_mass(tmp_path):
    out = tmp_path / "heat"
    assert main(["simulate", "--preset", "heat", "--out", str(out), "--quiet"]) == 0
    lines = (out / "summary.csv").read_text().splitlines()
    assert lines[0] == "t,mass,min,max"
    masses = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(m == masses[0] for m in masses)
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["command"] == "simulate"
    assert meta["config"]["stability"]["n_max"] == 64      # defaulted field echoed
    assert meta["config"]["time"]["save_every"] == 20
    assert meta["seed"] == 1
    assert "timestamp" in meta


def test_cli_simulate_determinism_bytes(tmp_path):
    out = tmp_path / "run"
    assert main(["simulate", "--preset", "heat", "--out", str(out), "--quiet"]) == 0
    first_summary = (out / "summary.csv").read_bytes()
    first_meta = [line for line in (out / "metadata.json").read_text().splitlines()
                  if "timestamp" not in line]
    first_snap = (out / "snapshot_000000.bin").read_bytes()
    assert main(["simulate", "--preset", "heat", "--out", str(out), "--quiet"]) == 0
    assert (out / "summary.csv").read_bytes() == first_summary
    second_meta = [line for line in (out / "metadata.json").read_text().splitlines()
                   if "timestamp" not in line]
    assert second_meta == first_meta
    assert (out / "snapshot_000000.bin").read_bytes() == first_snap


def test_cli_seed_override_changes_outcome(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["simulate", "--preset", "heat", "--out", str(out_a),
                 "--seed", "5", "--quiet"]) == 0
    assert main(["simulate", "--preset", "heat", "--out", str(out_b),
                 "--seed", "6", "--quiet"]) == 0
    assert json.loads((out_a / "metadata.json").read_text())["seed"] == 5
    field_a, _ = read_snapshot(out_a / "snapshot_000000.bin")
    field_b, _ = read_snapshot(out_b / "snapshot_000000.bin")
    assert not np.array_equal(field_a.values, field_b.values)


def test_cli_seed_out_of_range(tmp_path):
    assert main(["simulate", "--preset", "heat", "--seed", str(2 ** 64),
                 "--out", str(tmp_path / "x"), "--quiet"]) == 2


def test_cli_fig3_final_snapshot_has_peaks(tmp_path):
    out = tmp_path / "fig3"
    assert main(["simulate", "--preset", "fig3", "--out", str(out), "--quiet"]) == 0
    snaps = sorted(out.glob("snapshot_*.bin"))
    field, t = read_snapshot(snaps[-1])
    assert t == pytest.approx(3.0)
    vals = field.values
    above = vals > np.mean(vals)
    peaks = (vals > np.roll(vals, 1)) & (vals >= np.roll(vals, -1)) & above
    assert int(np.sum(peaks)) >= 2
    assert (out / "profiles_overlay.svg").exists()
    assert (out / "final_state.csv").read_text().splitlines()[0] == "x,value"


def test_cli_blowup_exit_code(tmp_path, capsys):
    cfg = tmp_path / "blow.toml"
    cfg.write_text(
        "[grid]\nL = 1.0\nN = 64\n"
        "[kernel]\nfamily = \"mexican_hat\"\nd1 = 0.1\nd2 = 3.0\n"
        "[model]\ntype = \"nonlocal_fp\"\nmu = 50.0\n"
        "[init]\nkind = \"cosine_mode\"\nbase = 1.0\namplitude = 0.5\nmode = 1\n"
        "[time]\nt_end = 5.0\ndt = 0.5\nsave_every = 1000\n"
        f"[output]\ndirectory = \"{(tmp_path / 'blow_out').as_posix()}\"\n"
    )
    assert main(["simulate", "--config", str(cfg), "--quiet"]) == 3
    assert "blow-up" in capsys.readouterr().err


def test_cli_expand_unit_channel(tmp_path):
    # W = 2 sinh(L) k_1 is exactly the j = 1 basis function, so the
    # degree-3 table must be the unit vector at j = 2 (alpha_1).
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        "[grid]\nL = 1.0\nN = 64\n"
        f"[kernel]\nfamily = \"linear_sum\"\na = [{2.0 * math.sinh(1.0)!r}]\nd = [1.0]\n"
        "[model]\ntype = \"nonlocal_fp\"\nmu = 1.0\nn = 3\n"
        f"[output]\ndirectory = \"{(tmp_path / 'exp_out').as_posix()}\"\n"
        "formats = [\"csv\", \"svg\"]\n"
    )
    assert main(["expand", "--config", str(cfg), "--quiet"]) == 0
    out = tmp_path / "exp_out"
    rows = (out / "expand_n3.csv").read_text().splitlines()
    assert rows[0] == "j,alpha,a,d"
    assert len(rows) == 5  # header + channels j = 1..4
    alphas = [float(r.split(",")[1]) for r in rows[1:]]
    expected = [0.0, 1.0, 0.0, 0.0]
    assert np.allclose(alphas, expected, atol=1e-9)
    assert rows[1].split(",")[3] == "inf"  # exact-limit first channel
    report = json.loads((out / "expand.json").read_text())
    assert report["results"][0]["sup_error"] < 1e-9
    assert (out / "overlay_n3.svg").exists()


def test_cli_expand_fig6_improving_fit(tmp_path):
    out = tmp_path / "fig6"
    assert main(["expand", "--preset", "fig6", "--out", str(out), "--quiet"]) == 0
    report = json.loads((out / "expand.json").read_text())
    errors = {r["n"]: r["sup_error"] for r in report["results"]}
    assert set(errors) == {4, 8, 12}
    assert errors[12] < errors[8] < errors[4]
    for n in (4, 8, 12):
        rows = (out / f"expand_n{n}.csv").read_text().splitlines()
        assert len(rows) == n + 2  # header + n + 1 channels
        assert (out / f"overlay_n{n}.svg").exists()


def test_cli_expand_requires_degree(tmp_path, capsys):
    cfg = tmp_path / "nodeg.toml"
    cfg.write_text(
        "[grid]\nL = 1.0\nN = 64\n"
        "[kernel]\nfamily = \"bessel_fund\"\nd = 1.0\n"
        "[model]\ntype = \"nonlocal_fp\"\nmu = 1.0\n"
        f"[output]\ndirectory = \"{(tmp_path / 'o').as_posix()}\"\n"
    )
    assert main(["expand", "--config", str(cfg), "--quiet"]) == 2
    assert "model.n" in capsys.readouterr().err


def test_cli_stability_fig2(tmp_path):
    out = tmp_path / "fig2"
    assert main(["stability", "--preset", "fig2", "--out", str(out), "--quiet"]) == 0
    rows = (out / "stability.csv").read_text().splitlines()
    assert rows[0] == "n,omega_n,lambda_n"
    assert len(rows) == 22  # header + modes 0..20
    summary = json.loads((out / "stability.json").read_text())
    assert summary["n_star"] == 6
    assert summary["lambda_star"] == pytest.approx(13.508576710771846, rel=1e-12)
    assert summary["unstable_band"] == list(range(1, 10))
    # interior positive maximum: ends of the scanned range lie below it
    lams = [float(r.split(",")[2]) for r in rows[1:]]
    assert lams[6] > 0
    assert lams[6] > lams[1] and lams[6] > lams[-1]
    assert (out / "dispersion.svg").exists()


def test_cli_stability_below_threshold(tmp_path):
    cfg = tmp_path / "sub.toml"
    cfg.write_text(
        "[grid]\nL = 1.0\nN = 64\n"
        "[kernel]\nfamily = \"bessel_fund\"\nd = 1.0\n"
        "[model]\ntype = \"nonlocal_fp\"\nmu = 5.0\n"   # below pi^2 + 1
        "[stability]\nn_max = 12\n"
        f"[output]\ndirectory = \"{(tmp_path / 'sub_out').as_posix()}\"\n"
    )
    assert main(["stability", "--config", str(cfg), "--quiet"]) == 0
    summary = json.loads((tmp_path / "sub_out" / "stability.json").read_text())
    assert summary["unstable_band"] == []
    assert summary["mu_star_mode1"] == pytest.approx(math.pi ** 2 + 1.0, rel=1e-12)
    rows = (tmp_path / "sub_out" / "stability.csv").read_text().splitlines()[1:]
    assert all(float(r.split(",")[2]) <= 0 for r in rows)


def _converge_toml(tmp_path, workers):
    return (
        "[grid]\nL = 1.0\nN = 128\n"
        "[kernel]\nfamily = \"mexican_hat\"\nd1 = 0.1\nd2 = 3.0\n"
        "[model]\ntype = \"nonlocal_fp\"\nmu = 1.0\n"
        "[init]\nkind = \"cosine_mode\"\nbase = 1.0\namplitude = 0.1\nmode = 1\n"
        "[time]\nt_end = 0.1\ndt = 2e-4\nsave_every = 50\n"
        f"[output]\ndirectory = \"{(tmp_path / 'conv_out').as_posix()}\"\n"
        "[converge]\neps = [1e-1, 1e-2, 1e-3]\n"
        f"workers = {workers}\n"
    )


def test_cli_converge_rows_slope_and_rerun_bytes(tmp_path):
    cfg = tmp_path / "conv.toml"
    cfg.write_text(_converge_toml(tmp_path, workers=2))
    assert main(["converge", "--config", str(cfg), "--quiet"]) == 0
    out = tmp_path / "conv_out"
    rows = (out / "converge.csv").read_text().splitlines()
    assert rows[0] == "eps,sup_t_L2,l2_t_H1"
    assert len(rows) == 4  # header + one row per ladder value
    eps_col = [float(r.split(",")[0]) for r in rows[1:]]
    assert eps_col == sorted(eps_col, reverse=True)
    report = json.loads((out / "converge.json").read_text())
    assert 0.7 <= report["slope"] <= 1.3
    first = (out / "converge.csv").read_bytes()
    assert main(["converge", "--config", str(cfg), "--quiet"]) == 0
    assert (out / "converge.csv").read_bytes() == first


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("grid = [not toml")
    with pytest.raises(ConfigError, match="TOML"):
        load_config(bad)
